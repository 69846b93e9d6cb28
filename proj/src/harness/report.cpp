#include "qboost/harness/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "qboost/harness/config.hpp"

namespace qboost::harness {

namespace {

template <class T>
std::string field(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_floating_point_v<T>) {
        return format_number(*v);
    } else {
        return std::to_string(*v);
    }
}

// Notes are free text; keep the CSV rectangular.
std::string sanitize(std::string s) {
    std::ranges::replace(s, ',', ';');
    std::ranges::replace(s, '\n', ' ');
    std::ranges::replace(s, '"', '\'');
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

std::string format_number(double value) {
    if (value == 0.0) return "0";  // also folds -0
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
    return {buf.data(), ptr};
}

std::string to_csv_line(const ReportRow& r) {
    std::string line;
    line += r.mode;
    line += ',' + std::to_string(r.n);
    line += ',' + std::to_string(r.t);
    line += ',' + format_number(r.epsilon);
    line += ',' + std::to_string(r.seed);
    line += ',' + field(r.iteration);
    line += ',' + field(r.r_hat_raw);
    line += ',' + field(r.r_hat);
    line += ',' + field(r.alpha);
    line += ',' + field(r.c_hat);
    line += ',' + field(r.c_hat_bound);
    line += ',' + field(r.phase_bits);
    line += ',' + field(r.queries);
    line += ',' + field(r.cumulative_queries);
    line += ',' + field(r.violation_rate);
    line += ',' + field(r.hoeffding_bound);
    line += ',' + sanitize(r.note);
    return line;
}

std::string render_csv(const Report& report) {
    auto rows = report.rows;
    std::ranges::stable_sort(rows, [](const ReportRow& a, const ReportRow& b) {
        return std::tuple(a.mode, a.n, a.epsilon, a.iteration.value_or(0)) <
               std::tuple(b.mode, b.n, b.epsilon, b.iteration.value_or(0));
    });
    std::string out = std::string(kCsvHeader) + '\n';
    for (const auto& r : rows) out += to_csv_line(r) + '\n';
    for (const auto& r : report.errors) out += to_csv_line(r) + '\n';
    out += to_csv_line(report.summary) + '\n';
    return out;
}

void write_report(const std::filesystem::path& dir, const Report& report,
                  const ExperimentConfig& config) {
    std::filesystem::create_directories(dir);
    write_file(dir / "report.csv", render_csv(report));
    write_file(dir / "summary.json", report.json.dump(2) + '\n');
    write_file(dir / "resolved-config.txt", to_text(config));
}

}  // namespace qboost::harness
