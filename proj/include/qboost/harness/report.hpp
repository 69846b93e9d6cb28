#pragma once

// CSV/JSON report assembly. CSV numbers use std::to_chars (shortest
// round-trip, '.' separator, no locale) so reruns are byte-identical.
// Wall time only goes to the JSON summary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qboost::harness {

struct ExperimentConfig;

std::string format_number(double value);

struct ReportRow {
    std::string mode;  ///< classical | quantum | hoeffding | error | summary
    std::size_t n = 0;
    std::size_t t = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::optional<int> iteration;
    std::optional<double> r_hat_raw;
    std::optional<double> r_hat;
    std::optional<double> alpha;
    std::optional<double> c_hat;
    std::optional<double> c_hat_bound;
    std::optional<int> phase_bits;
    std::optional<std::uint64_t> queries;
    std::optional<std::uint64_t> cumulative_queries;
    std::optional<double> violation_rate;
    std::optional<double> hoeffding_bound;
    std::string note;
};

inline constexpr const char* kCsvHeader =
    "mode,N,T,epsilon,seed,iteration,r_hat_raw,r_hat,alpha,c_hat,c_hat_bound,phase_bits,"
    "queries,cumulative_queries,violation_rate,hoeffding_bound,note";

std::string to_csv_line(const ReportRow& row);

struct Report {
    std::vector<ReportRow> rows;    ///< data rows, any order
    std::vector<ReportRow> errors;  ///< error marker rows
    ReportRow summary;
    nlohmann::json json = nlohmann::json::object();
    bool partial = false;  ///< a run hit a resource cap; error rows say which
};

/// Header, data rows sorted by (mode, N, epsilon, iteration), error rows, summary row.
std::string render_csv(const Report& report);

/// Writes report.csv, summary.json and resolved-config.txt into `dir`.
void write_report(const std::filesystem::path& dir, const Report& report,
                  const ExperimentConfig& config);

}  // namespace qboost::harness
