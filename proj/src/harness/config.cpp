#include "qboost/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "qboost/harness/report.hpp"

namespace qboost::harness {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("config: cannot parse '" + value + "' for key '" + key + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) throw ConfigError("config: '" + key + "' must be finite");
    }
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty list entry for key '" + key + "'");
        out.push_back(parse_number<T>(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: '" + key + "' must be true or false");
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError("config: " + message);
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += format_number(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

void validate(const ExperimentConfig& c) {
    require(c.n >= 1, "N must be at least 1");
    require(c.t >= 1 && c.t <= static_cast<std::size_t>(kDefaultBranchCap),
            "T must lie in [1, 20]");
    require(c.epsilon > 0.0, "epsilon must be positive");
    require(c.failure_prob > 0.0 && c.failure_prob < 1.0, "failure_prob must lie in (0, 1)");
    require(c.cells >= 2 && c.cells <= (1 << 20), "cells must lie in [2, 2^20]");
    require(c.flip_noise >= 0.0 && c.flip_noise <= 1.0, "flip_noise must lie in [0, 1]");
    require(c.blob_separation >= 0.0, "blob_separation must be non-negative");
    for (auto n : c.sweep_n) require(n >= 1, "sweep_N entries must be at least 1");
    for (auto e : c.sweep_epsilon) require(e > 0.0, "sweep_epsilon entries must be positive");
    require(c.c_hat_target >= 1.0, "c_hat_target must be at least 1");
    require(c.trials >= 1000, "trials must be at least 1000");
    require(c.hoeffding_t >= 1 && static_cast<std::size_t>(c.hoeffding_t) <= c.t,
            "hoeffding_t must lie in [1, T]");
    for (auto n : c.grid_n) require(n >= 1, "grid_N entries must be at least 1");
    for (auto e : c.grid_epsilon) require(e > 0.0, "grid_epsilon entries must be positive");
    require(c.guard_bits >= 0 && c.guard_bits <= 16, "guard_bits must lie in [0, 16]");
    require(c.clamp_width > 0.0 && c.clamp_width < 0.5, "clamp_width must lie in (0, 0.5)");
    require(c.memory_cap >= 1, "memory_cap must be at least 1");
    require(c.workers >= 1 && c.workers <= 256, "workers must lie in [1, 256]");
    require(c.povm_sharpness >= 0.0 && c.povm_sharpness <= 1.0,
            "povm_sharpness must lie in [0, 1]");
    require(c.povm_axis_spread >= 0.0, "povm_axis_spread must be non-negative");
    require(!c.output.empty(), "output must not be empty");
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::classical: return "classical";
        case Mode::quantum: return "quantum";
        case Mode::compare: return "compare";
        case Mode::hoeffding: return "hoeffding";
        case Mode::povm_demo: return "povm-demo";
    }
    return "?";
}

std::optional<Mode> parse_mode(const std::string& name) {
    for (Mode m : {Mode::classical, Mode::quantum, Mode::compare, Mode::hoeffding, Mode::povm_demo}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

DatasetSpec ExperimentConfig::dataset_spec(std::size_t n_points) const {
    DatasetSpec spec;
    spec.kind = dataset;
    spec.n = n_points;
    spec.classifiers = t;
    spec.cells = cells;
    spec.flip_noise = flip_noise;
    spec.blob_separation = blob_separation;
    return spec;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"mode", [&](const auto& k, const auto& v) {
             const auto m = parse_mode(v);
             if (!m) throw ConfigError("config: unknown " + k + " '" + v + "'");
             c.mode = *m;
         }},
        {"seed", [&](const auto& k, const auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"N", [&](const auto& k, const auto& v) { c.n = parse_number<std::size_t>(k, v); }},
        {"T", [&](const auto& k, const auto& v) { c.t = parse_number<std::size_t>(k, v); }},
        {"epsilon", [&](const auto& k, const auto& v) { c.epsilon = parse_number<double>(k, v); }},
        {"failure_prob",
         [&](const auto& k, const auto& v) { c.failure_prob = parse_number<double>(k, v); }},
        {"dataset", [&](const auto& k, const auto& v) {
             if (v == "blobs") {
                 c.dataset = DatasetKind::blobs;
             } else if (v == "noisy-stump") {
                 c.dataset = DatasetKind::noisy_stump;
             } else {
                 throw ConfigError("config: unknown " + k + " '" + v + "'");
             }
         }},
        {"cells", [&](const auto& k, const auto& v) { c.cells = parse_number<int>(k, v); }},
        {"flip_noise",
         [&](const auto& k, const auto& v) { c.flip_noise = parse_number<double>(k, v); }},
        {"blob_separation",
         [&](const auto& k, const auto& v) { c.blob_separation = parse_number<double>(k, v); }},
        {"sweep_N",
         [&](const auto& k, const auto& v) { c.sweep_n = parse_list<std::size_t>(k, v); }},
        {"sweep_epsilon",
         [&](const auto& k, const auto& v) { c.sweep_epsilon = parse_list<double>(k, v); }},
        {"auto_sample_size",
         [&](const auto& k, const auto& v) { c.auto_sample_size = parse_bool(k, v); }},
        {"c_hat_target",
         [&](const auto& k, const auto& v) { c.c_hat_target = parse_number<double>(k, v); }},
        {"trials", [&](const auto& k, const auto& v) { c.trials = parse_number<std::size_t>(k, v); }},
        {"hoeffding_t",
         [&](const auto& k, const auto& v) { c.hoeffding_t = parse_number<int>(k, v); }},
        {"grid_N", [&](const auto& k, const auto& v) { c.grid_n = parse_list<std::size_t>(k, v); }},
        {"grid_epsilon",
         [&](const auto& k, const auto& v) { c.grid_epsilon = parse_list<double>(k, v); }},
        {"guard_bits", [&](const auto& k, const auto& v) { c.guard_bits = parse_number<int>(k, v); }},
        {"qpe_mode", [&](const auto& k, const auto& v) {
             if (v == "exact") {
                 c.qpe_mode = ThetaMode::maximum_likelihood;
             } else if (v == "sampled") {
                 c.qpe_mode = ThetaMode::sampled;
             } else {
                 throw ConfigError("config: unknown " + k + " '" + v + "'");
             }
         }},
        {"qpe_backend", [&](const auto& k, const auto& v) {
             if (v == "autocorrelation") {
                 c.qpe_backend = QpeBackend::autocorrelation;
             } else if (v == "full-register") {
                 c.qpe_backend = QpeBackend::full_register;
             } else {
                 throw ConfigError("config: unknown " + k + " '" + v + "'");
             }
         }},
        {"clamp_width",
         [&](const auto& k, const auto& v) { c.clamp_width = parse_number<double>(k, v); }},
        {"memory_cap",
         [&](const auto& k, const auto& v) { c.memory_cap = parse_number<std::size_t>(k, v); }},
        {"workers", [&](const auto& k, const auto& v) { c.workers = parse_number<unsigned>(k, v); }},
        {"povm_sharpness",
         [&](const auto& k, const auto& v) { c.povm_sharpness = parse_number<double>(k, v); }},
        {"povm_axis_spread",
         [&](const auto& k, const auto& v) { c.povm_axis_spread = parse_number<double>(k, v); }},
        {"output", [&](const auto&, const auto& v) { c.output = v; }},
    };

    std::set<std::string> seen;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
        }
        it->second(key, value);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string to_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "mode = " << to_string(c.mode) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "N = " << c.n << '\n';
    out << "T = " << c.t << '\n';
    out << "epsilon = " << format_number(c.epsilon) << '\n';
    out << "failure_prob = " << format_number(c.failure_prob) << '\n';
    out << "dataset = " << (c.dataset == DatasetKind::blobs ? "blobs" : "noisy-stump") << '\n';
    out << "cells = " << c.cells << '\n';
    out << "flip_noise = " << format_number(c.flip_noise) << '\n';
    out << "blob_separation = " << format_number(c.blob_separation) << '\n';
    if (!c.sweep_n.empty()) out << "sweep_N = " << join(c.sweep_n) << '\n';
    if (!c.sweep_epsilon.empty()) out << "sweep_epsilon = " << join(c.sweep_epsilon) << '\n';
    out << "auto_sample_size = " << (c.auto_sample_size ? "true" : "false") << '\n';
    out << "c_hat_target = " << format_number(c.c_hat_target) << '\n';
    out << "trials = " << c.trials << '\n';
    out << "hoeffding_t = " << c.hoeffding_t << '\n';
    if (!c.grid_n.empty()) out << "grid_N = " << join(c.grid_n) << '\n';
    if (!c.grid_epsilon.empty()) out << "grid_epsilon = " << join(c.grid_epsilon) << '\n';
    out << "guard_bits = " << c.guard_bits << '\n';
    out << "qpe_mode = " << (c.qpe_mode == ThetaMode::sampled ? "sampled" : "exact") << '\n';
    out << "qpe_backend = "
        << (c.qpe_backend == QpeBackend::full_register ? "full-register" : "autocorrelation") << '\n';
    out << "clamp_width = " << format_number(c.clamp_width) << '\n';
    out << "memory_cap = " << c.memory_cap << '\n';
    out << "workers = " << c.workers << '\n';
    out << "povm_sharpness = " << format_number(c.povm_sharpness) << '\n';
    out << "povm_axis_spread = " << format_number(c.povm_axis_spread) << '\n';
    out << "output = " << c.output << '\n';
    return out.str();
}

}  // namespace qboost::harness
