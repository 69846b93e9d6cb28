#include "qboost/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include "qboost/classical_boost.hpp"
#include "qboost/counter_rng.hpp"
#include "qboost/errors.hpp"
#include "qboost/harness/dataset.hpp"
#include "qboost/qstate.hpp"
#include "qboost/quantum_sim.hpp"

namespace qboost::harness {

namespace {

using nlohmann::json;
using clock_type = std::chrono::steady_clock;

constexpr std::uint64_t kDatasetKey = 0xda7a;
constexpr std::uint64_t kPovmStateStream = 0x5747;
constexpr std::uint64_t kPovmAxisStream = 0xa815;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

// Runs fn(i) for i in [0, count) on up to `workers` threads; the first
// exception is rethrown after every thread has joined.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

QuantumTrainOptions quantum_options(const ExperimentConfig& c) {
    QuantumTrainOptions o;
    o.guard_bits = c.guard_bits;
    o.clamp_width = c.clamp_width;
    o.memory_cap = c.memory_cap;
    o.backend = c.qpe_backend;
    o.mode = c.qpe_mode;
    return o;
}

ReportRow base_row(const char* mode, std::size_t n, std::size_t t, double eps, std::uint64_t seed) {
    ReportRow r;
    r.mode = mode;
    r.n = n;
    r.t = t;
    r.epsilon = eps;
    r.seed = seed;
    return r;
}

std::vector<ReportRow> classical_rows(const TrainResult& res, std::size_t n, std::size_t t,
                                      double eps, std::uint64_t seed) {
    std::vector<ReportRow> rows;
    for (const auto& rec : res.trace.records()) {
        auto r = base_row("classical", n, t, eps, seed);
        r.iteration = rec.t;
        r.r_hat_raw = rec.r_hat_raw;
        r.r_hat = rec.r_hat;
        r.alpha = rec.alpha;
        r.c_hat = rec.c_hat;
        r.c_hat_bound = rec.c_hat_bound;
        r.queries = static_cast<std::uint64_t>(n);
        r.cumulative_queries = rec.query_count;
        if (rec.clamped) r.note = "clamped";
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ReportRow> quantum_rows(const QuantumTrainResult& res, std::size_t n, std::size_t t,
                                    double eps, std::uint64_t seed) {
    std::vector<ReportRow> rows;
    for (const auto& rec : res.report.iterations) {
        auto r = base_row("quantum", n, t, eps, seed);
        r.iteration = rec.t;
        r.r_hat_raw = rec.r_hat_raw;
        r.r_hat = rec.r_hat;
        r.alpha = rec.alpha;
        r.c_hat = rec.c_hat;
        r.c_hat_bound = rec.c_hat_bound;
        r.phase_bits = rec.phase_bits;
        r.queries = rec.queries;
        r.cumulative_queries = rec.cumulative_queries;
        if (rec.clamped) r.note = "clamped";
        rows.push_back(std::move(r));
    }
    return rows;
}

json classical_json(const TrainResult& res, double wall) {
    json j;
    j["alpha"] = res.model.alphas();
    j["r_hat"] = res.model.r_hats();
    j["c_hat"] = res.model.c_hats();
    j["queries"] = res.trace.query_count();
    j["wall_time_s"] = wall;
    return j;
}

json quantum_json(const QuantumTrainResult& res) {
    json j;
    j["alpha"] = res.model.alphas();
    j["r_hat"] = res.model.r_hats();
    std::vector<double> exact;
    std::vector<double> c_table;
    std::vector<int> bits;
    for (const auto& rec : res.report.iterations) {
        exact.push_back(rec.r_hat_exact);
        c_table.push_back(rec.c_hat);
        bits.push_back(rec.phase_bits);
    }
    j["r_hat_exact"] = exact;
    j["c_hat"] = c_table;
    j["phase_bits"] = bits;
    j["queries"] = res.report.total_queries;
    j["wall_time_s"] = res.report.wall_time_s;
    return j;
}

ReportRow error_row(const char* mode, std::size_t n, std::size_t t, double eps, std::uint64_t seed,
                    const std::string& what) {
    auto r = base_row("error", n, t, eps, seed);
    r.note = std::string(mode) + ": " + what;
    return r;
}

struct CellResult {
    std::vector<ReportRow> rows;
    std::optional<ReportRow> error;
    json cell;
    std::uint64_t classical_queries = 0;
    std::uint64_t quantum_queries = 0;
    double max_alpha_diff = 0.0;
};

// Classical and quantum training on one (sample, classifiers) pair.
CellResult compare_cell(const LabeledSample& sample, const std::vector<WeakClassifier>& classifiers,
                        double eps, const ExperimentConfig& c) {
    CellResult out;
    const std::size_t n = sample.size();
    const std::size_t t = classifiers.size();
    out.cell["N"] = n;
    out.cell["epsilon"] = eps;

    const auto start = clock_type::now();
    const auto classical = train(classifiers, sample, c.seed, TrainOptions{c.clamp_width});
    out.cell["classical"] = classical_json(classical, seconds_since(start));
    out.rows = classical_rows(classical, n, t, eps, c.seed);
    out.classical_queries = classical.trace.query_count();

    try {
        const auto quantum = quantum_train(classifiers, sample, eps, c.seed, quantum_options(c));
        out.cell["quantum"] = quantum_json(quantum);
        auto q_rows = quantum_rows(quantum, n, t, eps, c.seed);
        out.rows.insert(out.rows.end(), q_rows.begin(), q_rows.end());
        out.quantum_queries = quantum.report.total_queries;

        std::vector<double> diff;
        for (std::size_t i = 0; i < t; ++i) {
            diff.push_back(std::abs(classical.model.alphas()[i] - quantum.model.alphas()[i]));
        }
        out.max_alpha_diff = diff.empty() ? 0.0 : *std::ranges::max_element(diff);
        out.cell["alpha_abs_diff"] = diff;
        out.cell["max_alpha_diff"] = out.max_alpha_diff;
    } catch (const CapExceededError& e) {
        out.error = error_row("quantum", n, t, eps, c.seed, e.what());
        out.cell["error"] = e.what();
    }
    return out;
}

GeneratedDataset dataset_for(const ExperimentConfig& c, std::size_t n) {
    return generate_dataset(c.dataset_spec(n), dataset_seed(c.seed));
}

ReportRow summary_row(const ExperimentConfig& c, const char* note_prefix, std::uint64_t queries,
                      std::string note) {
    auto r = base_row("summary", c.n, c.t, c.epsilon, c.seed);
    r.queries = queries;
    r.note = std::string("mode=") + note_prefix + (note.empty() ? "" : ";" + note);
    return r;
}

Report assemble_compare(const ExperimentConfig& c, std::vector<CellResult> cells,
                        const char* label, double wall) {
    Report report;
    json runs = json::array();
    std::uint64_t classical_total = 0;
    std::uint64_t quantum_total = 0;
    double max_diff = 0.0;
    for (auto& cell : cells) {
        report.rows.insert(report.rows.end(), cell.rows.begin(), cell.rows.end());
        if (cell.error) {
            report.errors.push_back(*cell.error);
            report.partial = true;
        }
        classical_total += cell.classical_queries;
        quantum_total += cell.quantum_queries;
        max_diff = std::max(max_diff, cell.max_alpha_diff);
        runs.push_back(std::move(cell.cell));
    }
    report.json["mode"] = label;
    report.json["seed"] = c.seed;
    report.json["T"] = c.t;
    report.json["runs"] = std::move(runs);
    report.json["classical_queries"] = classical_total;
    report.json["quantum_queries"] = quantum_total;
    report.json["max_alpha_diff"] = max_diff;
    report.json["partial"] = report.partial;
    report.json["wall_time_s"] = wall;
    report.summary = summary_row(c, label, classical_total + quantum_total,
                                 "classical_queries=" + std::to_string(classical_total) +
                                     ";quantum_queries=" + std::to_string(quantum_total) +
                                     ";max_alpha_diff=" + format_number(max_diff) +
                                     (report.partial ? ";partial" : ""));
    return report;
}

}  // namespace

std::uint64_t dataset_seed(std::uint64_t seed) { return derive_seed(seed, kDatasetKey); }

std::size_t auto_sample_size(const ExperimentConfig& c, double epsilon) {
    auto n = static_cast<std::size_t>(sample_size_for(c.c_hat_target, epsilon, c.failure_prob));
    if (c.dataset == DatasetKind::noisy_stump) {
        const auto cells = static_cast<std::size_t>(c.cells);
        n = (n + cells - 1) / cells * cells;
    }
    return n;
}

Report run_classical(const ExperimentConfig& c) {
    const auto start = clock_type::now();
    const auto data = dataset_for(c, c.n);
    const auto res = train(data.classifiers, data.sample, c.seed, TrainOptions{c.clamp_width});
    const double wall = seconds_since(start);
    Report report;
    report.rows = classical_rows(res, c.n, c.t, c.epsilon, c.seed);
    report.json["mode"] = "classical";
    report.json["seed"] = c.seed;
    report.json["N"] = c.n;
    report.json["T"] = c.t;
    report.json["base_errors"] = data.base_errors;
    report.json["classical"] = classical_json(res, wall);
    report.json["wall_time_s"] = wall;
    report.summary = summary_row(c, "classical", res.trace.query_count(), "");
    return report;
}

Report run_quantum(const ExperimentConfig& c) {
    const auto start = clock_type::now();
    const auto data = dataset_for(c, c.n);
    Report report;
    report.json["mode"] = "quantum";
    report.json["seed"] = c.seed;
    report.json["N"] = c.n;
    report.json["T"] = c.t;
    report.json["epsilon"] = c.epsilon;
    report.json["base_errors"] = data.base_errors;
    std::uint64_t total = 0;
    try {
        const auto res = quantum_train(data.classifiers, data.sample, c.epsilon, c.seed,
                                       quantum_options(c));
        report.rows = quantum_rows(res, c.n, c.t, c.epsilon, c.seed);
        report.json["quantum"] = quantum_json(res);
        total = res.report.total_queries;
    } catch (const CapExceededError& e) {
        report.errors.push_back(error_row("quantum", c.n, c.t, c.epsilon, c.seed, e.what()));
        report.partial = true;
        report.json["error"] = e.what();
    }
    report.json["partial"] = report.partial;
    report.json["wall_time_s"] = seconds_since(start);
    report.summary = summary_row(c, "quantum", total, report.partial ? "partial" : "");
    return report;
}

Report run_compare(const ExperimentConfig& c) {
    const auto start = clock_type::now();
    const std::vector<double> eps_list =
        c.sweep_epsilon.empty() ? std::vector<double>{c.epsilon} : c.sweep_epsilon;
    std::vector<std::pair<std::size_t, double>> grid;
    if (c.auto_sample_size) {
        for (double eps : eps_list) grid.emplace_back(auto_sample_size(c, eps), eps);
    } else {
        const std::vector<std::size_t> n_list =
            c.sweep_n.empty() ? std::vector<std::size_t>{c.n} : c.sweep_n;
        for (auto n : n_list) {
            for (double eps : eps_list) grid.emplace_back(n, eps);
        }
    }

    std::vector<CellResult> cells(grid.size());
    parallel_for(grid.size(), c.workers, [&](std::size_t i) {
        const auto [n, eps] = grid[i];
        const auto data = dataset_for(c, n);
        cells[i] = compare_cell(data.sample, data.classifiers, eps, c);
    });
    return assemble_compare(c, std::move(cells), "compare", seconds_since(start));
}

Report run_hoeffding(const ExperimentConfig& c) {
    const auto start = clock_type::now();
    const std::vector<std::size_t> n_list =
        c.grid_n.empty() ? std::vector<std::size_t>{c.n} : c.grid_n;
    const std::vector<double> eps_list =
        c.grid_epsilon.empty() ? std::vector<double>{c.epsilon} : c.grid_epsilon;

    Report report;
    json cells = json::array();
    std::uint64_t total = 0;
    std::size_t failing = 0;
    std::uint64_t cell_index = 0;
    for (auto n : n_list) {
        const auto data = dataset_for(c, n);
        for (double eps : eps_list) {
            HoeffdingTrialSpec spec{data.classifiers, data.sample};
            spec.t = c.hoeffding_t;
            spec.epsilon = eps;
            spec.trials = c.trials;
            spec.seed = derive_seed(c.seed, cell_index++);
            spec.clamp_width = c.clamp_width;
            spec.workers = c.workers;
            const auto res = run_hoeffding_trials(spec);
            const double slack = 3.0 * std::sqrt(res.bound / static_cast<double>(res.trials));
            const bool ok = res.violation_rate <= res.bound + slack;
            failing += !ok;

            auto r = base_row("hoeffding", n, c.t, eps, c.seed);
            r.iteration = c.hoeffding_t;
            r.c_hat = res.c_hat;
            r.queries = res.query_count;
            r.violation_rate = res.violation_rate;
            r.hoeffding_bound = res.bound;
            r.note = "trials=" + std::to_string(res.trials) + (ok ? ";within-bound" : ";exceeds-bound");
            report.rows.push_back(std::move(r));
            total += res.query_count;

            cells.push_back({{"N", n},
                             {"epsilon", eps},
                             {"trials", res.trials},
                             {"violations", res.violations},
                             {"violation_rate", res.violation_rate},
                             {"bound", res.bound},
                             {"slack", slack},
                             {"c_hat", res.c_hat},
                             {"within_bound", ok}});
        }
    }
    report.json["mode"] = "hoeffding";
    report.json["seed"] = c.seed;
    report.json["t"] = c.hoeffding_t;
    report.json["cells"] = std::move(cells);
    report.json["cells_exceeding_bound"] = failing;
    report.json["wall_time_s"] = seconds_since(start);
    report.summary = summary_row(c, "hoeffding", total,
                                 "cells_exceeding_bound=" + std::to_string(failing));
    return report;
}

Report run_povm_demo(const ExperimentConfig& c) {
    const auto start = clock_type::now();
    const std::uint64_t dseed = dataset_seed(c.seed);
    std::vector<LabeledPoint> points;
    for (std::size_t i = 0; i < c.n; ++i) {
        const auto rho = random_pure_state(2, hash_key(dseed, kPovmStateStream, i));
        points.push_back({encode_state(rho), z_sign_labeler(rho)});
    }
    LabeledSample sample(std::move(points));
    if (!sample.has_both_labels()) {
        throw GenerationError("povm-demo: sample has a single label; change seed or N");
    }

    // Measurement axes: z tilted by a seeded Gaussian of scale povm_axis_spread.
    std::vector<WeakClassifier> classifiers;
    json axes = json::array();
    for (std::size_t k = 0; k < c.t; ++k) {
        auto g = [&](std::uint64_t j) {
            const double u1 = 1.0 - uniform01(dseed, kPovmAxisStream, 4 * k + 2 * j);
            const double u2 = uniform01(dseed, kPovmAxisStream, 4 * k + 2 * j + 1);
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        };
        const Eigen::Vector3d axis(c.povm_axis_spread * g(0), c.povm_axis_spread * g(1), 1.0);
        axes.push_back({axis.x(), axis.y(), axis.z()});
        classifiers.push_back(povm_classifier(TwoOutcomePOVM::qubit_axis(axis, c.povm_sharpness),
                                              z_sign_labeler, "povm" + std::to_string(k + 1)));
    }
    std::vector<CellResult> cells{compare_cell(sample, classifiers, c.epsilon, c)};
    auto report = assemble_compare(c, std::move(cells), "povm-demo", seconds_since(start));
    report.json["axes"] = std::move(axes);
    report.json["sharpness"] = c.povm_sharpness;
    return report;
}

Report run_experiment(const ExperimentConfig& c) {
    switch (c.mode) {
        case Mode::classical: return run_classical(c);
        case Mode::quantum: return run_quantum(c);
        case Mode::compare: return run_compare(c);
        case Mode::hoeffding: return run_hoeffding(c);
        case Mode::povm_demo: return run_povm_demo(c);
    }
    throw PreconditionError("run_experiment: unknown mode");
}

}  // namespace qboost::harness
