#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "qboost/counter_rng.hpp"
#include "qboost/errors.hpp"
#include "qboost/quantum_sim.hpp"

namespace qboost {

namespace {

constexpr std::uint64_t kPhaseDrawStream = 0x9a5eULL;

std::vector<double> autocorrelation_distribution(const GroverOperator& op,
                                                 std::span<const Amplitude> psi, std::size_t m_count,
                                                 QueryCounter& counter) {
    // P(k) = (1/M^2) [M + 2 sum_{d=1}^{M-1} (M - d) Re(c(d) e^{-2 pi i d k / M})],
    // c(d) = <psi|W^d|psi>.
    std::vector<Amplitude> corr(m_count);
    std::vector<Amplitude> v(psi.begin(), psi.end());
    corr[0] = inner_product(psi, v);
    for (std::size_t d = 1; d < m_count; ++d) {
        op.apply_iterate(v, &counter);
        corr[d] = inner_product(psi, v);
    }
    const double mm = static_cast<double>(m_count);
    std::vector<double> dist(m_count);
    for (std::size_t k = 0; k < m_count; ++k) {
        double acc = mm * corr[0].real();
        for (std::size_t d = 1; d < m_count; ++d) {
            const double angle =
                -2.0 * std::numbers::pi * static_cast<double>((d * k) % m_count) / mm;
            const Amplitude phase{std::cos(angle), std::sin(angle)};
            acc += 2.0 * (mm - static_cast<double>(d)) * (corr[d] * phase).real();
        }
        dist[k] = std::max(0.0, acc / (mm * mm));
    }
    return dist;
}

std::vector<double> full_register_distribution(const GroverOperator& op,
                                               const QuantumState& prepared, int phase_bits,
                                               std::size_t memory_cap, QueryCounter& counter) {
    RegisterLayout layout = op.layout();
    layout.phase_bits = phase_bits;
    QuantumState state(layout, memory_cap);
    const std::size_t m_count = layout.phase_count();

    // Hadamard on every phase qubit applied to |0>_phase |psi>.
    const double h = 1.0 / std::sqrt(static_cast<double>(m_count));
    for (std::size_t p = 0; p < m_count; ++p) {
        auto dst = state.block(p);
        const auto src = prepared.block(0);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = h * src[i];
    }

    // Controlled W^(2^j) on phase qubit j. Queries are counted once per circuit
    // application, not once per simulated block.
    const std::uint64_t per_iterate = 2 * static_cast<std::uint64_t>(op.t());
    for (int j = 0; j < phase_bits; ++j) {
        const std::size_t power = std::size_t{1} << j;
        for (std::size_t p = 0; p < m_count; ++p) {
            if (!(p & power)) continue;
            for (std::size_t r = 0; r < power; ++r) op.apply_iterate(state.block(p), nullptr);
        }
        counter.add(per_iterate * power);
    }

    // Inverse QFT on the phase register: |j> -> (1/sqrt M) sum_k e^{-2 pi i jk/M} |k>.
    const std::size_t sys = layout.system_dimension();
    std::vector<Amplitude> column(m_count);
    std::vector<Amplitude> twiddle(m_count);
    for (std::size_t r = 0; r < m_count; ++r) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) /
                             static_cast<double>(m_count);
        twiddle[r] = Amplitude{std::cos(angle), std::sin(angle)};
    }
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < sys; ++i) {
        for (std::size_t k = 0; k < m_count; ++k) {
            Amplitude acc{0.0, 0.0};
            for (std::size_t jj = 0; jj < m_count; ++jj) {
                acc += twiddle[(jj * k) % m_count] * amps[jj * sys + i];
            }
            column[k] = h * acc;
        }
        for (std::size_t k = 0; k < m_count; ++k) amps[k * sys + i] = column[k];
    }

    std::vector<double> dist(m_count);
    for (std::size_t k = 0; k < m_count; ++k) {
        const auto b = state.block(k);
        double p = 0.0;
        for (const auto& a : b) p += std::norm(a);
        dist[k] = p;
    }
    return dist;
}

}  // namespace

std::vector<double> fold_distribution(std::span<const double> distribution) {
    const std::size_t m_count = distribution.size();
    if (m_count == 1) return {distribution[0]};
    std::vector<double> folded(m_count / 2 + 1, 0.0);
    for (std::size_t k = 0; k < m_count; ++k) folded[std::min(k, m_count - k)] += distribution[k];
    return folded;
}

double theta_from_outcome(std::size_t k, int phase_bits) {
    const std::size_t m_count = std::size_t{1} << phase_bits;
    const std::size_t folded = std::min(k % m_count, m_count - k % m_count);
    return std::numbers::pi * static_cast<double>(folded) / static_cast<double>(m_count);
}

PhaseEstimate phase_estimate_theta(const GroverOperator& op, const QuantumState& prepared,
                                   int phase_bits, QueryCounter& counter,
                                   const PhaseEstimationOptions& options) {
    if (phase_bits < 1) throw PreconditionError("phase_estimate_theta: need at least one phase bit");
    if (prepared.layout().phase_bits != 0 ||
        prepared.layout().system_dimension() != op.layout().system_dimension()) {
        throw PreconditionError("phase_estimate_theta: prepared state must be a system-only state");
    }
    RegisterLayout full = op.layout();
    full.phase_bits = phase_bits;
    check_memory(full, options.memory_cap);

    PhaseEstimate est;
    est.phase_bits = phase_bits;
    const std::size_t m_count = full.phase_count();
    est.iterate_applications = m_count - 1;

    est.distribution =
        options.backend == QpeBackend::full_register
            ? full_register_distribution(op, prepared, phase_bits, options.memory_cap, counter)
            : autocorrelation_distribution(op, prepared.block(0), m_count, counter);

    if (options.mode == ThetaMode::sampled) {
        const double u = uniform01(options.seed, kPhaseDrawStream, options.draw_key);
        double total = 0.0;
        for (double p : est.distribution) total += p;
        double acc = 0.0;
        est.outcome = m_count - 1;
        for (std::size_t k = 0; k < m_count; ++k) {
            acc += est.distribution[k] / total;
            if (u < acc) {
                est.outcome = k;
                break;
            }
        }
    } else {
        const auto folded = fold_distribution(est.distribution);
        est.outcome = static_cast<std::size_t>(
            std::distance(folded.begin(), std::ranges::max_element(folded)));
    }
    est.theta_hat = theta_from_outcome(est.outcome, phase_bits);
    return est;
}

int phase_bits_for(double c_hat, double epsilon, int guard_bits) {
    if (!(epsilon > 0.0) || !(c_hat > 0.0)) {
        throw PreconditionError("phase_bits_for: c_hat and epsilon must be positive");
    }
    const double bits = std::ceil(std::log2(c_hat / epsilon));
    return std::max(1, std::max(0, static_cast<int>(bits)) + guard_bits);
}

std::uint64_t quantum_iteration_queries(int t, int phase_bits) {
    const std::uint64_t m_count = std::uint64_t{1} << phase_bits;
    return static_cast<std::uint64_t>(t) * (2 * (m_count - 1) + 1);
}

QuantumTrainResult quantum_train(std::span<const WeakClassifier> classifiers,
                                 const LabeledSample& sample, double epsilon, std::uint64_t seed,
                                 const QuantumTrainOptions& options) {
    if (classifiers.empty()) throw PreconditionError("quantum_train: no classifiers");
    if (!(epsilon > 0.0)) throw PreconditionError("quantum_train: epsilon must be positive");
    using clock = std::chrono::steady_clock;
    const auto run_start = clock::now();

    QuantumTrainResult result;
    result.report.seed = seed;
    result.report.epsilon = epsilon;
    const auto all_q = error_table(classifiers, sample);
    std::vector<double> r_hats;
    double running = 1.0;

    for (std::size_t k = 0; k < classifiers.size(); ++k) {
        const auto iter_start = clock::now();
        const int t = static_cast<int>(k) + 1;
        const RegisterLayout layout{sample.size(), t, 0};
        const std::vector<std::vector<double>> q(all_q.begin(), all_q.begin() + t);
        WeightFunctionTable table(q, r_hats);
        const double c_hat = table.c_hat();
        const int m = options.phase_bits ? *options.phase_bits
                                         : phase_bits_for(c_hat, epsilon, options.guard_bits);
        RegisterLayout full = layout;
        full.phase_bits = m;
        check_memory(full, options.memory_cap);

        std::vector<QuantumQueryOracle> oracles;
        for (int i = 0; i < t; ++i) oracles.emplace_back(i + 1, q[i]);

        QueryCounter counter;
        QuantumState init = prepare_initial(sample, layout, options.memory_cap);
        QuantumState prepared = init;
        apply_query_oracles(prepared, oracles, counter);
        apply_rotation_qt(prepared, table, c_hat);
        const double p_one = ancilla_one_probability(prepared);

        QuantumIterationRecord rec;
        rec.t = t;
        rec.phase_bits = m;
        rec.c_hat = c_hat;
        rec.c_hat_bound = table.analytic_bound();
        rec.r_hat_exact = c_hat * p_one;

        const GroverOperator op(std::move(oracles), std::move(table), c_hat, std::move(init));
        PhaseEstimationOptions pe;
        pe.backend = options.backend;
        pe.mode = options.mode;
        pe.seed = seed;
        pe.draw_key = static_cast<std::uint64_t>(t);
        pe.memory_cap = options.memory_cap;
        const auto est = phase_estimate_theta(op, prepared, m, counter, pe);

        rec.outcome = est.outcome;
        rec.theta_hat = est.theta_hat;
        const double cos_theta = std::cos(est.theta_hat);
        rec.r_hat_raw = c_hat * cos_theta * cos_theta;
        rec.r_hat = clamp_error(rec.r_hat_raw, options.clamp_width);
        rec.clamped = rec.r_hat != rec.r_hat_raw;
        rec.alpha = alpha_from_error(rec.r_hat);
        running = std::max(running, c_hat);
        rec.c_hat_running = running;
        rec.queries = counter.count();
        result.report.total_queries += rec.queries;
        rec.cumulative_queries = result.report.total_queries;
        rec.wall_time_s = std::chrono::duration<double>(clock::now() - iter_start).count();

        r_hats.push_back(rec.r_hat);
        result.model.append(classifiers[k], rec.alpha, rec.r_hat, running);
        result.report.iterations.push_back(rec);
    }
    result.report.wall_time_s = std::chrono::duration<double>(clock::now() - run_start).count();
    return result;
}

}  // namespace qboost
