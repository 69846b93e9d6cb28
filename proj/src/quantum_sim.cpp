#include "qboost/quantum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "qboost/errors.hpp"

namespace qboost {

namespace {

constexpr double kAncillaZeroTolerance = 1e-12;
constexpr double kWeightSlack = 1e-12;

bool checked_mul(std::size_t a, std::size_t b, std::size_t& out) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return false;
    out = a * b;
    return true;
}

}  // namespace

void check_memory(const RegisterLayout& layout, std::size_t memory_cap) {
    if (layout.n_data == 0) throw PreconditionError("RegisterLayout: empty data register");
    if (layout.branch_bits < 0 || layout.phase_bits < 0) {
        throw PreconditionError("RegisterLayout: negative register width");
    }
    const int shift = layout.branch_bits + 1 + layout.phase_bits;
    std::size_t dim = 0;
    const bool fits = shift < 63 && checked_mul(layout.n_data, std::size_t{1} << shift, dim);
    if (!fits || dim > memory_cap) {
        throw CapExceededError("state dimension N * 2^t * 2 * 2^m = " +
                               (fits ? std::to_string(dim) : std::string("overflow")) +
                               " exceeds the memory cap of " + std::to_string(memory_cap) +
                               " amplitudes");
    }
}

QuantumState::QuantumState(RegisterLayout layout, std::size_t memory_cap) : layout_(layout) {
    check_memory(layout_, memory_cap);
    amplitudes_.assign(layout_.dimension(), Amplitude{0.0, 0.0});
}

std::span<Amplitude> QuantumState::block(std::size_t phase) {
    return std::span<Amplitude>(amplitudes_).subspan(phase * layout_.system_dimension(),
                                                     layout_.system_dimension());
}

std::span<const Amplitude> QuantumState::block(std::size_t phase) const {
    return std::span<const Amplitude>(amplitudes_)
        .subspan(phase * layout_.system_dimension(), layout_.system_dimension());
}

double QuantumState::norm() const { return qboost::norm(amplitudes_); }

Amplitude inner_product(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    Amplitude sum{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
    return sum;
}

double norm(std::span<const Amplitude> v) {
    double sum = 0.0;
    for (const auto& a : v) sum += std::norm(a);
    return std::sqrt(sum);
}

QuantumState prepare_initial(const LabeledSample& sample, const RegisterLayout& layout,
                             std::size_t memory_cap) {
    if (layout.n_data != sample.size()) {
        throw PreconditionError("prepare_initial: layout data register does not match sample size");
    }
    QuantumState state(layout, memory_cap);
    const double amp = 1.0 / std::sqrt(static_cast<double>(sample.size()));
    for (std::size_t x = 0; x < sample.size(); ++x) state.at(x, 0, 0) = amp;
    return state;
}

QuantumQueryOracle::QuantumQueryOracle(int target_bit, std::span<const double> error_probs)
    : target_bit_(target_bit), cos_(error_probs.size()), sin_(error_probs.size()) {
    if (target_bit < 1) throw PreconditionError("QuantumQueryOracle: target bit is 1-based");
    for (std::size_t x = 0; x < error_probs.size(); ++x) {
        const double q = error_probs[x];
        if (!(q >= 0.0 && q <= 1.0)) {
            throw InvariantViolation("QuantumQueryOracle: probability outside [0, 1]");
        }
        cos_[x] = std::sqrt(1.0 - q);
        sin_[x] = std::sqrt(q);
    }
}

void QuantumQueryOracle::apply(std::span<Amplitude> block, const RegisterLayout& layout,
                               bool inverse) const {
    if (target_bit_ > layout.branch_bits || layout.n_data != cos_.size()) {
        throw PreconditionError("QuantumQueryOracle: layout does not fit this oracle");
    }
    const std::uint64_t mask = std::uint64_t{1} << (target_bit_ - 1);
    const double sign = inverse ? -1.0 : 1.0;
    for (std::size_t x = 0; x < layout.n_data; ++x) {
        const double c = cos_[x];
        const double s = sign * sin_[x];
        for (std::uint64_t b = 0; b < layout.branch_count(); ++b) {
            if (b & mask) continue;
            for (int anc = 0; anc < 2; ++anc) {
                Amplitude& a0 = block[layout.system_index(x, b, anc)];
                Amplitude& a1 = block[layout.system_index(x, b | mask, anc)];
                const Amplitude v0 = a0;
                const Amplitude v1 = a1;
                a0 = c * v0 - s * v1;
                a1 = s * v0 + c * v1;
            }
        }
    }
}

std::vector<QuantumQueryOracle> make_query_oracles(std::span<const WeakClassifier> classifiers,
                                                   const LabeledSample& sample) {
    const auto q = error_table(classifiers, sample);
    std::vector<QuantumQueryOracle> oracles;
    oracles.reserve(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        oracles.emplace_back(static_cast<int>(i) + 1, q[i]);
    }
    return oracles;
}

void apply_query_oracles(QuantumState& state, std::span<const QuantumQueryOracle> oracles,
                         QueryCounter& counter) {
    const auto& layout = state.layout();
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i / 2) % layout.branch_count() != 0 && amps[i] != Amplitude{0.0, 0.0}) {
            throw PreconditionError("apply_query_oracles: branch register is not |0...0>");
        }
    }
    for (std::size_t p = 0; p < layout.phase_count(); ++p) {
        for (const auto& oracle : oracles) oracle.apply(state.block(p), layout, false);
    }
    counter.add(oracles.size());
}

WeightFunctionTable::WeightFunctionTable(const std::vector<std::vector<double>>& error_probs,
                                         std::span<const double> prior_r_hats)
    : t_(static_cast<int>(error_probs.size())),
      n_(error_probs.empty() ? 0 : error_probs.front().size()) {
    if (t_ < 1) throw PreconditionError("WeightFunctionTable: need at least one classifier");
    if (t_ > BranchString::kMaxLength || prior_r_hats.size() + 1 < static_cast<std::size_t>(t_)) {
        throw PreconditionError("WeightFunctionTable: need t - 1 prior estimates");
    }
    for (int i = 0; i + 1 < t_; ++i) {
        if (!(prior_r_hats[i] > 0.0 && prior_r_hats[i] < 1.0)) {
            throw PreconditionError("WeightFunctionTable: prior estimates must be clamped into (0, 1)");
        }
        analytic_bound_ *= max_update_factor(prior_r_hats[i]);
    }
    const std::size_t branches = std::size_t{1} << t_;
    weights_.resize(n_ * branches);
    supported_.resize(n_ * branches);
    std::vector<double> probs(t_);
    for (std::size_t x = 0; x < n_; ++x) {
        for (int i = 0; i < t_; ++i) probs[i] = error_probs[i][x];
        for_each_branch(probs, [&](const BranchString& s, double prob) {
            const std::size_t idx = (x << t_) + s.bits();
            weights_[idx] = branch_weight(s, prior_r_hats, t_ - 1);
            supported_[idx] = prob > 0.0 ? 1 : 0;
            if (prob > 0.0) c_hat_ = std::max(c_hat_, weights_[idx]);
        });
    }
}

namespace {

// Ancilla rotation on (x, s) with last bit 1; identity on unsupported entries.
void rotate_ancilla(std::span<Amplitude> block, const RegisterLayout& layout,
                    const WeightFunctionTable& table, double c_hat, bool inverse) {
    const int t = layout.branch_bits;
    const std::uint64_t last = std::uint64_t{1} << (t - 1);
    for (std::size_t x = 0; x < layout.n_data; ++x) {
        for (std::uint64_t s = 0; s < layout.branch_count(); ++s) {
            if (!(s & last) || !table.supported(x, s)) continue;
            const double ratio = std::min(1.0, table.weight(x, s) / c_hat);
            const double c = std::sqrt(1.0 - ratio);
            const double sn = inverse ? -std::sqrt(ratio) : std::sqrt(ratio);
            Amplitude& a0 = block[layout.system_index(x, s, 0)];
            Amplitude& a1 = block[layout.system_index(x, s, 1)];
            const Amplitude v0 = a0;
            const Amplitude v1 = a1;
            a0 = c * v0 - sn * v1;
            a1 = sn * v0 + c * v1;
        }
    }
}

void check_table_against(const WeightFunctionTable& table, const RegisterLayout& layout,
                         double c_hat) {
    if (table.t() != layout.branch_bits || table.n_data() != layout.n_data) {
        throw PreconditionError("weight table does not match the register layout");
    }
    if (!(c_hat > 0.0)) throw PreconditionError("c_hat must be positive");
    for (std::size_t x = 0; x < table.n_data(); ++x) {
        for (std::uint64_t s = 0; s < layout.branch_count(); ++s) {
            if (table.supported(x, s) && table.weight(x, s) > c_hat * (1.0 + kWeightSlack)) {
                throw InvariantViolation("Q_t: weight " + std::to_string(table.weight(x, s)) +
                                         " exceeds c_hat " + std::to_string(c_hat));
            }
        }
    }
}

}  // namespace

void apply_rotation_qt(QuantumState& state, const WeightFunctionTable& weights, double c_hat) {
    const auto& layout = state.layout();
    check_table_against(weights, layout, c_hat);
    const auto amps = state.amplitudes();
    for (std::size_t i = 1; i < amps.size(); i += 2) {
        if (std::abs(amps[i]) > kAncillaZeroTolerance) {
            throw PreconditionError("apply_rotation_qt: ancilla is not |0> on the state's support");
        }
    }
    for (std::size_t p = 0; p < layout.phase_count(); ++p) {
        rotate_ancilla(state.block(p), layout, weights, c_hat, false);
    }
}

double ancilla_one_probability(std::span<const Amplitude> block) {
    double p = 0.0;
    for (std::size_t i = 1; i < block.size(); i += 2) p += std::norm(block[i]);
    return p;
}

double ancilla_one_probability(const QuantumState& state) {
    return ancilla_one_probability(state.amplitudes());
}

void reflect_about_init(QuantumState& state, const QuantumState& init) {
    if (state.amplitudes().size() != init.amplitudes().size()) {
        throw PreconditionError("reflect_about_init: dimension mismatch");
    }
    const Amplitude overlap = inner_product(init.amplitudes(), state.amplitudes());
    auto out = state.amplitudes();
    const auto in = init.amplitudes();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2.0 * overlap * in[i] - out[i];
}

GroverOperator::GroverOperator(std::vector<QuantumQueryOracle> oracles, WeightFunctionTable table,
                               double c_hat, QuantumState init)
    : oracles_(std::move(oracles)), table_(std::move(table)), c_hat_(c_hat), init_(std::move(init)) {
    const auto& layout = init_.layout();
    if (layout.phase_bits != 0) {
        throw PreconditionError("GroverOperator: init must be a system-only state");
    }
    if (static_cast<int>(oracles_.size()) != layout.branch_bits) {
        throw PreconditionError("GroverOperator: need one oracle per branch bit");
    }
    check_table_against(table_, layout, c_hat_);
}

void GroverOperator::apply_rotation(std::span<Amplitude> block, bool inverse) const {
    rotate_ancilla(block, layout(), table_, c_hat_, inverse);
}

void GroverOperator::apply_g(std::span<Amplitude> block, QueryCounter* counter) const {
    for (const auto& oracle : oracles_) oracle.apply(block, layout(), false);
    apply_rotation(block, false);
    if (counter) counter->add(oracles_.size());
}

void GroverOperator::apply_g_dagger(std::span<Amplitude> block, QueryCounter* counter) const {
    apply_rotation(block, true);
    for (auto it = oracles_.rbegin(); it != oracles_.rend(); ++it) it->apply(block, layout(), true);
    if (counter) counter->add(oracles_.size());
}

void GroverOperator::apply_phase_flip(std::span<Amplitude> block) const {
    for (std::size_t i = 1; i < block.size(); i += 2) block[i] = -block[i];
}

void GroverOperator::apply_reflection(std::span<Amplitude> block) const {
    const auto in = init_.amplitudes();
    const Amplitude overlap = inner_product(in, block);
    for (std::size_t i = 0; i < block.size(); ++i) block[i] = 2.0 * overlap * in[i] - block[i];
}

void GroverOperator::apply_iterate(std::span<Amplitude> block, QueryCounter* counter) const {
    apply_phase_flip(block);
    apply_g_dagger(block, counter);
    apply_reflection(block);
    apply_g(block, counter);
    for (auto& a : block) a = -a;
}

QuantumState GroverOperator::prepare(QueryCounter* counter) const {
    QuantumState state = init_;
    apply_g(state.block(0), counter);
    return state;
}

void grover_iterate(QuantumState& state, const GroverOperator& op, QueryCounter& counter) {
    const auto& layout = state.layout();
    if (layout.system_dimension() != op.layout().system_dimension()) {
        throw PreconditionError("grover_iterate: layout mismatch");
    }
    for (std::size_t p = 0; p < layout.phase_count(); ++p) op.apply_iterate(state.block(p), &counter);
}

}  // namespace qboost
