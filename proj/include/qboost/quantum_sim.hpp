#pragma once

// Statevector simulation of quantum AdaBoost.
//
// Register order (most significant first): phase | data x | branch s | ancilla.
// The data register is a bare index over the N sample points (no padding to a
// power of two). Branch bit s_i is bit i-1 of the branch index, so the "last
// bit" tested by the rotation Q_t is bit t-1.
//
// The weight register M is not stored as amplitudes: W^x_s is an exact
// function of (x, s) held in a WeightFunctionTable and looked up wherever an
// operator is conditioned on it. Reversible arithmetic computes the same map
// with ancillas that start and end in |0>, so the simulated state is the
// state restricted to those ancillas.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qboost/core.hpp"

namespace qboost {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kDefaultMemoryCap = std::size_t{1} << 26;

struct RegisterLayout {
    std::size_t n_data = 1;
    int branch_bits = 0;
    int phase_bits = 0;

    std::size_t branch_count() const { return std::size_t{1} << branch_bits; }
    std::size_t phase_count() const { return std::size_t{1} << phase_bits; }
    /// Dimension of data x branch x ancilla.
    std::size_t system_dimension() const { return n_data * branch_count() * 2; }
    /// Full dimension including the phase register.
    std::size_t dimension() const { return system_dimension() * phase_count(); }

    std::size_t system_index(std::size_t x, std::uint64_t s, int ancilla) const {
        return ((x << branch_bits) + s) * 2 + static_cast<std::size_t>(ancilla);
    }
    std::size_t index(std::size_t x, std::uint64_t s, int ancilla, std::size_t phase = 0) const {
        return phase * system_dimension() + system_index(x, s, ancilla);
    }
};

/// Throws CapExceededError unless the full layout fits in `memory_cap` amplitudes.
void check_memory(const RegisterLayout& layout, std::size_t memory_cap);

class QuantumState {
  public:
    explicit QuantumState(RegisterLayout layout, std::size_t memory_cap = kDefaultMemoryCap);

    const RegisterLayout& layout() const { return layout_; }
    std::span<Amplitude> amplitudes() { return amplitudes_; }
    std::span<const Amplitude> amplitudes() const { return amplitudes_; }

    Amplitude& at(std::size_t x, std::uint64_t s, int ancilla, std::size_t phase = 0) {
        return amplitudes_[layout_.index(x, s, ancilla, phase)];
    }
    Amplitude at(std::size_t x, std::uint64_t s, int ancilla, std::size_t phase = 0) const {
        return amplitudes_[layout_.index(x, s, ancilla, phase)];
    }

    /// Amplitudes with the phase register equal to `phase`.
    std::span<Amplitude> block(std::size_t phase);
    std::span<const Amplitude> block(std::size_t phase) const;

    double norm() const;

  private:
    RegisterLayout layout_;
    std::vector<Amplitude> amplitudes_;
};

Amplitude inner_product(std::span<const Amplitude> a, std::span<const Amplitude> b);
double norm(std::span<const Amplitude> v);

/// Counts applications of query oracles H_i and their inverses (one each).
class QueryCounter {
  public:
    void add(std::uint64_t n) { count_ += n; }
    std::uint64_t count() const { return count_; }

  private:
    std::uint64_t count_ = 0;
};

/// (1/sqrt N) sum_x |x>|0>|0> with the phase register in |0>.
QuantumState prepare_initial(const LabeledSample& sample, const RegisterLayout& layout,
                             std::size_t memory_cap = kDefaultMemoryCap);

/// H_i: |x>|0> -> |x>(sqrt q_i(0|x)|0> + sqrt q_i(1|x)|1>) on branch bit i,
/// completed to a real rotation on the two-dimensional target.
class QuantumQueryOracle {
  public:
    QuantumQueryOracle(int target_bit, std::span<const double> error_probs);

    int target_bit() const { return target_bit_; }
    std::size_t n_data() const { return cos_.size(); }
    /// sqrt q(bit | x).
    double amplitude(std::size_t x, int bit) const { return bit ? sin_[x] : cos_[x]; }

    void apply(std::span<Amplitude> block, const RegisterLayout& layout, bool inverse) const;

  private:
    int target_bit_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Oracles H_1..H_t for classifiers[0..t) evaluated on the sample.
std::vector<QuantumQueryOracle> make_query_oracles(std::span<const WeakClassifier> classifiers,
                                                   const LabeledSample& sample);

/// Applies H_1 x ... x H_t to a state whose branch register is |0...0> on its
/// support. Adds one query per oracle.
void apply_query_oracles(QuantumState& state, std::span<const QuantumQueryOracle> oracles,
                         QueryCounter& counter);

/// Exact table (x, s_t) -> W^x_{s_t} built from the clamped estimates of the
/// previous t-1 iterations. W depends only on s_1..s_{t-1}; W = 1 at t = 1.
class WeightFunctionTable {
  public:
    /// `error_probs[i][x]` = q_{i+1}(1 | x) for i < t; `prior_r_hats` has t-1 entries.
    WeightFunctionTable(const std::vector<std::vector<double>>& error_probs,
                        std::span<const double> prior_r_hats);

    int t() const { return t_; }
    std::size_t n_data() const { return n_; }
    double weight(std::size_t x, std::uint64_t s) const { return weights_[(x << t_) + s]; }
    /// q(s | x) > 0.
    bool supported(std::size_t x, std::uint64_t s) const { return supported_[(x << t_) + s] != 0; }

    /// Exact maximum over supported entries.
    double c_hat() const { return c_hat_; }
    /// prod_{i<t} max(1/(2R_i), 1/(2(1-R_i))).
    double analytic_bound() const { return analytic_bound_; }

  private:
    int t_;
    std::size_t n_;
    std::vector<double> weights_;
    std::vector<std::uint8_t> supported_;
    double c_hat_ = 0.0;
    double analytic_bound_ = 1.0;
};

/// Q_t: where the last branch bit is 1, rotate the ancilla |0> into
/// sqrt(1 - W/c)|0> + sqrt(W/c)|1>; elsewhere leave the state unchanged.
/// Requires the ancilla in |0> on the state's support and W <= c_hat on
/// every supported entry.
void apply_rotation_qt(QuantumState& state, const WeightFunctionTable& weights, double c_hat);

/// Probability of measuring the ancilla in |1>.
double ancilla_one_probability(const QuantumState& state);
double ancilla_one_probability(std::span<const Amplitude> block);

/// (2|init><init| - I)|state>.
void reflect_about_init(QuantumState& state, const QuantumState& init);

/// G_t = Q_t A_t together with the reflection and phase flip that make up the
/// Grover iterate W_G = -(G_t U_perp G_t^dagger Z).
///
/// The overall -1 makes W_G act on span{psi_0, psi_1} as a rotation with
/// eigenvalues exp(+-2i theta), cos^2 theta = R/c; without it the eigenvalues
/// are -exp(-+2i theta) and the phase read out would be pi - 2 theta.
class GroverOperator {
  public:
    GroverOperator(std::vector<QuantumQueryOracle> oracles, WeightFunctionTable table, double c_hat,
                   QuantumState init);

    const RegisterLayout& layout() const { return init_.layout(); }
    int t() const { return table_.t(); }
    double c_hat() const { return c_hat_; }
    const WeightFunctionTable& table() const { return table_; }
    const QuantumState& init() const { return init_; }

    // Each method acts on one system block (data x branch x ancilla).
    void apply_g(std::span<Amplitude> block, QueryCounter* counter) const;
    void apply_g_dagger(std::span<Amplitude> block, QueryCounter* counter) const;
    void apply_rotation(std::span<Amplitude> block, bool inverse) const;
    void apply_phase_flip(std::span<Amplitude> block) const;
    void apply_reflection(std::span<Amplitude> block) const;
    void apply_iterate(std::span<Amplitude> block, QueryCounter* counter) const;

    /// G_t |init>.
    QuantumState prepare(QueryCounter* counter) const;

  private:
    std::vector<QuantumQueryOracle> oracles_;
    WeightFunctionTable table_;
    double c_hat_;
    QuantumState init_;
};

/// One application of W_G to every phase block of `state`; 2t queries per block.
void grover_iterate(QuantumState& state, const GroverOperator& op, QueryCounter& counter);

// ---------------------------------------------------------------------------
// Phase estimation

enum class QpeBackend {
    /// Streams W_G^d |psi> for d < 2^m and builds the phase-register marginal
    /// from the autocorrelations <psi|W_G^d|psi>.
    autocorrelation,
    /// Explicit phase register: Hadamards, controlled W_G^(2^j), inverse QFT.
    full_register,
};

enum class ThetaMode { maximum_likelihood, sampled };

struct PhaseEstimationOptions {
    QpeBackend backend = QpeBackend::autocorrelation;
    ThetaMode mode = ThetaMode::maximum_likelihood;
    std::uint64_t seed = 0;      ///< sampled mode only
    std::uint64_t draw_key = 0;  ///< sampled mode only
    std::size_t memory_cap = kDefaultMemoryCap;
};

struct PhaseEstimate {
    double theta_hat = 0.0;
    std::size_t outcome = 0;         ///< m-bit register value chosen (raw)
    std::vector<double> distribution;  ///< P(k), k < 2^m
    int phase_bits = 0;
    std::uint64_t iterate_applications = 0;
};

/// Folds outcome k and 2^m - k together: entry f is P(f) + P(2^m - f) for
/// 0 < f < 2^(m-1), with P(0) and P(2^(m-1)) unpaired.
std::vector<double> fold_distribution(std::span<const double> distribution);

/// theta_hat = pi * min(k, 2^m - k) / 2^m, in [0, pi/2].
double theta_from_outcome(std::size_t k, int phase_bits);

PhaseEstimate phase_estimate_theta(const GroverOperator& op, const QuantumState& prepared,
                                   int phase_bits, QueryCounter& counter,
                                   const PhaseEstimationOptions& options = {});

/// max(0, ceil(log2(c_hat / epsilon))) + guard_bits, at least 1.
int phase_bits_for(double c_hat, double epsilon, int guard_bits);

/// Queries spent at iteration t with m phase bits: t (2 (2^m - 1) + 1).
std::uint64_t quantum_iteration_queries(int t, int phase_bits);

// ---------------------------------------------------------------------------
// Training loop

struct QuantumTrainOptions {
    int guard_bits = 2;
    std::optional<int> phase_bits;  ///< overrides the epsilon-derived count
    double clamp_width = kDefaultClampWidth;
    std::size_t memory_cap = kDefaultMemoryCap;
    QpeBackend backend = QpeBackend::autocorrelation;
    ThetaMode mode = ThetaMode::maximum_likelihood;
};

struct QuantumIterationRecord {
    int t = 0;
    int phase_bits = 0;
    std::size_t outcome = 0;
    double theta_hat = 0.0;
    double r_hat_raw = 0.0;  ///< c_hat * cos^2(theta_hat)
    double r_hat = 0.0;      ///< clamped
    double alpha = 0.0;
    double c_hat = 1.0;        ///< exact table maximum used by Q_t
    double c_hat_bound = 1.0;  ///< analytic product bound
    double c_hat_running = 1.0;
    double r_hat_exact = 0.0;  ///< c_hat * P(ancilla = 1) after G_t
    std::uint64_t queries = 0;
    std::uint64_t cumulative_queries = 0;
    bool clamped = false;
    double wall_time_s = 0.0;
};

struct EstimationReport {
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::vector<QuantumIterationRecord> iterations;
    std::uint64_t total_queries = 0;
    double wall_time_s = 0.0;
};

struct QuantumTrainResult {
    BoostModel model;
    EstimationReport report;
};

/// Quantum AdaBoost: iteration t re-prepares and re-queries classifiers 1..t,
/// rebuilds the weight table from the previous clamped estimates, and reads
/// R_hat_t = c_hat_t cos^2(theta_hat_t) from phase estimation of W_G.
QuantumTrainResult quantum_train(std::span<const WeakClassifier> classifiers,
                                 const LabeledSample& sample, double epsilon, std::uint64_t seed,
                                 const QuantumTrainOptions& options = {});

}  // namespace qboost
