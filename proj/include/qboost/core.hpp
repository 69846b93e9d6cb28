#pragma once

// Domain types and closed-form boosting rules shared by the classical and
// quantum trainers.
//
// Conventions:
//   - labels are +1 / -1;
//   - a weak classifier is characterized by q_t(r = 1 | x), the probability it
//     misclassifies x; r = 1 marks an error;
//   - branch strings record the error bits s_1..s_t a point accumulates, with
//     s_1 stored in bit 0.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qboost {

inline constexpr double kDefaultClampWidth = 1e-6;
inline constexpr int kDefaultBranchCap = 20;

struct LabeledPoint {
    std::vector<double> features;
    int label = 1;
};

/// An ordered training sample. Index i is the identity of x_i for a whole run.
class LabeledSample {
  public:
    explicit LabeledSample(std::vector<LabeledPoint> points);

    std::size_t size() const { return points_.size(); }
    std::size_t dimension() const { return points_.front().features.size(); }
    const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
    std::span<const LabeledPoint> points() const { return points_; }

    bool has_both_labels() const;

  private:
    std::vector<LabeledPoint> points_;
};

/// A weak classifier seen only through its per-input error probability.
///
/// Copies share the underlying callable; the callable must be pure.
class WeakClassifier {
  public:
    using ErrorFn = std::function<double(const LabeledPoint&)>;

    WeakClassifier(std::string name, ErrorFn error_prob);

    /// q(r = 1 | x), checked to lie in [0, 1].
    double error_prob(const LabeledPoint& x) const;
    const std::string& name() const { return name_; }

    /// Wraps a label predictor: error_prob is 1 where predict(x) != label, else 0.
    static WeakClassifier deterministic(std::string name,
                                        std::function<int(const LabeledPoint&)> predict);
    /// Error probability `q` on every input.
    static WeakClassifier constant(std::string name, double q);

  private:
    std::string name_;
    std::shared_ptr<const ErrorFn> fn_;
};

/// True when q is exactly 0 or 1 (no randomness needed to realize the classifier).
inline bool is_deterministic_prob(double q) { return q == 0.0 || q == 1.0; }

class BranchString {
  public:
    static constexpr int kMaxLength = 63;

    BranchString() = default;
    BranchString(std::uint64_t bits, int length);

    int length() const { return length_; }
    std::uint64_t bits() const { return bits_; }
    /// Bit s_i for 1 <= i <= length.
    int at(int i) const;
    int last() const { return at(length_); }
    BranchString appended(int bit) const;

    friend bool operator==(const BranchString&, const BranchString&) = default;

  private:
    std::uint64_t bits_ = 0;
    int length_ = 0;
};

/// Ordered (classifier, alpha) pairs plus the telemetry that produced them.
class BoostModel {
  public:
    void append(WeakClassifier classifier, double alpha, double r_hat, double c_hat);

    std::size_t size() const { return alphas_.size(); }
    bool empty() const { return alphas_.empty(); }

    const std::vector<WeakClassifier>& classifiers() const { return classifiers_; }
    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<double>& r_hats() const { return r_hats_; }
    const std::vector<double>& c_hats() const { return c_hats_; }

  private:
    std::vector<WeakClassifier> classifiers_;
    std::vector<double> alphas_;
    std::vector<double> r_hats_;
    std::vector<double> c_hats_;
};

/// sgn(sum_t alpha_t H_t(x)) with sgn(0) = +1.
///
/// H_t(x) = y(x) when the classifier is right and -y(x) when wrong; the error
/// bit of a probabilistic classifier is drawn from the counter generator keyed
/// by (draw_seed, point_key, t). Deterministic classifiers consume no draws.
int strong_classify(const BoostModel& model, const LabeledPoint& x,
                    std::uint64_t draw_seed = 0, std::uint64_t point_key = 0);

/// sum_t alpha_t H_t(x) for an explicit vector of predicted labels.
double weighted_vote(std::span<const double> alphas, std::span<const int> votes);

/// 1/2 ln((1 - r) / r). Throws DomainError outside (0, 1); never clamps.
double alpha_from_error(double r);

/// Clamps an error estimate into [width, 1 - width].
double clamp_error(double r, double width = kDefaultClampWidth);

/// One step of the adaptive weight rule: w / (2 r) for an error bit, w / (2 (1 - r)) otherwise.
double update_weight(double w, int bit, double r_hat);

/// max(1 / (2 r), 1 / (2 (1 - r))): the largest factor one update can apply.
double max_update_factor(double r_hat);

/// Exact exponential cost over the empirical distribution p(x) = 1/N,
/// enumerating all 2^T branches per point.
double exponential_cost(const BoostModel& model, const LabeledSample& sample,
                        int branch_cap = kDefaultBranchCap);

/// Smallest N with 2 exp(-2 N eps^2 / c^2) <= failure_prob.
std::uint64_t sample_size_for(double c_hat, double epsilon, double failure_prob);

/// Hoeffding tail bound 2 exp(-2 N eps^2 / c^2).
double hoeffding_bound(std::uint64_t n, double epsilon, double c_hat);

/// Evaluates q_i(1 | x_j) for classifiers [0, t) over the sample; row i, column j.
std::vector<std::vector<double>> error_table(std::span<const WeakClassifier> classifiers,
                                             const LabeledSample& sample);

/// Visits every branch string of length t with its probability prod_i q_i(s_i | x),
/// where error_probs[i] = q_{i+1}(1 | x). Zero-probability branches are visited too.
void for_each_branch(std::span<const double> error_probs,
                     const std::function<void(const BranchString&, double)>& visit);

/// W^x_{s} after applying the update rule for bits s_1..s_k with r_hats[0..k).
double branch_weight(const BranchString& s, std::span<const double> r_hats, int k);

}  // namespace qboost
