#pragma once

// Monte Carlo probabilistic AdaBoost: each point is queried once per
// classifier, one branch is sampled per point, and the weighted error is the
// sample average of W * r.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qboost/core.hpp"

namespace qboost {

struct TrainOptions {
    double clamp_width = kDefaultClampWidth;
};

struct IterationRecord {
    int t = 0;
    double r_hat_raw = 0.0;
    double r_hat = 0.0;  ///< clamped value used for alpha and the update
    double alpha = 0.0;
    double c_hat = 1.0;        ///< running max of realized weights
    double c_hat_bound = 1.0;  ///< prod max(1/(2R), 1/(2(1-R)))
    std::uint64_t query_count = 0;  ///< cumulative, N * t
    bool clamped = false;
};

/// Append-only record of one training run.
class TrainingTrace {
  public:
    explicit TrainingTrace(std::uint64_t rng_seed = 0) : rng_seed_(rng_seed) {}

    void append(const IterationRecord& record);
    const std::vector<IterationRecord>& records() const { return records_; }
    std::uint64_t rng_seed() const { return rng_seed_; }
    std::uint64_t query_count() const {
        return records_.empty() ? 0 : records_.back().query_count;
    }

  private:
    std::uint64_t rng_seed_;
    std::vector<IterationRecord> records_;
};

/// Per-point branch string and current weight W^x_{s_t}.
class BranchTable {
  public:
    explicit BranchTable(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    const BranchString& branch(std::size_t i) const { return branches_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const { return weights_; }
    double max_weight() const;

    /// Appends this iteration's bits and applies the update rule with r_hat.
    void advance(std::span<const std::uint8_t> bits, double r_hat);

  private:
    std::vector<BranchString> branches_;
    std::vector<double> weights_;
};

/// Draws r^x_t: 1 with probability q(1 | x). Keyed by (seed, point index, iteration).
int sample_branch_bit(const WeakClassifier& classifier, const LabeledPoint& x, std::uint64_t seed,
                      std::uint64_t point_index, std::uint64_t iteration);

/// (1/N) sum_x bits[x] W^x, using the weights before this iteration's update.
double estimate_rhat(const BranchTable& table, std::span<const std::uint8_t> bits,
                     const LabeledSample& sample);

struct TrainResult {
    BoostModel model;
    TrainingTrace trace;
};

TrainResult train(std::span<const WeakClassifier> classifiers, const LabeledSample& sample,
                  std::uint64_t seed, const TrainOptions& options = {});

/// Exact weighted error of classifier t (1-based) on the empirical distribution,
/// with weights built from the clamped estimates prior_r_hats[0..t-1):
///   (1/N) sum_x sum_{s_t} q(s_t | x) W^x_{s_{t-1}} s_t.
double exact_weighted_error(std::span<const WeakClassifier> classifiers,
                            const LabeledSample& sample, std::span<const double> prior_r_hats,
                            int branch_cap = kDefaultBranchCap);

/// Largest W^x_{s_{t-1}} over branches with nonzero probability.
double exact_max_weight(std::span<const WeakClassifier> classifiers, const LabeledSample& sample,
                        std::span<const double> prior_r_hats, int branch_cap = kDefaultBranchCap);

struct HoeffdingTrialSpec {
    std::vector<WeakClassifier> classifiers;  ///< at least `t` of them
    LabeledSample sample;                     ///< fixed points; branches are resampled per trial
    int t = 1;
    double epsilon = 0.1;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    double clamp_width = kDefaultClampWidth;
    int branch_cap = kDefaultBranchCap;
    unsigned workers = 1;
};

struct HoeffdingResult {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double violation_rate = 0.0;
    double c_hat = 1.0;  ///< largest exact c_t across trials
    double bound = 0.0;  ///< 2 exp(-2 N eps^2 / c^2)
    std::uint64_t query_count = 0;
};

HoeffdingResult run_hoeffding_trials(const HoeffdingTrialSpec& spec);

/// Fraction of trials with |R_hat_t - R_tilde_t| >= epsilon.
double hoeffding_violation_rate(const HoeffdingTrialSpec& spec);

}  // namespace qboost
