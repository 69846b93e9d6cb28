#include "qboost/classical_boost.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "qboost/counter_rng.hpp"
#include "qboost/errors.hpp"

namespace qboost {

void TrainingTrace::append(const IterationRecord& record) {
    if (record.t != static_cast<int>(records_.size()) + 1) {
        throw InvariantViolation("TrainingTrace: records must be appended in iteration order");
    }
    records_.push_back(record);
}

BranchTable::BranchTable(std::size_t n) : branches_(n), weights_(n, 1.0) {}

double BranchTable::max_weight() const {
    return *std::ranges::max_element(weights_);
}

void BranchTable::advance(std::span<const std::uint8_t> bits, double r_hat) {
    if (bits.size() != weights_.size()) {
        throw PreconditionError("BranchTable::advance: bit vector does not cover the sample");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        branches_[i] = branches_[i].appended(bits[i]);
        weights_[i] = update_weight(weights_[i], bits[i], r_hat);
    }
}

int sample_branch_bit(const WeakClassifier& classifier, const LabeledPoint& x, std::uint64_t seed,
                      std::uint64_t point_index, std::uint64_t iteration) {
    return bernoulli(classifier.error_prob(x), seed, point_index, iteration);
}

double estimate_rhat(const BranchTable& table, std::span<const std::uint8_t> bits,
                     const LabeledSample& sample) {
    if (table.size() != sample.size() || bits.size() != sample.size()) {
        throw PreconditionError("estimate_rhat: table and bits must cover every point");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (bits[i]) sum += table.weight(i);
    }
    return sum / static_cast<double>(sample.size());
}

TrainResult train(std::span<const WeakClassifier> classifiers, const LabeledSample& sample,
                  std::uint64_t seed, const TrainOptions& options) {
    if (classifiers.empty()) throw PreconditionError("train: no classifiers");
    const std::size_t n = sample.size();

    TrainResult result{BoostModel{}, TrainingTrace{seed}};
    BranchTable table(n);
    std::vector<std::uint8_t> bits(n);
    double running_max = 1.0;
    double bound = 1.0;
    std::uint64_t queries = 0;

    for (std::size_t k = 0; k < classifiers.size(); ++k) {
        const int t = static_cast<int>(k) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            bits[i] = static_cast<std::uint8_t>(
                sample_branch_bit(classifiers[k], sample[i], seed, i, static_cast<std::uint64_t>(t)));
        }
        queries += n;

        IterationRecord rec;
        rec.t = t;
        rec.r_hat_raw = estimate_rhat(table, bits, sample);
        rec.r_hat = clamp_error(rec.r_hat_raw, options.clamp_width);
        rec.clamped = rec.r_hat != rec.r_hat_raw;
        rec.alpha = alpha_from_error(rec.r_hat);

        table.advance(bits, rec.r_hat);
        running_max = std::max(running_max, table.max_weight());
        bound *= max_update_factor(rec.r_hat);
        rec.c_hat = running_max;
        rec.c_hat_bound = bound;
        rec.query_count = queries;

        result.trace.append(rec);
        result.model.append(classifiers[k], rec.alpha, rec.r_hat, rec.c_hat);
    }
    return result;
}

namespace {

template <class Visit>
void visit_weighted_branches(std::span<const WeakClassifier> classifiers,
                             const LabeledSample& sample, std::span<const double> prior_r_hats,
                             int branch_cap, const char* who, Visit&& visit) {
    const int t = static_cast<int>(classifiers.size());
    if (t < 1) throw PreconditionError(std::string(who) + ": need at least one classifier");
    if (t > branch_cap) {
        throw CapExceededError(std::string(who) + ": t = " + std::to_string(t) +
                               " exceeds the branch-enumeration cap " + std::to_string(branch_cap));
    }
    if (prior_r_hats.size() < static_cast<std::size_t>(t - 1)) {
        throw PreconditionError(std::string(who) + ": need t - 1 prior estimates");
    }
    const auto q = error_table(classifiers, sample);
    std::vector<double> probs(t);
    for (std::size_t j = 0; j < sample.size(); ++j) {
        for (int i = 0; i < t; ++i) probs[i] = q[i][j];
        for_each_branch(probs, [&](const BranchString& s, double prob) {
            visit(s, prob, branch_weight(s, prior_r_hats, t - 1));
        });
    }
}

}  // namespace

double exact_weighted_error(std::span<const WeakClassifier> classifiers,
                            const LabeledSample& sample, std::span<const double> prior_r_hats,
                            int branch_cap) {
    double sum = 0.0;
    visit_weighted_branches(classifiers, sample, prior_r_hats, branch_cap, "exact_weighted_error",
                            [&](const BranchString& s, double prob, double w) {
                                if (s.last()) sum += prob * w;
                            });
    return sum / static_cast<double>(sample.size());
}

double exact_max_weight(std::span<const WeakClassifier> classifiers, const LabeledSample& sample,
                        std::span<const double> prior_r_hats, int branch_cap) {
    double best = 0.0;
    visit_weighted_branches(classifiers, sample, prior_r_hats, branch_cap, "exact_max_weight",
                            [&](const BranchString&, double prob, double w) {
                                if (prob > 0.0) best = std::max(best, w);
                            });
    return best;
}

HoeffdingResult run_hoeffding_trials(const HoeffdingTrialSpec& spec) {
    if (spec.trials < 1000) {
        throw PreconditionError("hoeffding: at least 1000 trials are required");
    }
    if (spec.t < 1 || static_cast<std::size_t>(spec.t) > spec.classifiers.size()) {
        throw PreconditionError("hoeffding: t must index one of the supplied classifiers");
    }
    if (spec.t > spec.branch_cap) {
        throw CapExceededError("hoeffding: t exceeds the branch-enumeration cap");
    }
    if (!(spec.epsilon > 0.0)) throw PreconditionError("hoeffding: epsilon must be positive");

    const std::span<const WeakClassifier> used(spec.classifiers.data(),
                                               static_cast<std::size_t>(spec.t));
    const TrainOptions options{spec.clamp_width};

    struct TrialOutcome {
        bool violated = false;
        double c_hat = 0.0;
    };
    std::vector<TrialOutcome> outcomes(spec.trials);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const auto run = train(used, spec.sample, derive_seed(spec.seed, k), options);
            const auto& recs = run.trace.records();
            std::vector<double> prior;
            for (int i = 0; i + 1 < spec.t; ++i) prior.push_back(recs[i].r_hat);
            const double exact =
                exact_weighted_error(used, spec.sample, prior, spec.branch_cap);
            const double estimate = recs[spec.t - 1].r_hat_raw;
            outcomes[k].violated = std::abs(estimate - exact) >= spec.epsilon;
            outcomes[k].c_hat = exact_max_weight(used, spec.sample, prior, spec.branch_cap);
        }
    };

    const unsigned workers = std::max(1U, std::min<unsigned>(spec.workers, spec.trials));
    if (workers == 1) {
        run_range(0, spec.trials);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (spec.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(spec.trials, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
    }

    HoeffdingResult result;
    result.trials = spec.trials;
    for (const auto& o : outcomes) {
        result.violations += o.violated ? 1 : 0;
        result.c_hat = std::max(result.c_hat, o.c_hat);
    }
    result.violation_rate =
        static_cast<double>(result.violations) / static_cast<double>(spec.trials);
    result.bound = hoeffding_bound(spec.sample.size(), spec.epsilon, result.c_hat);
    result.query_count = static_cast<std::uint64_t>(spec.trials) * spec.sample.size() *
                         static_cast<std::uint64_t>(spec.t);
    return result;
}

double hoeffding_violation_rate(const HoeffdingTrialSpec& spec) {
    return run_hoeffding_trials(spec).violation_rate;
}

}  // namespace qboost
