#include "qboost/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qboost/counter_rng.hpp"
#include "qboost/errors.hpp"

namespace qboost {

LabeledSample::LabeledSample(std::vector<LabeledPoint> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw PreconditionError("LabeledSample: sample must contain at least one point");
    }
    const std::size_t dim = points_.front().features.size();
    for (const auto& p : points_) {
        if (p.label != 1 && p.label != -1) {
            throw PreconditionError("LabeledSample: labels must be +1 or -1");
        }
        if (p.features.size() != dim) {
            throw PreconditionError("LabeledSample: feature length differs between points");
        }
    }
}

bool LabeledSample::has_both_labels() const {
    const bool pos = std::ranges::any_of(points_, [](const auto& p) { return p.label == 1; });
    const bool neg = std::ranges::any_of(points_, [](const auto& p) { return p.label == -1; });
    return pos && neg;
}

WeakClassifier::WeakClassifier(std::string name, ErrorFn error_prob)
    : name_(std::move(name)), fn_(std::make_shared<const ErrorFn>(std::move(error_prob))) {
    if (!*fn_) throw PreconditionError("WeakClassifier: empty error function");
}

double WeakClassifier::error_prob(const LabeledPoint& x) const {
    const double q = (*fn_)(x);
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvariantViolation("WeakClassifier '" + name_ + "': error probability " +
                                 std::to_string(q) + " outside [0, 1]");
    }
    return q;
}

WeakClassifier WeakClassifier::deterministic(std::string name,
                                             std::function<int(const LabeledPoint&)> predict) {
    return WeakClassifier(std::move(name), [predict = std::move(predict)](const LabeledPoint& x) {
        return predict(x) == x.label ? 0.0 : 1.0;
    });
}

WeakClassifier WeakClassifier::constant(std::string name, double q) {
    return WeakClassifier(std::move(name), [q](const LabeledPoint&) { return q; });
}

BranchString::BranchString(std::uint64_t bits, int length) : bits_(bits), length_(length) {
    if (length < 0 || length > kMaxLength) {
        throw PreconditionError("BranchString: length out of range");
    }
    if (length < 64 && (bits >> length) != 0) {
        throw PreconditionError("BranchString: bits set beyond length");
    }
}

int BranchString::at(int i) const {
    if (i < 1 || i > length_) throw PreconditionError("BranchString: index out of range");
    return static_cast<int>((bits_ >> (i - 1)) & 1U);
}

BranchString BranchString::appended(int bit) const {
    return BranchString(bits_ | (static_cast<std::uint64_t>(bit & 1) << length_), length_ + 1);
}

void BoostModel::append(WeakClassifier classifier, double alpha, double r_hat, double c_hat) {
    if (!(r_hat > 0.0 && r_hat < 1.0)) {
        throw InvariantViolation("BoostModel: r_hat must lie in (0, 1) after clamping");
    }
    if (!(c_hat >= 1.0) || (!c_hats_.empty() && c_hat < c_hats_.back())) {
        throw InvariantViolation("BoostModel: c_hat must be >= 1 and non-decreasing");
    }
    classifiers_.push_back(std::move(classifier));
    alphas_.push_back(alpha);
    r_hats_.push_back(r_hat);
    c_hats_.push_back(c_hat);
}

double weighted_vote(std::span<const double> alphas, std::span<const int> votes) {
    double g = 0.0;
    for (std::size_t t = 0; t < alphas.size(); ++t) g += alphas[t] * votes[t];
    return g;
}

int strong_classify(const BoostModel& model, const LabeledPoint& x, std::uint64_t draw_seed,
                    std::uint64_t point_key) {
    if (model.empty()) throw InvalidModelError("strong_classify: model has no classifiers");
    std::vector<int> votes;
    votes.reserve(model.size());
    for (std::size_t t = 0; t < model.size(); ++t) {
        const double q = model.classifiers()[t].error_prob(x);
        const int wrong = bernoulli(q, draw_seed, point_key, t + 1);
        votes.push_back(wrong ? -x.label : x.label);
    }
    return weighted_vote(model.alphas(), votes) >= 0.0 ? 1 : -1;
}

double alpha_from_error(double r) {
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError("alpha_from_error: error " + std::to_string(r) + " outside (0, 1)");
    }
    return 0.5 * std::log((1.0 - r) / r);
}

double clamp_error(double r, double width) {
    return std::clamp(r, width, 1.0 - width);
}

double update_weight(double w, int bit, double r_hat) {
    return bit ? w / (2.0 * r_hat) : w / (2.0 * (1.0 - r_hat));
}

double max_update_factor(double r_hat) {
    return std::max(1.0 / (2.0 * r_hat), 1.0 / (2.0 * (1.0 - r_hat)));
}

void for_each_branch(std::span<const double> error_probs,
                     const std::function<void(const BranchString&, double)>& visit) {
    const int t = static_cast<int>(error_probs.size());
    const std::uint64_t count = std::uint64_t{1} << t;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        double prob = 1.0;
        for (int i = 0; i < t; ++i) {
            const double q = error_probs[i];
            prob *= ((bits >> i) & 1U) ? q : 1.0 - q;
        }
        visit(BranchString(bits, t), prob);
    }
}

double branch_weight(const BranchString& s, std::span<const double> r_hats, int k) {
    double w = 1.0;
    for (int i = 1; i <= k; ++i) w = update_weight(w, s.at(i), r_hats[i - 1]);
    return w;
}

std::vector<std::vector<double>> error_table(std::span<const WeakClassifier> classifiers,
                                             const LabeledSample& sample) {
    std::vector<std::vector<double>> table(classifiers.size(), std::vector<double>(sample.size()));
    for (std::size_t i = 0; i < classifiers.size(); ++i) {
        for (std::size_t j = 0; j < sample.size(); ++j) {
            table[i][j] = classifiers[i].error_prob(sample[j]);
        }
    }
    return table;
}

double exponential_cost(const BoostModel& model, const LabeledSample& sample, int branch_cap) {
    const int t = static_cast<int>(model.size());
    if (t > branch_cap) {
        throw CapExceededError("exponential_cost: T = " + std::to_string(t) +
                               " exceeds the branch-enumeration cap " +
                               std::to_string(branch_cap));
    }
    const auto& alphas = model.alphas();
    const auto q = error_table(model.classifiers(), sample);
    double total = 0.0;
    std::vector<double> probs(t);
    for (std::size_t j = 0; j < sample.size(); ++j) {
        for (int i = 0; i < t; ++i) probs[i] = q[i][j];
        double per_point = 0.0;
        for_each_branch(probs, [&](const BranchString& s, double prob) {
            if (prob == 0.0) return;
            double g = 0.0;
            for (int i = 1; i <= t; ++i) g += s.at(i) ? alphas[i - 1] : -alphas[i - 1];
            per_point += prob * std::exp(g);
        });
        total += per_point;
    }
    return total / static_cast<double>(sample.size());
}

std::uint64_t sample_size_for(double c_hat, double epsilon, double failure_prob) {
    if (!(c_hat >= 1.0) || !(epsilon > 0.0) || !(failure_prob > 0.0 && failure_prob < 1.0)) {
        throw DomainError("sample_size_for: arguments out of range");
    }
    const double n = c_hat * c_hat * std::log(2.0 / failure_prob) / (2.0 * epsilon * epsilon);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(n)));
}

double hoeffding_bound(std::uint64_t n, double epsilon, double c_hat) {
    return 2.0 * std::exp(-2.0 * static_cast<double>(n) * epsilon * epsilon / (c_hat * c_hat));
}

}  // namespace qboost
