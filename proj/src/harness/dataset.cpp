#include "qboost/harness/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qboost/counter_rng.hpp"

namespace qboost::harness {

namespace {

constexpr std::uint64_t kPatternStream = 0xce11;
constexpr std::uint64_t kStumpStream = 0x57u;
constexpr std::uint64_t kBlobStream = 0xb10b;

// Deterministic standard normal via Box-Muller on counter draws.
double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = 1.0 - uniform01(seed, stream, 2 * counter);  // (0, 1]
    const double u2 = uniform01(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t draw_index(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                       std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform01(seed, stream, counter) * static_cast<double>(n));
    return std::min(k, n - 1);
}

Stump best_stump(const std::vector<Stump>& candidates, const LabeledSample& sample) {
    Stump best = candidates.front();
    double best_error = stump_error(best, sample);
    for (const auto& s : candidates) {
        const double e = stump_error(s, sample);
        if (e < best_error) {
            best = s;
            best_error = e;
        }
    }
    return best;
}

GeneratedDataset finish(LabeledSample sample, std::vector<Stump> stumps, double flip_noise) {
    if (!sample.has_both_labels()) {
        throw GenerationError("generate_dataset: sample has a single label");
    }
    std::vector<double> base;
    std::vector<WeakClassifier> classifiers;
    for (std::size_t i = 0; i < stumps.size(); ++i) {
        base.push_back(stump_error(stumps[i], sample));
        classifiers.push_back(
            noisy_stump_classifier(stumps[i], flip_noise, "stump" + std::to_string(i + 1)));
    }
    if (std::ranges::none_of(base, [](double e) { return e < 0.5; })) {
        throw GenerationError("generate_dataset: no base stump has error below 1/2");
    }
    return {std::move(sample), std::move(classifiers), std::move(stumps), std::move(base)};
}

GeneratedDataset noisy_stump_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    const auto cells = static_cast<std::size_t>(spec.cells);
    // Label pattern; redraw (new counter block) until it has both labels and a
    // stump that beats 1/2. A balanced two-block pattern ends the search.
    std::vector<int> pattern(cells);
    auto cell_error = [&](const Stump& s) {
        std::size_t wrong = 0;
        for (std::size_t c = 0; c < cells; ++c) {
            const double mid = (static_cast<double>(c) + 0.5) / static_cast<double>(cells);
            const int pred = mid >= s.threshold ? s.polarity : -s.polarity;
            wrong += pred != pattern[c];
        }
        return static_cast<double>(wrong) / static_cast<double>(cells);
    };
    std::vector<Stump> grid;
    for (std::size_t j = 0; j <= cells; ++j) {
        for (int pol : {1, -1}) {
            grid.push_back({0, static_cast<double>(j) / static_cast<double>(cells), pol});
        }
    }
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 64 && !ok; ++attempt) {
        for (std::size_t c = 0; c < cells; ++c) {
            pattern[c] = uniform01(seed, kPatternStream, attempt * cells + c) < 0.5 ? 1 : -1;
        }
        const bool both = std::ranges::count(pattern, 1) > 0 && std::ranges::count(pattern, -1) > 0;
        ok = both && std::ranges::any_of(grid, [&](const Stump& s) { return cell_error(s) < 0.5; });
    }
    if (!ok) {
        for (std::size_t c = 0; c < cells; ++c) pattern[c] = c < cells / 2 ? -1 : 1;
    }

    std::vector<LabeledPoint> points(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(spec.n);
        const auto c = std::min(cells - 1, static_cast<std::size_t>(x * static_cast<double>(cells)));
        points[i] = {{x}, pattern[c]};
    }
    LabeledSample sample(std::move(points));

    // First stump: best on the cell grid (ties to the earliest). Others: seeded.
    std::vector<Stump> stumps;
    Stump best = grid.front();
    for (const auto& s : grid) {
        if (cell_error(s) < cell_error(best)) best = s;
    }
    stumps.push_back(best);
    for (std::size_t k = 1; k < spec.classifiers; ++k) {
        const auto j = draw_index(seed, kStumpStream, 2 * k, cells + 1);
        const int pol = uniform01(seed, kStumpStream, 2 * k + 1) < 0.5 ? 1 : -1;
        stumps.push_back({0, static_cast<double>(j) / static_cast<double>(cells), pol});
    }
    return finish(std::move(sample), std::move(stumps), spec.flip_noise);
}

GeneratedDataset blobs_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    const double half = spec.blob_separation / 2.0;
    std::vector<LabeledPoint> points(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        const double cx = label * half;
        points[i] = {{cx + gaussian(seed, kBlobStream, 2 * i), cx + gaussian(seed, kBlobStream, 2 * i + 1)},
                     label};
    }
    LabeledSample sample(std::move(points));

    // Candidate thresholds: below every point and midway between sorted neighbours.
    std::vector<Stump> candidates;
    double lo = 0.0;
    double hi = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<double> v;
        for (const auto& p : sample.points()) v.push_back(p.features[static_cast<std::size_t>(axis)]);
        std::ranges::sort(v);
        lo = std::min(lo, v.front());
        hi = std::max(hi, v.back());
        std::vector<double> thresholds{v.front() - 1.0};
        for (std::size_t i = 1; i < v.size(); ++i) thresholds.push_back(0.5 * (v[i - 1] + v[i]));
        for (double t : thresholds) {
            for (int pol : {1, -1}) candidates.push_back({axis, t, pol});
        }
    }
    std::vector<Stump> stumps{best_stump(candidates, sample)};
    for (std::size_t k = 1; k < spec.classifiers; ++k) {
        const int axis = uniform01(seed, kStumpStream, 3 * k) < 0.5 ? 0 : 1;
        const double t = lo + (hi - lo) * uniform01(seed, kStumpStream, 3 * k + 1);
        const int pol = uniform01(seed, kStumpStream, 3 * k + 2) < 0.5 ? 1 : -1;
        stumps.push_back({axis, t, pol});
    }
    return finish(std::move(sample), std::move(stumps), spec.flip_noise);
}

}  // namespace

WeakClassifier noisy_stump_classifier(const Stump& stump, double flip_noise, std::string name) {
    return WeakClassifier(std::move(name), [stump, flip_noise](const LabeledPoint& x) {
        return stump.predict(x) != x.label ? 1.0 - flip_noise : flip_noise;
    });
}

double stump_error(const Stump& stump, const LabeledSample& sample) {
    std::size_t wrong = 0;
    for (const auto& p : sample.points()) wrong += stump.predict(p) != p.label;
    return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

GeneratedDataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.n < 1) throw GenerationError("generate_dataset: need at least one point");
    if (spec.classifiers < 1) throw GenerationError("generate_dataset: need at least one classifier");
    if (!(spec.flip_noise >= 0.0 && spec.flip_noise <= 1.0)) {
        throw GenerationError("generate_dataset: flip noise outside [0, 1]");
    }
    if (spec.kind == DatasetKind::noisy_stump) {
        if (spec.cells < 2) throw GenerationError("generate_dataset: need at least two cells");
        return noisy_stump_dataset(spec, seed);
    }
    return blobs_dataset(spec, seed);
}

}  // namespace qboost::harness
