#pragma once

// Synthetic samples and weak-learner pools.
//
// noisy-stump: N points on [0, 1) at (i + 0.5) / N, labelled by a seeded +/-1
// pattern over `cells` equal cells. Classifiers are threshold stumps with
// thresholds on the cell grid, wrapped with flip noise eta so that
// q(1 | x) = 1 - eta where the stump is wrong and eta where it is right. The
// pattern and the stumps depend on the seed only, so for N a multiple of
// `cells` the error fractions (and quantum query counts) do not depend on N.
//
// blobs: two Gaussian clouds in the plane at +/-(sep/2, sep/2) with
// alternating labels and axis-aligned stumps (same flip-noise wrapper).
//
// In both cases the first classifier is the best base stump on the sample.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qboost/core.hpp"
#include "qboost/harness/config.hpp"

namespace qboost::harness {

class GenerationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Stump {
    int axis = 0;
    double threshold = 0.0;
    int polarity = 1;  ///< predicts polarity where x[axis] >= threshold, -polarity below

    int predict(const LabeledPoint& x) const {
        return x.features[static_cast<std::size_t>(axis)] >= threshold ? polarity : -polarity;
    }
};

struct GeneratedDataset {
    LabeledSample sample;
    std::vector<WeakClassifier> classifiers;
    std::vector<Stump> stumps;
    std::vector<double> base_errors;  ///< empirical error of each stump before noise
};

/// Stump error wrapped with flip noise: 1 - eta where wrong, eta where right.
WeakClassifier noisy_stump_classifier(const Stump& stump, double flip_noise, std::string name);

/// Empirical error fraction of a noiseless stump.
double stump_error(const Stump& stump, const LabeledSample& sample);

/// Throws GenerationError when the sample has a single label or no base stump
/// beats 1/2 (checked before noise, so eta = 1/2 is allowed).
GeneratedDataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace qboost::harness
