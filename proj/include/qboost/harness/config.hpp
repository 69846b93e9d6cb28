#pragma once

// Flat key = value experiment configuration. '#' starts a comment; blank
// lines are ignored; unknown keys and out-of-range values are errors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qboost/quantum_sim.hpp"

namespace qboost::harness {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Mode { classical, quantum, compare, hoeffding, povm_demo };

enum class DatasetKind { blobs, noisy_stump };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::noisy_stump;
    std::size_t n = 16;
    std::size_t classifiers = 3;
    int cells = 16;               ///< noisy-stump: label cells on [0, 1)
    double flip_noise = 0.0;      ///< eta: q(1|x) in {eta, 1 - eta}
    double blob_separation = 3.0;  ///< blobs: distance between class means per axis
};

struct ExperimentConfig {
    Mode mode = Mode::compare;
    std::uint64_t seed = 1;
    std::size_t n = 16;
    std::size_t t = 3;
    double epsilon = 0.1;
    double failure_prob = 0.05;

    DatasetKind dataset = DatasetKind::noisy_stump;
    int cells = 16;
    double flip_noise = 0.0;
    double blob_separation = 3.0;

    std::vector<std::size_t> sweep_n;
    std::vector<double> sweep_epsilon;
    bool auto_sample_size = false;
    double c_hat_target = 1.0;

    std::size_t trials = 1000;
    int hoeffding_t = 1;
    std::vector<std::size_t> grid_n;
    std::vector<double> grid_epsilon;

    int guard_bits = 2;
    ThetaMode qpe_mode = ThetaMode::maximum_likelihood;
    QpeBackend qpe_backend = QpeBackend::autocorrelation;
    double clamp_width = kDefaultClampWidth;
    std::size_t memory_cap = kDefaultMemoryCap;
    unsigned workers = 1;

    double povm_sharpness = 0.8;
    double povm_axis_spread = 0.6;

    std::string output = "qboost-out";

    DatasetSpec dataset_spec(std::size_t n_points) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical key = value rendering; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

std::string to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& name);

}  // namespace qboost::harness
