#pragma once

#include <cstdint>
#include <vector>

#include "qboost/core.hpp"
#include "qboost/harness/config.hpp"
#include "qboost/harness/report.hpp"

namespace qboost::harness {

/// Seed used for dataset generation; training draws use the config seed itself.
std::uint64_t dataset_seed(std::uint64_t seed);

/// Points for a compare cell: sample_size_for(c_hat_target, eps, delta) rounded
/// up to a multiple of `cells` for noisy-stump data when auto_sample_size is on.
std::size_t auto_sample_size(const ExperimentConfig& config, double epsilon);

Report run_classical(const ExperimentConfig& config);
Report run_quantum(const ExperimentConfig& config);
/// Classical and quantum training on identical samples over the (N, epsilon) sweep.
/// Resource-cap failures become error rows and set Report::partial.
Report run_compare(const ExperimentConfig& config);
Report run_hoeffding(const ExperimentConfig& config);
/// Haar-random qubit states, z-sign labels, noisy-axis POVM weak learners.
Report run_povm_demo(const ExperimentConfig& config);

Report run_experiment(const ExperimentConfig& config);

}  // namespace qboost::harness
