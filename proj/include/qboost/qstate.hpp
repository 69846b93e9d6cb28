#pragma once

// Weak classifiers on quantum data: two-outcome POVMs measured on density
// matrices, adapted to the WeakClassifier interface.
//
// A quantum data point is carried in LabeledPoint::features as the d x d
// density matrix in row-major order, real and imaginary parts interleaved
// (2 d^2 reals). encode_state / decode_state convert.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qboost/core.hpp"

namespace qboost {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kOperatorTolerance = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix rho);

    /// |psi><psi| for a (not necessarily normalized) nonzero vector.
    static DensityMatrix pure(const Eigen::VectorXcd& psi);
    static DensityMatrix maximally_mixed(int d);

    int dimension() const { return static_cast<int>(rho_.rows()); }
    const ComplexMatrix& matrix() const { return rho_; }
    double purity() const;

    /// lambda * a + (1 - lambda) * b.
    static DensityMatrix mixture(double lambda, const DensityMatrix& a, const DensityMatrix& b);

  private:
    ComplexMatrix rho_;
};

/// {M_-1, M_+1} with M_+1 given and M_-1 = I - M_+1.
class TwoOutcomePOVM {
  public:
    explicit TwoOutcomePOVM(ComplexMatrix m_plus);

    /// Projector onto the given vector for outcome +1.
    static TwoOutcomePOVM projective(const Eigen::VectorXcd& plus_direction);
    /// (I + sharpness * n . sigma) / 2 on a qubit; sharpness in [0, 1].
    static TwoOutcomePOVM qubit_axis(const Eigen::Vector3d& axis, double sharpness);

    int dimension() const { return static_cast<int>(m_plus_.rows()); }
    const ComplexMatrix& m_plus() const { return m_plus_; }
    ComplexMatrix m_minus() const;
    /// M_outcome for outcome in {-1, +1}.
    ComplexMatrix element(int outcome) const;

  private:
    ComplexMatrix m_plus_;
};

/// tr(M_{-label} rho): probability the outcome disagrees with the label.
double povm_error_prob(const TwoOutcomePOVM& povm, const DensityMatrix& rho, int true_label);

/// Haar-random pure state from a normalized complex Gaussian vector.
DensityMatrix random_pure_state(int d, std::uint64_t seed);

using StateLabeler = std::function<int(const DensityMatrix&)>;

/// Sign of <psi|Z|psi> on a qubit (rho_00 >= rho_11 gives +1).
int z_sign_labeler(const DensityMatrix& rho);

/// error_prob(x) = povm_error_prob(povm, rho_x, labeler(rho_x)), rho_x decoded from x.features.
WeakClassifier povm_classifier(TwoOutcomePOVM povm, StateLabeler labeler,
                               std::string name = "povm");

std::vector<double> encode_state(const DensityMatrix& rho);
DensityMatrix decode_state(std::span<const double> features);

}  // namespace qboost
