#include "qboost/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "qboost/errors.hpp"

namespace qboost {

namespace {

bool is_hermitian(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= kOperatorTolerance;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() < 1 || rho_.rows() != rho_.cols()) {
        throw PreconditionError("DensityMatrix: matrix must be square and nonempty");
    }
    if (!is_hermitian(rho_)) throw InvariantViolation("DensityMatrix: not Hermitian");
    if (std::abs(rho_.trace() - std::complex<double>(1.0, 0.0)) > kOperatorTolerance) {
        throw InvariantViolation("DensityMatrix: trace is not 1");
    }
    if (hermitian_eigenvalues(rho_).minCoeff() < -kOperatorTolerance) {
        throw InvariantViolation("DensityMatrix: not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
    const double n = psi.norm();
    if (!(n > 0.0)) throw PreconditionError("DensityMatrix::pure: zero vector");
    const Eigen::VectorXcd v = psi / n;
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
    return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DensityMatrix DensityMatrix::mixture(double lambda, const DensityMatrix& a, const DensityMatrix& b) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw PreconditionError("DensityMatrix::mixture: weight outside [0, 1]");
    }
    return DensityMatrix(lambda * a.matrix() + (1.0 - lambda) * b.matrix());
}

TwoOutcomePOVM::TwoOutcomePOVM(ComplexMatrix m_plus) : m_plus_(std::move(m_plus)) {
    if (m_plus_.rows() < 1 || m_plus_.rows() != m_plus_.cols()) {
        throw PreconditionError("TwoOutcomePOVM: element must be square and nonempty");
    }
    if (!is_hermitian(m_plus_)) throw InvariantViolation("TwoOutcomePOVM: M_+1 not Hermitian");
    const auto ev = hermitian_eigenvalues(m_plus_);
    if (ev.minCoeff() < -kOperatorTolerance || ev.maxCoeff() > 1.0 + kOperatorTolerance) {
        throw InvariantViolation("TwoOutcomePOVM: eigenvalues of M_+1 outside [0, 1]");
    }
}

TwoOutcomePOVM TwoOutcomePOVM::projective(const Eigen::VectorXcd& plus_direction) {
    const double n = plus_direction.norm();
    if (!(n > 0.0)) throw PreconditionError("TwoOutcomePOVM::projective: zero vector");
    const Eigen::VectorXcd v = plus_direction / n;
    return TwoOutcomePOVM(v * v.adjoint());
}

TwoOutcomePOVM TwoOutcomePOVM::qubit_axis(const Eigen::Vector3d& axis, double sharpness) {
    if (!(sharpness >= 0.0 && sharpness <= 1.0)) {
        throw PreconditionError("TwoOutcomePOVM::qubit_axis: sharpness outside [0, 1]");
    }
    const double n = axis.norm();
    if (!(n > 0.0)) throw PreconditionError("TwoOutcomePOVM::qubit_axis: zero axis");
    const Eigen::Vector3d a = axis / n;
    using C = std::complex<double>;
    ComplexMatrix sigma(2, 2);
    sigma << C(a.z(), 0.0), C(a.x(), -a.y()), C(a.x(), a.y()), C(-a.z(), 0.0);
    return TwoOutcomePOVM(0.5 * (ComplexMatrix::Identity(2, 2) + sharpness * sigma));
}

ComplexMatrix TwoOutcomePOVM::m_minus() const {
    return ComplexMatrix::Identity(m_plus_.rows(), m_plus_.cols()) - m_plus_;
}

ComplexMatrix TwoOutcomePOVM::element(int outcome) const {
    if (outcome == 1) return m_plus_;
    if (outcome == -1) return m_minus();
    throw PreconditionError("TwoOutcomePOVM: outcome must be +1 or -1");
}

double povm_error_prob(const TwoOutcomePOVM& povm, const DensityMatrix& rho, int true_label) {
    if (povm.dimension() != rho.dimension()) {
        throw PreconditionError("povm_error_prob: dimension mismatch");
    }
    const double p = (povm.element(-true_label) * rho.matrix()).trace().real();
    if (p < -kOperatorTolerance || p > 1.0 + kOperatorTolerance) {
        throw InvariantViolation("povm_error_prob: probability outside [0, 1]");
    }
    return std::clamp(p, 0.0, 1.0);
}

DensityMatrix random_pure_state(int d, std::uint64_t seed) {
    if (d < 2) throw PreconditionError("random_pure_state: dimension must be at least 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd psi(d);
    for (int i = 0; i < d; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        psi[i] = {re, im};
    }
    return DensityMatrix::pure(psi);
}

int z_sign_labeler(const DensityMatrix& rho) {
    if (rho.dimension() != 2) throw PreconditionError("z_sign_labeler: qubit states only");
    return rho.matrix()(0, 0).real() >= rho.matrix()(1, 1).real() ? 1 : -1;
}

WeakClassifier povm_classifier(TwoOutcomePOVM povm, StateLabeler labeler, std::string name) {
    return WeakClassifier(std::move(name),
                          [povm = std::move(povm), labeler = std::move(labeler)](
                              const LabeledPoint& x) {
                              const DensityMatrix rho = decode_state(x.features);
                              return povm_error_prob(povm, rho, labeler(rho));
                          });
}

std::vector<double> encode_state(const DensityMatrix& rho) {
    const int d = rho.dimension();
    std::vector<double> out;
    out.reserve(2 * static_cast<std::size_t>(d) * d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            out.push_back(rho.matrix()(r, c).real());
            out.push_back(rho.matrix()(r, c).imag());
        }
    }
    return out;
}

DensityMatrix decode_state(std::span<const double> features) {
    const auto d = static_cast<int>(std::lround(std::sqrt(features.size() / 2.0)));
    if (d < 1 || static_cast<std::size_t>(2 * d * d) != features.size()) {
        throw PreconditionError("decode_state: feature length is not 2 d^2");
    }
    ComplexMatrix rho(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            const std::size_t i = 2 * (static_cast<std::size_t>(r) * d + c);
            rho(r, c) = {features[i], features[i + 1]};
        }
    }
    return DensityMatrix(std::move(rho));
}

}  // namespace qboost
