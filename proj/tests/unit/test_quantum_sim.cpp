#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "../oracles/branch_oracle.hpp"
#include "../oracles/dense_grover.hpp"
#include "../support/instances.hpp"
#include "qboost/classical_boost.hpp"
#include "qboost/errors.hpp"
#include "qboost/quantum_sim.hpp"

using namespace qboost;
using std::numbers::pi;

namespace {

struct Built {
    std::size_t n;
    int t;
    std::vector<std::vector<double>> q;
    std::vector<double> prior;
    GroverOperator op;
    QuantumState prepared;
};

Built build(const std::vector<std::vector<double>>& q, const std::vector<double>& prior) {
    const std::size_t n = q.front().size();
    const int t = static_cast<int>(q.size());
    const RegisterLayout layout{n, t, 0};
    const auto sample = qtest::index_sample(n);
    std::vector<QuantumQueryOracle> oracles;
    for (int i = 0; i < t; ++i) oracles.emplace_back(i + 1, q[static_cast<std::size_t>(i)]);
    WeightFunctionTable table(q, prior);
    const double c = table.c_hat();
    GroverOperator op(std::move(oracles), std::move(table), c, prepare_initial(sample, layout));
    QuantumState prepared = op.prepare(nullptr);
    return {n, t, q, prior, std::move(op), std::move(prepared)};
}

Built random_built(std::mt19937_64& rng, bool deterministic = false) {
    const std::size_t n = 1 + rng() % 8;
    const int t = 1 + static_cast<int>(rng() % 4);
    return build(qtest::random_error_table(rng, n, t, deterministic), qtest::random_priors(rng, t - 1));
}

std::vector<Amplitude> random_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g;
    std::vector<Amplitude> v(dim);
    for (auto& a : v) a = {g(rng), g(rng)};
    const double nv = norm(v);
    for (auto& a : v) a /= nv;
    return v;
}

// Normalized ancilla-0 and ancilla-1 components of a system block.
std::pair<std::vector<Amplitude>, std::vector<Amplitude>> split(std::span<const Amplitude> psi) {
    std::vector<Amplitude> a0(psi.size()), a1(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) (i % 2 ? a1 : a0)[i] = psi[i];
    const double n0 = norm(a0), n1 = norm(a1);
    if (n0 > 0) for (auto& a : a0) a /= n0;
    if (n1 > 0) for (auto& a : a1) a /= n1;
    return {a0, a1};
}

}  // namespace

// ---------------------------------------------------------------------------
// Layout and preparation

TEST(RegisterLayout, DimensionsAndIndex) {
    const RegisterLayout l{3, 2, 1};
    EXPECT_EQ(l.system_dimension(), 3u * 4 * 2);
    EXPECT_EQ(l.dimension(), 3u * 4 * 2 * 2);
    EXPECT_EQ(l.index(2, 3, 1, 1), 24u + ((2u << 2) + 3) * 2 + 1);
}

TEST(RegisterLayout, MemoryCap) {
    EXPECT_THROW(check_memory({4, 3, 2}, 4 * 8 * 2 * 4 - 1), CapExceededError);
    EXPECT_NO_THROW(check_memory({4, 3, 2}, 4 * 8 * 2 * 4));
    EXPECT_THROW(check_memory({1000, 40, 40}, kDefaultMemoryCap), CapExceededError);  // no overflow
    EXPECT_THROW(QuantumState({2, 30, 0}), CapExceededError);
}

TEST(PrepareInitial, UniformOverData) {
    for (std::size_t n : {1u, 3u, 4u}) {
        const RegisterLayout l{n, 2, 0};
        const auto s = prepare_initial(qtest::index_sample(n), l);
        for (std::size_t x = 0; x < n; ++x) {
            EXPECT_NEAR(s.at(x, 0, 0).real(), 1.0 / std::sqrt(static_cast<double>(n)), 1e-15);
        }
        EXPECT_NEAR(s.norm(), 1.0, 1e-15);
        double other = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            for (std::uint64_t b = 1; b < 4; ++b) other += std::norm(s.at(x, b, 0));
            for (std::uint64_t b = 0; b < 4; ++b) other += std::norm(s.at(x, b, 1));
        }
        EXPECT_EQ(other, 0.0);
    }
    EXPECT_EQ(prepare_initial(qtest::index_sample(1), {1, 0, 0}).at(0, 0, 0), Amplitude(1.0, 0.0));
    EXPECT_THROW(prepare_initial(qtest::index_sample(3), {4, 1, 0}), PreconditionError);
    EXPECT_THROW(prepare_initial(qtest::index_sample(4), {4, 3, 0}, 10), CapExceededError);
}

// ---------------------------------------------------------------------------
// Query oracles

TEST(QueryOracles, DeterministicPicksOneBranch) {
    const std::size_t n = 4;
    const std::vector<std::vector<double>> q{{0, 1, 1, 0}, {1, 1, 0, 0}};
    auto state = prepare_initial(qtest::index_sample(n), {n, 2, 0});
    const auto oracles = make_query_oracles(qtest::table_classifiers(q), qtest::index_sample(n));
    QueryCounter counter;
    apply_query_oracles(state, oracles, counter);
    EXPECT_EQ(counter.count(), 2u);
    for (std::size_t x = 0; x < n; ++x) {
        const std::uint64_t s = static_cast<std::uint64_t>(q[0][x]) | (static_cast<std::uint64_t>(q[1][x]) << 1);
        for (std::uint64_t b = 0; b < 4; ++b) {
            EXPECT_NEAR(std::abs(state.at(x, b, 0)), b == s ? 0.5 : 0.0, 1e-15);
        }
    }
}

TEST(QueryOracles, AmplitudesAreRootQOverN) {
    auto state = prepare_initial(qtest::index_sample(2), {2, 1, 0});
    const std::vector<QuantumQueryOracle> oracles{{1, std::vector<double>{0.3, 0.3}}};
    QueryCounter counter;
    apply_query_oracles(state, oracles, counter);
    for (std::size_t x = 0; x < 2; ++x) {
        EXPECT_NEAR(state.at(x, 0, 0).real(), std::sqrt(0.35), 1e-15);
        EXPECT_NEAR(state.at(x, 1, 0).real(), std::sqrt(0.15), 1e-15);
    }
    EXPECT_NEAR(state.norm(), 1.0, 1e-15);
    EXPECT_EQ(counter.count(), 1u);
}

TEST(QueryOracles, RequiresEmptyBranchRegister) {
    auto state = prepare_initial(qtest::index_sample(2), {2, 1, 0});
    const std::vector<QuantumQueryOracle> oracles{{1, std::vector<double>{0.3, 0.3}}};
    QueryCounter counter;
    apply_query_oracles(state, oracles, counter);
    EXPECT_THROW(apply_query_oracles(state, oracles, counter), PreconditionError);
}

TEST(QueryOracles, InverseUndoesAndPreservesNorm) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + rng() % 6;
        const int t = 1 + static_cast<int>(rng() % 3);
        const auto q = qtest::random_error_table(rng, n, t, false);
        const RegisterLayout l{n, t, 0};
        auto v = random_vector(rng, l.system_dimension());
        const auto v0 = v;
        for (int i = 0; i < t; ++i) {
            const QuantumQueryOracle h(i + 1, q[static_cast<std::size_t>(i)]);
            h.apply(v, l, false);
            EXPECT_NEAR(norm(v), 1.0, 1e-12);
            h.apply(v, l, true);
            for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(std::abs(v[j] - v0[j]), 0.0, 1e-12);
        }
    }
}

TEST(QueryOracles, Validation) {
    EXPECT_THROW(QuantumQueryOracle(0, std::vector<double>{0.5}), PreconditionError);
    EXPECT_THROW(QuantumQueryOracle(1, std::vector<double>{1.5}), InvariantViolation);
    const QuantumQueryOracle h(3, std::vector<double>{0.5});
    std::vector<Amplitude> block(1 * 2 * 2);
    EXPECT_THROW(h.apply(block, {1, 1, 0}, false), PreconditionError);
}

// ---------------------------------------------------------------------------
// Weight table and Q_t

TEST(WeightFunctionTable, MatchesBranchWeights) {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + rng() % 6;
        const int t = 1 + static_cast<int>(rng() % 4);
        const auto q = qtest::random_error_table(rng, n, t, false);
        const auto prior = qtest::random_priors(rng, t - 1);
        const WeightFunctionTable table(q, prior);
        double bound = 1.0;
        for (double r : prior) bound *= max_update_factor(r);
        EXPECT_NEAR(table.analytic_bound(), bound, 1e-12);
        EXPECT_NEAR(table.c_hat(), oracle::exact_iteration(q, prior, t).c_hat, 1e-12);
        EXPECT_LE(table.c_hat(), bound * (1 + 1e-12));
        for (std::size_t x = 0; x < n; ++x) {
            for (std::uint64_t s = 0; s < (std::uint64_t{1} << t); ++s) {
                EXPECT_GT(table.weight(x, s), 0.0);
                EXPECT_NEAR(table.weight(x, s), branch_weight(BranchString(s, t), prior, t - 1), 1e-12);
                if (t == 1) EXPECT_EQ(table.weight(x, s), 1.0);
            }
        }
    }
}

TEST(RotationQt, AllErrorsAtMaxWeightGoToOne) {
    const auto b = build({{1, 1, 1}}, {});
    EXPECT_NEAR(ancilla_one_probability(b.prepared), 1.0, 1e-15);
}

TEST(RotationQt, NoErrorsLeaveStateUnchanged) {
    const std::size_t n = 3;
    auto s = prepare_initial(qtest::index_sample(n), {n, 1, 0});
    const std::vector<QuantumQueryOracle> h{{1, std::vector<double>{0, 0, 0}}};
    QueryCounter c;
    apply_query_oracles(s, h, c);
    const auto before = s;
    apply_rotation_qt(s, WeightFunctionTable({{0, 0, 0}}, {}), 1.0);
    for (std::size_t i = 0; i < s.amplitudes().size(); ++i) {
        EXPECT_EQ(s.amplitudes()[i], before.amplitudes()[i]);
    }
    EXPECT_EQ(ancilla_one_probability(s), 0.0);
}

TEST(RotationQt, HalfErrorInstance) {
    const auto b = build({{1, 0}}, {});
    EXPECT_NEAR(ancilla_one_probability(b.prepared), 0.5, 1e-15);
}

TEST(RotationQt, WeightAboveCHatIsAnInvariantViolation) {
    auto s = prepare_initial(qtest::index_sample(2), {2, 1, 0});
    const std::vector<QuantumQueryOracle> h{{1, std::vector<double>{1, 0}}};
    QueryCounter c;
    apply_query_oracles(s, h, c);
    EXPECT_THROW(apply_rotation_qt(s, WeightFunctionTable({{1, 0}}, {}), 0.5), InvariantViolation);
}

TEST(RotationQt, RequiresAncillaZero) {
    auto b = build({{1, 0}}, {});
    EXPECT_THROW(apply_rotation_qt(b.prepared, WeightFunctionTable({{1, 0}}, {}), 1.0),
                 PreconditionError);
}

TEST(AncillaProbability, MatchesBranchEnumeration) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 300; ++k) {
        const auto b = random_built(rng);
        const auto ref = oracle::exact_iteration(b.q, b.prior, b.t);
        const double p = ancilla_one_probability(b.prepared);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_NEAR(p, ref.r_tilde / ref.c_hat, 1e-10);
        EXPECT_NEAR(b.prepared.norm(), 1.0, 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Reflection and the Grover iterate

TEST(ReflectAboutInit, FixedPointAndOrthogonal) {
    const RegisterLayout l{3, 1, 0};
    const auto init = prepare_initial(qtest::index_sample(3), l);
    auto s = init;
    reflect_about_init(s, init);
    for (std::size_t i = 0; i < s.amplitudes().size(); ++i) {
        EXPECT_NEAR(std::abs(s.amplitudes()[i] - init.amplitudes()[i]), 0.0, 1e-15);
    }
    QuantumState perp(l);
    perp.at(0, 1, 1) = 1.0;
    reflect_about_init(perp, init);
    EXPECT_EQ(perp.at(0, 1, 1), Amplitude(-1.0, 0.0));
}

TEST(ReflectAboutInit, PreservesNorm) {
    std::mt19937_64 rng(4);
    const RegisterLayout l{5, 2, 0};
    const auto init = prepare_initial(qtest::index_sample(5), l);
    for (int k = 0; k < 100; ++k) {
        QuantumState s(l);
        const auto v = random_vector(rng, l.system_dimension());
        std::copy(v.begin(), v.end(), s.amplitudes().begin());
        reflect_about_init(s, init);
        EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    }
}

TEST(GroverIterate, MatchesDenseOperator) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 30; ++k) {
        const std::size_t n = 1 + rng() % 4;
        const int t = 1 + static_cast<int>(rng() % 3);
        const auto b = build(qtest::random_error_table(rng, n, t, false), qtest::random_priors(rng, t - 1));
        const auto& table = b.op.table();
        const auto dense = oracle::dense_grover(
            b.q, t, [&](std::size_t x, std::uint64_t s) { return table.weight(x, s); },
            [&](std::size_t x, std::uint64_t s) { return table.supported(x, s); }, b.op.c_hat());
        const auto dim = static_cast<Eigen::Index>(b.op.layout().system_dimension());
        for (int rep = 0; rep < 3; ++rep) {
            auto v = random_vector(rng, static_cast<std::size_t>(dim));
            Eigen::VectorXcd ev(dim);
            for (Eigen::Index i = 0; i < dim; ++i) ev[i] = v[static_cast<std::size_t>(i)];
            auto g = v;
            b.op.apply_g(g, nullptr);
            b.op.apply_iterate(v, nullptr);
            const Eigen::VectorXcd want_w = dense.iterate * ev;
            const Eigen::VectorXcd want_g = dense.g * ev;
            for (Eigen::Index i = 0; i < dim; ++i) {
                EXPECT_NEAR(std::abs(v[static_cast<std::size_t>(i)] - want_w[i]), 0.0, 1e-12);
                EXPECT_NEAR(std::abs(g[static_cast<std::size_t>(i)] - want_g[i]), 0.0, 1e-12);
            }
        }
        // The dense iterate is unitary.
        const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dim, dim);
        EXPECT_LT((dense.iterate.adjoint() * dense.iterate - eye).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(GroverIterate, QuarterTurnInstance) {
    // N = 2, one error, W = 1: theta = pi/4, so <psi|W_G|psi> = cos(pi/2) = 0.
    const auto b = build({{1, 0}}, {});
    auto v = std::vector<Amplitude>(b.prepared.amplitudes().begin(), b.prepared.amplitudes().end());
    b.op.apply_iterate(v, nullptr);
    EXPECT_NEAR(inner_product(b.prepared.amplitudes(), v).real(), 0.0, 1e-15);
}

TEST(GroverIterate, AmplitudeOrientationAfterKSteps) {
    // After k iterates the ancilla-1 probability is cos^2((2k + 1) theta).
    std::mt19937_64 rng(6);
    for (int inst = 0; inst < 40; ++inst) {
        const auto b = random_built(rng);
        const double p1 = ancilla_one_probability(b.prepared);
        const double theta = std::acos(std::sqrt(p1));
        auto v = std::vector<Amplitude>(b.prepared.amplitudes().begin(), b.prepared.amplitudes().end());
        QueryCounter counter;
        for (int k = 1; k <= 16; ++k) {
            b.op.apply_iterate(v, &counter);
            const double c = std::cos((2 * k + 1) * theta);
            EXPECT_NEAR(ancilla_one_probability(v), c * c, 1e-9);
            EXPECT_NEAR(norm(v), 1.0, 1e-10);
        }
        EXPECT_EQ(counter.count(), 16u * 2 * static_cast<std::uint64_t>(b.t));
    }
}

TEST(GroverIterate, TwoDimensionalInvariantSubspace) {
    std::mt19937_64 rng(7);
    for (int inst = 0; inst < 40; ++inst) {
        const auto b = random_built(rng);
        const auto [psi0, psi1] = split(b.prepared.amplitudes());
        auto v = std::vector<Amplitude>(b.prepared.amplitudes().begin(), b.prepared.amplitudes().end());
        for (int k = 1; k <= 16; ++k) {
            b.op.apply_iterate(v, nullptr);
            const Amplitude c0 = inner_product(psi0, v);
            const Amplitude c1 = inner_product(psi1, v);
            double residual = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) residual += std::norm(v[i] - c0 * psi0[i] - c1 * psi1[i]);
            EXPECT_LE(std::sqrt(residual), 1e-8);
        }
    }
}

TEST(GroverIterate, RestrictedEigenvalues) {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int inst = 0; inst < 200 && checked < 60; ++inst) {
        const auto b = random_built(rng);
        const auto ref = oracle::exact_iteration(b.q, b.prior, b.t);
        const double ratio = ref.r_tilde / ref.c_hat;
        if (ratio < 1e-9 || ratio > 1 - 1e-9) continue;  // one-dimensional span
        ++checked;
        const double theta = std::acos(std::sqrt(ratio));
        const auto [psi0, psi1] = split(b.prepared.amplitudes());
        Eigen::Matrix2cd m;
        const std::vector<Amplitude>* basis[2] = {&psi0, &psi1};
        for (int j = 0; j < 2; ++j) {
            auto w = *basis[j];
            b.op.apply_iterate(w, nullptr);
            for (int i = 0; i < 2; ++i) m(i, j) = inner_product(*basis[i], w);
        }
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m);
        std::vector<double> args{std::arg(es.eigenvalues()[0]), std::arg(es.eigenvalues()[1])};
        std::sort(args.begin(), args.end());
        EXPECT_NEAR(args[0], -2 * theta, 1e-9);
        EXPECT_NEAR(args[1], 2 * theta, 1e-9);
        EXPECT_NEAR(std::abs(es.eigenvalues()[0]), 1.0, 1e-9);
    }
    EXPECT_GE(checked, 50);
}

TEST(GroverIterate, AllErrorsIsIdentityOnTheSpan) {
    // R = c: theta = 0, W_G psi = psi.
    const auto b = build({{1, 1, 1, 1}}, {});
    auto v = std::vector<Amplitude>(b.prepared.amplitudes().begin(), b.prepared.amplitudes().end());
    b.op.apply_iterate(v, nullptr);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(v[i] - b.prepared.amplitudes()[i]), 0.0, 1e-14);
    EXPECT_NEAR(ancilla_one_probability(v), 1.0, 1e-14);
}

TEST(GroverIterate, NoErrorsIsMinusIdentityOnTheSpan) {
    // R = 0: theta = pi/2, W_G psi = -psi.
    const auto b = build({{0, 0, 0}}, {});
    auto v = std::vector<Amplitude>(b.prepared.amplitudes().begin(), b.prepared.amplitudes().end());
    b.op.apply_iterate(v, nullptr);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(v[i] + b.prepared.amplitudes()[i]), 0.0, 1e-14);
    EXPECT_NEAR(ancilla_one_probability(v), 0.0, 1e-14);
}

TEST(GroverIterate, PhaseBlocksAndCounter) {
    const auto b = build({{1, 0}, {0.3, 0.6}}, {0.5});
    RegisterLayout l = b.op.layout();
    l.phase_bits = 2;
    QuantumState s(l);
    for (std::size_t p = 0; p < 4; ++p) {
        std::copy(b.prepared.amplitudes().begin(), b.prepared.amplitudes().end(), s.block(p).begin());
    }
    QueryCounter counter;
    grover_iterate(s, b.op, counter);
    EXPECT_EQ(counter.count(), 4u * 2 * 2);
    EXPECT_NEAR(s.norm(), 2.0, 1e-12);  // four unit blocks
    QuantumState wrong({3, 2, 0});
    EXPECT_THROW(grover_iterate(wrong, b.op, counter), PreconditionError);
}

// ---------------------------------------------------------------------------
// Phase estimation

TEST(PhaseEstimation, FoldAndTheta) {
    const std::vector<double> d8{0.1, 0.2, 0.05, 0.05, 0.1, 0.1, 0.3, 0.1};
    const auto f = fold_distribution(d8);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_DOUBLE_EQ(f[0], 0.1);
    EXPECT_DOUBLE_EQ(f[1], 0.3);
    EXPECT_DOUBLE_EQ(f[2], 0.35);
    EXPECT_DOUBLE_EQ(f[4], 0.1);
    EXPECT_DOUBLE_EQ(theta_from_outcome(2, 3), pi / 4);
    EXPECT_DOUBLE_EQ(theta_from_outcome(6, 3), pi / 4);
    EXPECT_DOUBLE_EQ(theta_from_outcome(4, 3), pi / 2);
    EXPECT_EQ(theta_from_outcome(0, 3), 0.0);
}

TEST(PhaseEstimation, QuarterTurnIsExact) {
    const auto b = build({{1, 0}}, {});
    QueryCounter counter;
    const auto est = phase_estimate_theta(b.op, b.prepared, 3, counter);
    ASSERT_EQ(est.distribution.size(), 8u);
    EXPECT_NEAR(est.distribution[2] + est.distribution[6], 1.0, 1e-12);
    EXPECT_GE(est.distribution[2], 0.81 / 2);
    EXPECT_EQ(est.outcome, 2u);
    EXPECT_NEAR(est.theta_hat, pi / 4, 1e-15);
    EXPECT_EQ(est.iterate_applications, 7u);
    EXPECT_EQ(counter.count(), 7u * 2);
}

TEST(PhaseEstimation, NoErrorsReadsHalfTurn) {
    const auto b = build({{0, 0, 0, 0}}, {});
    QueryCounter counter;
    const auto est = phase_estimate_theta(b.op, b.prepared, 4, counter);
    EXPECT_NEAR(est.distribution[8], 1.0, 1e-12);
    EXPECT_NEAR(est.theta_hat, pi / 2, 1e-15);
    EXPECT_NEAR(b.op.c_hat() * std::pow(std::cos(est.theta_hat), 2), 0.0, 1e-30);
}

TEST(PhaseEstimation, AllErrorsReadsZero) {
    const auto b = build({{1, 1}}, {});
    QueryCounter counter;
    const auto est = phase_estimate_theta(b.op, b.prepared, 4, counter);
    EXPECT_NEAR(est.distribution[0], 1.0, 1e-12);
    EXPECT_EQ(est.theta_hat, 0.0);
}

TEST(PhaseEstimation, BestApproximationIsLikely) {
    std::mt19937_64 rng(9);
    for (int inst = 0; inst < 60; ++inst) {
        const auto b = random_built(rng);
        const int m = 2 + static_cast<int>(rng() % 5);
        const double theta = std::acos(std::sqrt(ancilla_one_probability(b.prepared)));
        QueryCounter counter;
        const auto est = phase_estimate_theta(b.op, b.prepared, m, counter);
        const double mm = static_cast<double>(std::size_t{1} << m);
        const auto nearest = static_cast<std::size_t>(std::lround(theta / pi * mm));
        const auto folded = fold_distribution(est.distribution);
        EXPECT_GE(folded[nearest], 4.0 / (pi * pi) - 1e-12);
        double total = 0.0;
        for (double p : est.distribution) total += p;
        EXPECT_NEAR(total, 1.0, 1e-10);
        EXPECT_LE(std::abs(est.theta_hat - theta), pi / mm + 1e-12);
    }
}

TEST(PhaseEstimation, DyadicPhaseHasTwoPointSupport) {
    // R / c = 1/2 with t = 2: theta = pi/4 for any m >= 2.
    const auto b = build({{1, 0, 1, 0}, {0, 0, 1, 1}}, {0.5});
    for (int m = 2; m <= 6; ++m) {
        QueryCounter counter;
        const auto est = phase_estimate_theta(b.op, b.prepared, m, counter);
        const std::size_t mm = std::size_t{1} << m;
        EXPECT_GE(est.distribution[mm / 4] + est.distribution[3 * mm / 4], 1.0 - 1e-10);
    }
}

TEST(PhaseEstimation, BackendsAgree) {
    std::mt19937_64 rng(10);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 1 + rng() % 4;
        const int t = 1 + static_cast<int>(rng() % 2);
        const auto b = build(qtest::random_error_table(rng, n, t, false), qtest::random_priors(rng, t - 1));
        const int m = 1 + static_cast<int>(rng() % 4);
        QueryCounter c1, c2;
        PhaseEstimationOptions full;
        full.backend = QpeBackend::full_register;
        const auto a = phase_estimate_theta(b.op, b.prepared, m, c1);
        const auto f = phase_estimate_theta(b.op, b.prepared, m, c2, full);
        for (std::size_t k = 0; k < a.distribution.size(); ++k) {
            EXPECT_NEAR(a.distribution[k], f.distribution[k], 1e-10);
        }
        EXPECT_EQ(c1.count(), c2.count());
        EXPECT_EQ(a.outcome, f.outcome);
    }
}

TEST(PhaseEstimation, SampledModeIsSeeded) {
    const auto b = build({{1, 0, 0}, {0.2, 0.7, 0.4}}, {1.0 / 3.0});
    PhaseEstimationOptions o;
    o.mode = ThetaMode::sampled;
    o.seed = 17;
    o.draw_key = 2;
    QueryCounter c;
    const auto a = phase_estimate_theta(b.op, b.prepared, 5, c, o);
    const auto a2 = phase_estimate_theta(b.op, b.prepared, 5, c, o);
    EXPECT_EQ(a.outcome, a2.outcome);
    EXPECT_GT(a.distribution[a.outcome], 0.0);
    // Over many keys the draws follow the distribution.
    std::vector<double> freq(32, 0.0);
    for (std::uint64_t key = 0; key < 4000; ++key) {
        o.draw_key = key;
        QueryCounter cc;
        freq[phase_estimate_theta(b.op, b.prepared, 5, cc, o).outcome] += 1.0 / 4000;
    }
    for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(freq[k], a.distribution[k], 0.03);
}

TEST(PhaseEstimation, Preconditions) {
    const auto b = build({{1, 0}}, {});
    QueryCounter c;
    EXPECT_THROW(phase_estimate_theta(b.op, b.prepared, 0, c), PreconditionError);
    PhaseEstimationOptions o;
    o.memory_cap = 64;
    EXPECT_THROW(phase_estimate_theta(b.op, b.prepared, 4, c, o), CapExceededError);
}

TEST(PhaseBits, Formula) {
    EXPECT_EQ(phase_bits_for(1.0, 0.1, 2), 6);
    EXPECT_EQ(phase_bits_for(2.0, 0.1, 2), 7);
    EXPECT_EQ(phase_bits_for(1.0, 0.05, 0), 5);
    EXPECT_EQ(phase_bits_for(1.0, 2.0, 2), 2);
    EXPECT_EQ(phase_bits_for(1.0, 2.0, 0), 1);
    EXPECT_EQ(quantum_iteration_queries(1, 3), 15u);
    EXPECT_EQ(quantum_iteration_queries(3, 6), 3u * 127);
}

// ---------------------------------------------------------------------------
// Training loop

TEST(QuantumTrain, DyadicMatchesClassical) {
    // t = 1: 2 of 4 wrong (R = 1/2); t = 2: weights stay 1, 2 of 4 wrong again.
    const auto sample = qtest::index_sample(4);
    const auto hs = qtest::table_classifiers({{1, 1, 0, 0}, {0, 1, 0, 1}, {0, 0, 0, 0}});
    const auto classical = train(hs, sample, 1);
    const auto quantum = quantum_train(hs, sample, 0.1, 1);
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_NEAR(quantum.model.alphas()[t], classical.model.alphas()[t], 1e-9) << "t=" << t + 1;
    }
}

TEST(QuantumTrain, QuarterErrorWithinOneGridStep) {
    // R = 1/4, c = 1: theta = pi/3 is not an m-bit fraction of pi.
    const auto sample = qtest::index_sample(4);
    const auto hs = qtest::table_classifiers({{0, 1, 0, 0}});
    QuantumTrainOptions o;
    o.phase_bits = 4;
    const auto res = quantum_train(hs, sample, 0.1, 1, o);
    const auto& rec = res.report.iterations[0];
    EXPECT_NEAR(rec.r_hat_exact, 0.25, 1e-12);
    EXPECT_LE(std::abs(rec.theta_hat - pi / 3), pi / 16);
    EXPECT_NE(rec.r_hat, 0.25);
}

TEST(QuantumTrain, QueryCountsFollowClosedForm) {
    std::mt19937_64 rng(11);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 1 + rng() % 8;
        const int t_max = 1 + static_cast<int>(rng() % 3);
        const auto q = qtest::random_error_table(rng, n, t_max, false);
        const auto res = quantum_train(qtest::table_classifiers(q), qtest::index_sample(n), 0.1, rng());
        std::uint64_t total = 0;
        for (const auto& rec : res.report.iterations) {
            EXPECT_EQ(rec.queries, quantum_iteration_queries(rec.t, rec.phase_bits));
            total += rec.queries;
            EXPECT_EQ(rec.cumulative_queries, total);
            EXPECT_EQ(rec.phase_bits, phase_bits_for(rec.c_hat, 0.1, 2));
        }
        EXPECT_EQ(res.report.total_queries, total);
    }
}

TEST(QuantumTrain, SingleIterationCount) {
    const auto res = quantum_train(qtest::table_classifiers({{0.3, 0.6, 0.1}}), qtest::index_sample(3), 0.1, 1);
    const int m = res.report.iterations[0].phase_bits;
    EXPECT_EQ(res.report.total_queries, 2 * ((std::uint64_t{1} << m) - 1) + 1);
}

TEST(QuantumTrain, HalvingEpsilonDoublesQueries) {
    const auto hs = qtest::table_classifiers({{0.3, 0.6, 0.1, 0.0}});
    const auto sample = qtest::index_sample(4);
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto a = quantum_train(hs, sample, eps, 1).report.total_queries;
        const auto b = quantum_train(hs, sample, eps / 2, 1).report.total_queries;
        const double ratio = static_cast<double>(b) / static_cast<double>(a);
        EXPECT_GE(ratio, 1.8);
        EXPECT_LE(ratio, 2.2);
    }
}

TEST(QuantumTrain, ExactEstimateMatchesOracleAndModelIsValid) {
    std::mt19937_64 rng(12);
    for (int inst = 0; inst < 30; ++inst) {
        const std::size_t n = 1 + rng() % 8;
        const int t_max = 1 + static_cast<int>(rng() % 4);
        const auto q = qtest::random_error_table(rng, n, t_max, false);
        const auto res = quantum_train(qtest::table_classifiers(q), qtest::index_sample(n), 0.1, 1);
        std::vector<double> prior;
        double running = 1.0;
        for (const auto& rec : res.report.iterations) {
            const auto ref = oracle::exact_iteration(q, prior, rec.t);
            EXPECT_NEAR(rec.r_hat_exact, ref.r_tilde, 1e-10);
            EXPECT_NEAR(rec.c_hat, ref.c_hat, 1e-12);
            EXPECT_GE(rec.c_hat_running, running);
            running = rec.c_hat_running;
            prior.push_back(rec.r_hat);
        }
        for (double c : res.model.c_hats()) EXPECT_GE(c, 1.0);
    }
}

TEST(QuantumTrain, MemoryCap) {
    QuantumTrainOptions o;
    o.memory_cap = 100;
    EXPECT_THROW(quantum_train(qtest::table_classifiers({{0.3, 0.6}}), qtest::index_sample(2), 0.01, 1, o),
                 CapExceededError);
    EXPECT_THROW(quantum_train({}, qtest::index_sample(2), 0.1, 1), PreconditionError);
    EXPECT_THROW(quantum_train(qtest::table_classifiers({{0.3, 0.6}}), qtest::index_sample(2), 0.0, 1),
                 PreconditionError);
}
