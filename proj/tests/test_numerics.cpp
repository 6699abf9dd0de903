#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qpa/generators.hpp"
#include "qpa/numerics.hpp"
#include "qpa/solver.hpp"

using namespace qpa;

TEST(NumericalRank, Identity) { EXPECT_EQ(numerical_rank(RealMatrix::Identity(4, 4)).rank, 4); }

TEST(NumericalRank, RejectsNonFinite) {
    RealMatrix a = RealMatrix::Identity(2, 2);
    a(0, 1) = std::nan("");
    try {
        numerical_rank(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFiniteInput);
    }
}

TEST(NumericalRank, SingleBlockHasRankN) {
    CounterRng rng(3);
    for (std::size_t n = 2; n <= 6; ++n) {
        const Basis b = random_unitary_basis(n, rng);
        RealMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n * n));
        for (std::size_t i = 0; i < n; ++i) a.row(static_cast<Eigen::Index>(i)) = params::trace_row(b[i].matrix()).transpose();
        EXPECT_EQ(numerical_rank(a).rank, static_cast<int>(n));
    }
}

TEST(NumericalRank, ComputationalPlusPlaneBlock) {
    const auto fam = standard_family(3);
    const std::vector<Basis> two{fam[0], fam[1]};
    EXPECT_EQ(system_rank(two), 4);
}

TEST(NumericalRank, ProfileIsConsistent) {
    std::mt19937_64 g(1);
    std::normal_distribution<double> nd;
    RealMatrix a(6, 4);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(g);
    a.col(3) = a.col(0) + a.col(1);
    const auto p = numerical_rank(a);
    EXPECT_EQ(p.rank, 3);
    EXPECT_TRUE(std::is_sorted(p.singular_values.rbegin(), p.singular_values.rend()));
    EXPECT_DOUBLE_EQ(p.threshold_used, tol::rank * p.singular_values.front());
}

TEST(NumericalRank, InvariantUnderRowPermutationAndScaling) {
    std::mt19937_64 g(2);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int rows = 8, cols = 6, true_rank = 1 + rep % 6;
        RealMatrix l(rows, true_rank), r(true_rank, cols);
        for (Eigen::Index i = 0; i < l.size(); ++i) l.data()[i] = nd(g);
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = nd(g);
        const RealMatrix a = l * r;
        std::vector<int> perm(rows);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g);
        RealMatrix b(rows, cols);
        for (int i = 0; i < rows; ++i) b.row(i) = scale(g) * a.row(perm[static_cast<std::size_t>(i)]);
        EXPECT_EQ(numerical_rank(a).rank, true_rank);
        EXPECT_EQ(numerical_rank(b).rank, true_rank);
    }
}

TEST(LeastSquares, IdentitySystem) {
    const RealVector b = RealVector::LinSpaced(5, -1.0, 3.0);
    const auto ls = least_squares(RealMatrix::Identity(5, 5), b);
    EXPECT_LT((ls.solution - b).norm(), 1e-15);
    EXPECT_LT(ls.residual_norm, 1e-15);
    EXPECT_EQ(ls.nullspace_dim, 0);
}

TEST(LeastSquares, StandardFamilyRecoversSourceState) {
    for (std::size_t n = 2; n <= 5; ++n) {
        const DensityMatrix rho = interior_state(n, 40 + n);
        const auto sys = build_system(forward_assignments(rho, standard_family(n)));
        const auto ls = least_squares_solve(sys);
        EXPECT_LE(ls.residual_norm, 1e-10);
        EXPECT_EQ(ls.nullspace_dim, 0);
        EXPECT_LT((ls.solution - rho.parameters()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(LeastSquares, QubitCounterexampleIsLinearlyInfeasible) {
    const auto ls = least_squares_solve(build_system(dim2_example()));
    EXPECT_GT(ls.residual_norm, 1e-3);
}

TEST(LeastSquares, NullspaceIsOrthonormalAndAnnihilated) {
    std::mt19937_64 g(4);
    std::normal_distribution<double> nd;
    RealMatrix a(4, 7);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(g);
    RealVector x(7);
    for (Eigen::Index i = 0; i < 7; ++i) x(i) = nd(g);
    const auto ls = least_squares(a, a * x);
    EXPECT_EQ(ls.nullspace_dim, 3);
    EXPECT_LT(ls.residual_norm, 1e-10);
    EXPECT_LT((ls.nullspace_basis.transpose() * ls.nullspace_basis - RealMatrix::Identity(3, 3)).norm(), 1e-12);
    EXPECT_LT((a * ls.nullspace_basis).norm(), 1e-12);
    // minimum norm: orthogonal to the null space
    EXPECT_LT((ls.nullspace_basis.transpose() * ls.solution).norm(), 1e-12);
}

TEST(LeastSquares, ZeroResidualWheneverRhsIsInRange) {
    std::mt19937_64 g(5);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 100; ++rep) {
        const int rows = 3 + rep % 7, cols = 2 + rep % 5;
        RealMatrix a(rows, cols);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(g);
        RealVector x(cols);
        for (Eigen::Index i = 0; i < cols; ++i) x(i) = nd(g);
        EXPECT_LE(least_squares(a, a * x).residual_norm, 1e-10);
    }
}

TEST(HermitianEigen, Examples) {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 1;
    d(2, 2) = 2;
    const auto e = hermitian_eigen(d);
    EXPECT_NEAR(e.values(0), 1, 1e-15);
    EXPECT_NEAR(e.values(1), 2, 1e-15);
    EXPECT_NEAR(e.values(2), 3, 1e-15);

    ComplexMatrix m(2, 2);
    m << 0.5, 0.6, 0.6, 0.5;
    const auto e2 = hermitian_eigen(m);
    EXPECT_NEAR(e2.values(0), -0.1, 1e-14);
    EXPECT_NEAR(e2.values(1), 1.1, 1e-14);

    const auto eq = hermitian_eigen(dim3_bases().q[0].matrix());
    EXPECT_NEAR(eq.values(0), 0.0, 1e-12);
    EXPECT_NEAR(eq.values(1), 0.0, 1e-12);
    EXPECT_NEAR(eq.values(2), 1.0, 1e-12);

    ComplexMatrix nh = ComplexMatrix::Identity(2, 2);
    nh(0, 1) = 1.0;
    EXPECT_THROW(hermitian_eigen(nh), Error);
}

TEST(HermitianEigen, ReconstructsTheMatrix) {
    std::mt19937_64 g(6);
    for (int n = 1; n <= 8; ++n) {
        const auto m = oracle::random_hermitian(n, g);
        const auto e = hermitian_eigen(m);
        const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
        EXPECT_LE((back - m).norm(), 1e-10 * m.norm());
    }
}

TEST(PsdCheck, Examples) {
    EXPECT_TRUE(psd_check(ComplexMatrix::Identity(3, 3) / 3.0).is_psd);
    EXPECT_TRUE(psd_check(ComplexMatrix::Identity(3, 3) / 3.0).cholesky_factor.has_value());

    const double eps = 1e-3;
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5 + eps;
    m(2, 2) = -eps;
    const auto r = psd_check(m);
    EXPECT_FALSE(r.is_psd);
    ASSERT_TRUE(r.min_eigenvalue.has_value());
    EXPECT_NEAR(*r.min_eigenvalue, -eps, 1e-15);
}

TEST(PsdCheck, AgreesWithSpectrumOnRandomMatrices) {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    int disagreements = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 1 + rep % 6;
        const auto a = oracle::random_hermitian(n, g);
        // Place lambda_min near zero so both verdicts occur.
        const double lmin = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(a).eigenvalues()(0);
        const ComplexMatrix m = a + (shift(g) - lmin) * ComplexMatrix::Identity(n, n);
        const double truth = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m).eigenvalues()(0);
        if (psd_check(m).is_psd != (truth >= -tol::psd)) ++disagreements;
    }
    EXPECT_EQ(disagreements, 0);
}
