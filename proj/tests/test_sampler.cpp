#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qpa/generators.hpp"
#include "qpa/sampler.hpp"

using namespace qpa;

namespace {

std::vector<MeasurementRecord> sample_family(const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<MeasurementRecord> out;
    for (const auto& b : standard_family(rho.dimension())) out.push_back(sample_measurement(rho, b, shots, rng));
    return out;
}

// Records whose frequencies equal the Born probabilities to ~1e-15.
std::vector<MeasurementRecord> exact_family(const DensityMatrix& rho) {
    constexpr double big = 1e15;
    std::vector<MeasurementRecord> out;
    for (const auto& b : standard_family(rho.dimension())) {
        MeasurementRecord r{b.label(), static_cast<std::uint64_t>(big), {}};
        std::uint64_t used = 0;
        for (std::size_t i = 0; i + 1 < b.dimension(); ++i) {
            r.counts.push_back(static_cast<std::uint64_t>(std::llround(big * oracle::trace_product(rho.matrix(), b[i].matrix()))));
            used += r.counts.back();
        }
        r.counts.push_back(r.shots - used);
        out.push_back(std::move(r));
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

} // namespace

TEST(SampleMeasurement, PureAlignedState) {
    const Basis b = standard_family(3)[0];
    const DensityMatrix rho = DensityMatrix::from_matrix(b[1].matrix());
    const auto r = sample_measurement(rho, b, 1000, 1);
    EXPECT_EQ(r.counts, (std::vector<std::uint64_t>{0, 1000, 0}));
    EXPECT_EQ(r.basis_label, "comp");
}

TEST(SampleMeasurement, FairCoinStaysNearHalf) {
    const Basis b = standard_family(2)[0];
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = sample_measurement(rho, b, 1000000, seed);
        EXPECT_EQ(r.counts[0] + r.counts[1], 1000000u);
        within += std::llabs(static_cast<long long>(r.counts[0]) - 500000) <= 1500;
    }
    EXPECT_GE(within, 99);
}

TEST(SampleMeasurement, FrequenciesConverge) {
    CounterRng rng(3);
    int good = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const DensityMatrix rho = interior_state(3, rng());
        const Basis b = random_unitary_basis(3, rng);
        const auto r = sample_measurement(rho, b, 100000, rng);
        double worst = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(static_cast<double>(r.counts[i]) / 1e5 - oracle::trace_product(rho.matrix(), b[i].matrix())));
        good += worst <= 0.01;
    }
    EXPECT_GE(good, 95);
}

TEST(SampleMeasurement, ChiSquareAggregate) {
    const DensityMatrix rho = interior_state(3, 4);
    const Basis b = dft_basis(3);
    CounterRng rng(5);
    std::vector<double> total(3, 0.0);
    const std::uint64_t draws = 1000, shots = 50;
    for (std::uint64_t d = 0; d < draws; ++d) {
        const auto r = sample_measurement(rho, b, shots, rng);
        for (std::size_t i = 0; i < 3; ++i) total[i] += static_cast<double>(r.counts[i]);
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double expected = static_cast<double>(draws * shots) * oracle::trace_product(rho.matrix(), b[i].matrix());
        chi2 += (total[i] - expected) * (total[i] - expected) / expected;
    }
    EXPECT_LT(chi2, 13.816); // two degrees of freedom, alpha = 0.001
}

TEST(SampleMeasurement, SeedReproducesCounts) {
    const DensityMatrix rho = interior_state(4, 6);
    const Basis b = dft_basis(4);
    EXPECT_EQ(sample_measurement(rho, b, 12345, 77).counts, sample_measurement(rho, b, 12345, 77).counts);
    EXPECT_NE(sample_measurement(rho, b, 12345, 77).counts, sample_measurement(rho, b, 12345, 78).counts);
}

TEST(SampleMeasurement, DimensionMismatch) {
    EXPECT_THROW(sample_measurement(DensityMatrix::maximally_mixed(2), dft_basis(3), 10, 0), Error);
}

TEST(EstimateOffDiagonal, ExactFrequencies) {
    const DensityMatrix rho = interior_state(4, 8);
    const auto records = exact_family(rho);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const auto e = estimate_offdiagonal(records, i, j);
            const Complex truth = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            EXPECT_NEAR(e.x, truth.real(), 1e-12);
            EXPECT_NEAR(e.y, truth.imag(), 1e-12);
        }
}

TEST(EstimateOffDiagonal, ErrorsAreCoveredByFourStandardErrors) {
    const DensityMatrix rho = interior_state(3, 9);
    const Complex truth = rho.matrix()(0, 2);
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto e = estimate_offdiagonal(sample_family(rho, 100000, seed), 0, 2);
        covered += std::abs(e.x - truth.real()) <= 4 * e.stderr_x && std::abs(e.y - truth.imag()) <= 4 * e.stderr_y;
    }
    EXPECT_GE(covered, 190);
}

TEST(EstimateOffDiagonal, SingleShotStaysBounded) {
    const DensityMatrix rho = interior_state(3, 10);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto e = estimate_offdiagonal(sample_family(rho, 1, seed), 0, 1);
        EXPECT_LE(std::abs(e.x), 1.0);
        EXPECT_LE(std::abs(e.y), 1.0);
        EXPECT_GT(e.stderr_x, 0.3);
        EXPECT_GT(e.stderr_y, 0.3);
    }
}

TEST(EstimateOffDiagonal, MissingRecord) {
    auto records = sample_family(DensityMatrix::maximally_mixed(3), 10, 0);
    records.erase(records.begin() + 1);
    try {
        estimate_offdiagonal(records, 0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingRecord);
    }
    EXPECT_NO_THROW(estimate_offdiagonal(records, 0, 2));
}

TEST(EstimateOffDiagonal, HoeffdingTailBound) {
    // x_hat - x is a mean of m centred Bernoulli draws shifted by the exact
    // diagonal, so P(|err| > t) <= 2 exp(-2 m t^2).
    const DensityMatrix rho = interior_state(2, 11);
    const Basis b = standard_family(2)[1];
    const double p = oracle::trace_product(rho.matrix(), b[0].matrix());
    const std::uint64_t m = 100;
    const double t = 0.1;
    CounterRng rng(12);
    int exceed = 0;
    const int trials = 4000;
    for (int k = 0; k < trials; ++k) {
        const auto r = sample_measurement(rho, b, m, rng);
        exceed += std::abs(static_cast<double>(r.counts[0]) / static_cast<double>(m) - p) > t;
    }
    EXPECT_LE(static_cast<double>(exceed) / trials, 2 * std::exp(-2.0 * static_cast<double>(m) * t * t));
}

TEST(ProjectToSimplex, Examples) {
    RealVector v(3);
    v << 0.5, 0.6, -0.1;
    const RealVector w = project_to_simplex(v);
    EXPECT_NEAR(w.sum(), 1.0, 1e-15);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_NEAR(w(0), 0.45, 1e-15);
    EXPECT_NEAR(w(1), 0.55, 1e-15);
    EXPECT_EQ(w(2), 0.0);

    RealVector inside(3);
    inside << 0.2, 0.3, 0.5;
    EXPECT_LT((project_to_simplex(inside) - inside).norm(), 1e-15);
}

TEST(Tomography, ExactProbabilitiesRecoverTheState) {
    for (std::size_t n = 2; n <= 5; ++n) {
        const DensityMatrix rho = interior_state(n, 20 + n);
        EXPECT_LT((tomography_exact(rho).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((tomography(exact_family(rho), n).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Tomography, ErrorShrinksWithShots) {
    const DensityMatrix rho = interior_state(3, 30);
    std::vector<double> medians;
    for (std::uint64_t shots : {1000u, 10000u, 100000u}) {
        std::vector<double> d;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
            d.push_back(trace_distance(tomography(sample_family(rho, shots, seed), 3).matrix(), rho.matrix()));
        medians.push_back(median(d));
    }
    EXPECT_GT(medians[0], medians[1]);
    EXPECT_GT(medians[1], medians[2]);
    EXPECT_LE(medians[2], 0.02);
}

TEST(Tomography, ReconstructionIsAlwaysADensityMatrix) {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const DensityMatrix est = tomography(sample_family(mixed, 3, seed), 3);
        EXPECT_GE(min_eigenvalue(est.matrix()), -1e-15);
        EXPECT_NEAR(est.matrix().trace().real(), 1.0, 1e-12);
    }
}

TEST(Tomography, MissingBasis) {
    auto records = sample_family(DensityMatrix::maximally_mixed(2), 10, 0);
    records.pop_back();
    EXPECT_THROW(tomography(records, 2), Error);
}

TEST(TraceDistance, Examples) {
    const ComplexMatrix a = oracle::bloch_state(0, 0, 1), b = oracle::bloch_state(0, 0, -1);
    EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
    EXPECT_NEAR(trace_distance(oracle::bloch_state(0.3, 0, 0), oracle::bloch_state(0, 0, 0)), 0.15, 1e-15);
}

TEST(Purify, PureStateNeedsNoAncilla) {
    const DensityMatrix rho = DensityMatrix::from_matrix(dft_basis(3)[1].matrix());
    const auto p = purify(rho);
    EXPECT_EQ(p.ancilla_dim, 1u);
    EXPECT_NEAR(p.state.norm(), 1.0, 1e-15);
}

TEST(Purify, MaximallyMixedQubitIsMaximallyEntangled) {
    const auto p = purify(DensityMatrix::maximally_mixed(2));
    ASSERT_EQ(p.ancilla_dim, 2u);
    // Schmidt coefficients are the singular values of the 2x2 reshaped state.
    Eigen::Matrix2cd c;
    c << p.state(0), p.state(1), p.state(2), p.state(3);
    const Eigen::Vector2d s = c.jacobiSvd().singularValues();
    EXPECT_NEAR(s(0), std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(s(1), std::sqrt(0.5), 1e-14);
}

TEST(Purify, PartialTraceRoundTrip) {
    CounterRng rng(40);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep) % 4;
        const DensityMatrix rho = interior_state(n, rng());
        const auto p = purify(rho);
        EXPECT_NEAR(p.state.norm(), 1.0, 1e-14);
        EXPECT_LE((partial_trace_ancilla(p.state, n, p.ancilla_dim) - rho.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(SecretSharing, LatticeStaysInsideTheCone) {
    SecretSharingConfig c;
    const auto lattice = secret_lattice(c);
    ASSERT_EQ(lattice.size(), c.k1);
    for (std::size_t t = 1; t < lattice.size(); ++t) {
        const double step = lattice[t].matrix()(0, 1).imag() - lattice[t - 1].matrix()(0, 1).imag();
        EXPECT_NEAR(step, c.lambda, 1e-14);
        EXPECT_GT(min_eigenvalue(lattice[t].matrix()), 0.0);
        // only the varied parameter moves
        ComplexMatrix diff = lattice[t].matrix() - lattice[t - 1].matrix();
        diff(0, 1) = diff(1, 0) = 0.0;
        EXPECT_LT(diff.norm(), 1e-15);
    }
}

TEST(SecretSharing, WideLatticeLeavesTheCone) {
    SecretSharingConfig c;
    c.lambda = 0.5;
    try {
        secret_lattice(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LatticeLeavesPsdCone);
    }
    c.lambda = 0.05;
    c.k1 = 1;
    EXPECT_THROW(secret_lattice(c), Error);
}

TEST(SecretSharing, FullCoalitionDecodesMissingPlayerGuesses) {
    SecretSharingConfig c;
    const auto rep = secret_share_demo(c);
    EXPECT_GE(rep.full_recovery_rate, 0.9);
    EXPECT_LE(rep.missing_player_recovery_rate, 1.0 / 8.0 + 0.05);
    std::uint64_t binned = 0;
    for (auto k : rep.per_parameter_error.counts) binned += k;
    EXPECT_EQ(binned, c.trials * 2 * params::pair_count(c.n));
    EXPECT_EQ(rep.per_parameter_error.edges.size(), rep.per_parameter_error.counts.size() + 1);
}

TEST(SecretSharing, NoShotsMeansGuessing) {
    SecretSharingConfig c;
    c.shots = 0;
    const auto rep = secret_share_demo(c);
    EXPECT_NEAR(rep.full_recovery_rate, 1.0 / 8.0, 0.06);
    EXPECT_NEAR(rep.missing_player_recovery_rate, 1.0 / 8.0, 0.06);
}

TEST(SecretSharing, Deterministic) {
    SecretSharingConfig c;
    c.trials = 50;
    const auto a = secret_share_demo(c), b = secret_share_demo(c);
    EXPECT_EQ(a.full_recovery_rate, b.full_recovery_rate);
    EXPECT_EQ(a.per_parameter_error.counts, b.per_parameter_error.counts);
}
