#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpa/error.hpp"
#include "qpa/generators.hpp"
#include "qpa/model.hpp"
#include "qpa/numerics.hpp"
#include "qpa/rng.hpp"
#include "qpa/solver.hpp"

namespace qpa {

struct MeasurementRecord {
    std::string basis_label;
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> counts;
};

namespace detail {

// Multinomial draw as a chain of conditional binomials.
inline std::vector<std::uint64_t> multinomial(std::uint64_t shots, const std::vector<double>& p, CounterRng& rng) {
    std::vector<std::uint64_t> counts(p.size(), 0);
    std::uint64_t left = shots;
    double mass = 1.0;
    for (std::size_t i = 0; i + 1 < p.size() && left > 0; ++i) {
        const double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> bin(left, q);
        counts[i] = bin(rng);
        left -= counts[i];
        mass -= p[i];
    }
    if (!p.empty()) counts.back() += left;
    return counts;
}

inline std::vector<double> born_probabilities(const DensityMatrix& rho, const Basis& basis) {
    std::vector<double> p(basis.dimension());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::max(0.0, rho.probability(basis[i].matrix()));
        sum += p[i];
    }
    for (auto& x : p) x /= sum;
    return p;
}

inline std::string pair_label(const char* tag, std::size_t i, std::size_t j) {
    return std::string(tag) + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

inline const MeasurementRecord& find_record(const std::vector<MeasurementRecord>& records, const std::string& label) {
    for (const auto& r : records)
        if (r.basis_label == label) return r;
    throw Error(ErrorKind::MissingRecord, "no record for basis " + label);
}

} // namespace detail

inline MeasurementRecord sample_measurement(const DensityMatrix& rho, const Basis& basis, std::uint64_t shots,
                                            CounterRng& rng) {
    if (basis.dimension() != rho.dimension()) throw Error(ErrorKind::DimensionMismatch, "basis and state dimensions differ");
    return {basis.label(), shots, detail::multinomial(shots, detail::born_probabilities(rho, basis), rng)};
}

inline MeasurementRecord sample_measurement(const DensityMatrix& rho, const Basis& basis, std::uint64_t shots,
                                            std::uint64_t seed) {
    CounterRng rng(seed);
    return sample_measurement(rho, basis, shots, rng);
}

struct OffDiagonalEstimate {
    double x = 0.0;
    double y = 0.0;
    double stderr_x = 0.0;
    double stderr_y = 0.0;
};

/// Real and imaginary part of rho_ij (0-based i < j) from the computational
/// record and the "re(i,j)" / "im(i,j)" records of the standard family.
/// Standard errors use add-one smoothed frequencies so that they stay
/// positive at tiny shot counts.
inline OffDiagonalEstimate estimate_offdiagonal(const std::vector<MeasurementRecord>& records, std::size_t i,
                                                std::size_t j) {
    if (i >= j) throw Error(ErrorKind::MalformedInput, "need i < j");
    const auto& comp = detail::find_record(records, "comp");
    const auto& re = detail::find_record(records, detail::pair_label("re", i, j));
    const auto& im = detail::find_record(records, detail::pair_label("im", i, j));
    for (const auto* r : {&comp, &re, &im})
        if (r->shots == 0 || r->counts.size() <= j)
            throw Error(ErrorKind::MissingRecord, "record " + r->basis_label + " is empty or too short");

    const auto freq = [](const MeasurementRecord& r, std::size_t k) {
        return static_cast<double>(r.counts[k]) / static_cast<double>(r.shots);
    };
    const auto smoothed = [](double count, std::uint64_t shots) {
        const double p = (count + 1.0) / (static_cast<double>(shots) + 2.0);
        return p * (1.0 - p) / static_cast<double>(shots);
    };

    const double half_sum = 0.5 * (freq(comp, i) + freq(comp, j));
    OffDiagonalEstimate out;
    out.x = freq(re, i) - half_sum;
    out.y = half_sum - freq(im, i);

    const double var_diag = 0.25 * smoothed(static_cast<double>(comp.counts[i] + comp.counts[j]), comp.shots);
    out.stderr_x = std::sqrt(smoothed(static_cast<double>(re.counts[i]), re.shots) + var_diag);
    out.stderr_y = std::sqrt(smoothed(static_cast<double>(im.counts[i]), im.shots) + var_diag);
    return out;
}

/// Euclidean projection onto the probability simplex.
inline RealVector project_to_simplex(const RealVector& v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

/// Frobenius-nearest density matrix to a Hermitian matrix.
inline DensityMatrix nearest_density_matrix(const ComplexMatrix& m) {
    const auto eig = hermitian_eigen(0.5 * (m + m.adjoint()));
    const RealVector w = project_to_simplex(eig.values);
    ComplexMatrix rho = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    return DensityMatrix::from_matrix(rho / rho.trace().real());
}

/// Linear inversion of standard-family frequencies followed by projection
/// onto the density matrices.
inline DensityMatrix tomography(const std::vector<MeasurementRecord>& records, std::size_t n) {
    std::vector<Assignment> assignments;
    for (const auto& basis : standard_family(n)) {
        const auto& r = detail::find_record(records, basis.label());
        if (r.shots == 0 || r.counts.size() != n)
            throw Error(ErrorKind::MissingRecord, "record " + r.basis_label + " is empty or has the wrong length");
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(r.counts[i]) / static_cast<double>(r.shots);
        assignments.emplace_back(basis, ProbabilityVector::from_values(std::move(p)));
    }
    const AssignmentSet f(n, std::move(assignments));
    const RealLinearSystem sys = build_system(f);
    const LeastSquaresResult ls = least_squares(sys.coefficients, sys.rhs);
    return nearest_density_matrix(params::to_matrix(n, ls.solution));
}

/// Exact-probability inversion: the same pipeline fed with tr(rho P).
inline DensityMatrix tomography_exact(const DensityMatrix& rho) {
    const std::size_t n = rho.dimension();
    const AssignmentSet f = forward_assignments(rho, standard_family(n));
    const RealLinearSystem sys = build_system(f);
    const LeastSquaresResult ls = least_squares(sys.coefficients, sys.rhs);
    return nearest_density_matrix(params::to_matrix(n, ls.solution));
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    const auto eig = hermitian_eigen(0.5 * ((a - b) + (a - b).adjoint()));
    return 0.5 * eig.values.cwiseAbs().sum();
}

struct Purification {
    ComplexVector state;   // index i * ancilla_dim + k
    std::size_t ancilla_dim = 0;
};

/// sum_k sqrt(lambda_k) |v_k> (x) |k> over the nonzero spectrum of rho.
inline Purification purify(const DensityMatrix& rho, double cutoff = 1e-13) {
    const auto eig = hermitian_eigen(rho.matrix());
    const auto n = static_cast<Eigen::Index>(rho.dimension());
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = n - 1; k >= 0; --k)
        if (eig.values(k) > cutoff) kept.push_back(k);
    const auto r = static_cast<Eigen::Index>(kept.size());
    Purification out;
    out.ancilla_dim = static_cast<std::size_t>(r);
    out.state = ComplexVector::Zero(n * r);
    for (Eigen::Index a = 0; a < r; ++a) {
        const Eigen::Index k = kept[static_cast<std::size_t>(a)];
        const double amp = std::sqrt(eig.values(k));
        for (Eigen::Index i = 0; i < n; ++i) out.state(i * r + a) = amp * eig.vectors(i, k);
    }
    out.state.normalize();
    return out;
}

/// Traces out the second (ancilla) factor of a vector on C^n (x) C^r.
inline ComplexMatrix partial_trace_ancilla(const ComplexVector& psi, std::size_t n, std::size_t r) {
    if (static_cast<std::size_t>(psi.size()) != n * r) throw Error(ErrorKind::DimensionMismatch, "state length is not n*r");
    const auto nn = static_cast<Eigen::Index>(n), rr = static_cast<Eigen::Index>(r);
    ComplexMatrix out = ComplexMatrix::Zero(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i)
        for (Eigen::Index j = 0; j < nn; ++j)
            for (Eigen::Index k = 0; k < rr; ++k) out(i, j) += psi(i * rr + k) * std::conj(psi(j * rr + k));
    return out;
}

struct SecretSharingConfig {
    std::size_t n = 3;
    std::size_t k1 = 8;
    double lambda = 0.05;
    std::uint64_t shots = 10000;
    std::uint64_t trials = 500;
    std::uint64_t seed = 0;
    // The lattice varies Im rho_{varied_i, varied_j} (0-based).
    std::size_t varied_i = 0;
    std::size_t varied_j = 1;
};

struct Histogram {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
};

struct SecretSharingReport {
    double full_recovery_rate = 0.0;
    double missing_player_recovery_rate = 0.0;
    Histogram per_parameter_error;
    std::vector<DensityMatrix> lattice;
};

/// The K1 candidate secrets: a fixed interior state with one imaginary
/// off-diagonal parameter stepped by lambda, centred on its base value.
inline std::vector<DensityMatrix> secret_lattice(const SecretSharingConfig& c) {
    if (c.n < 2) throw Error(ErrorKind::DimensionTooSmall, "dimension must be at least 2");
    if (c.k1 < 2) throw Error(ErrorKind::MalformedInput, "k1 must be at least 2");
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw Error(ErrorKind::MalformedInput, "lambda must be positive");
    if (c.varied_i >= c.varied_j || c.varied_j >= c.n) throw Error(ErrorKind::MalformedInput, "bad varied pair");

    const auto n = static_cast<Eigen::Index>(c.n);
    const ComplexMatrix base = 0.75 * ComplexMatrix::Identity(n, n) / static_cast<double>(c.n) +
                               0.25 * interior_state(c.n, CounterRng(c.seed).split(0)()).matrix();
    const auto vi = static_cast<Eigen::Index>(c.varied_i), vj = static_cast<Eigen::Index>(c.varied_j);
    std::vector<DensityMatrix> out;
    for (std::size_t t = 0; t < c.k1; ++t) {
        const double offset = (static_cast<double>(t) - 0.5 * static_cast<double>(c.k1 - 1)) * c.lambda;
        ComplexMatrix m = base;
        m(vi, vj) += Complex(0.0, offset);
        m(vj, vi) = std::conj(m(vi, vj));
        if (min_eigenvalue(m) <= 0.0)
            throw Error(ErrorKind::LatticeLeavesPsdCone, "lattice point " + std::to_string(t) + " is not positive definite");
        out.push_back(DensityMatrix::from_matrix(m));
    }
    return out;
}

/// Monte Carlo of the (k, k) scheme: one player per real-part and
/// imaginary-part plane basis, diagonal handed out exactly. The secret is
/// decoded from the varied parameter's estimate by nearest lattice point
/// (ties to the smaller index); without the holder of that basis the
/// coalition can only guess.
inline SecretSharingReport secret_share_demo(const SecretSharingConfig& c) {
    SecretSharingReport out;
    out.lattice = secret_lattice(c);
    const std::size_t n = c.n;
    const std::vector<Basis> family = standard_family(n);
    const std::size_t pairs = params::pair_count(n);
    const auto vi = static_cast<Eigen::Index>(c.varied_i), vj = static_cast<Eigen::Index>(c.varied_j);

    std::vector<double> values;
    for (const auto& s : out.lattice) values.push_back(s.matrix()(vi, vj).imag());

    constexpr std::size_t bins = 20;
    const double span = c.lambda;
    out.per_parameter_error.counts.assign(bins, 0);
    for (std::size_t b = 0; b <= bins; ++b)
        out.per_parameter_error.edges.push_back(-span + 2.0 * span * static_cast<double>(b) / static_cast<double>(bins));
    auto bin_error = [&](double e) {
        const double u = (e + span) / (2.0 * span) * static_cast<double>(bins);
        const auto b = static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(bins) - 1.0));
        ++out.per_parameter_error.counts[b];
    };
    auto nearest = [&](double v) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < values.size(); ++t)
            if (std::abs(values[t] - v) < std::abs(values[best] - v)) best = t;
        return best;
    };

    const CounterRng base = CounterRng(c.seed).split(1);
    std::uint64_t full_hits = 0, missing_hits = 0;
    for (std::uint64_t trial = 0; trial < c.trials; ++trial) {
        CounterRng rng = base.split(trial);
        std::uniform_int_distribution<std::size_t> pick(0, c.k1 - 1);
        const std::size_t secret = pick(rng);
        const DensityMatrix& rho = out.lattice[secret];
        const ComplexMatrix& m = rho.matrix();

        std::size_t full_guess = pick(rng);
        const std::size_t missing_guess = pick(rng);
        if (c.shots > 0) {
            for (std::size_t a = 0, pair = 0; a < n; ++a) {
                for (std::size_t b = a + 1; b < n; ++b, ++pair) {
                    const auto i = static_cast<Eigen::Index>(a), j = static_cast<Eigen::Index>(b);
                    const double half_sum = 0.5 * (m(i, i).real() + m(j, j).real());
                    for (const bool imag : {false, true}) {
                        const Basis& basis = family[1 + pair + (imag ? pairs : 0)];
                        const auto rec = sample_measurement(rho, basis, c.shots, rng);
                        const double p = static_cast<double>(rec.counts[a]) / static_cast<double>(c.shots);
                        const double estimate = imag ? half_sum - p : p - half_sum;
                        bin_error(estimate - (imag ? m(i, j).imag() : m(i, j).real()));
                        if (imag && i == vi && j == vj) full_guess = nearest(estimate);
                    }
                }
            }
        }
        if (full_guess == secret) ++full_hits;
        if (missing_guess == secret) ++missing_hits;
    }
    if (c.trials > 0) {
        out.full_recovery_rate = static_cast<double>(full_hits) / static_cast<double>(c.trials);
        out.missing_player_recovery_rate = static_cast<double>(missing_hits) / static_cast<double>(c.trials);
    }
    return out;
}

} // namespace qpa
