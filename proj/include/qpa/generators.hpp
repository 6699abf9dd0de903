#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qpa/error.hpp"
#include "qpa/model.hpp"
#include "qpa/numerics.hpp"
#include "qpa/rng.hpp"
#include "qpa/solver.hpp"
#include "qpa/tolerances.hpp"

namespace qpa {

namespace detail {

inline Complex cis(double angle) { return std::polar(1.0, angle); }

inline ComplexVector unit(std::size_t n, std::size_t i) {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(i)) = 1.0;
    return v;
}

inline ComplexMatrix matrix3(std::initializer_list<std::initializer_list<Complex>> rows) {
    ComplexMatrix m(3, 3);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (const auto& x : row) m(r, c++) = x;
        ++r;
    }
    return m;
}

// Basis {P, I - P} of a qubit.
inline Basis qubit_basis(const ComplexMatrix& p, std::string label) {
    const std::vector<ComplexMatrix> ps{p, ComplexMatrix::Identity(2, 2) - p};
    return validate_basis(ps, std::move(label));
}

inline Assignment assign(Basis b, std::vector<double> p) {
    return Assignment(std::move(b), ProbabilityVector::from_values(std::move(p)));
}

} // namespace detail

/// The four-basis qubit family whose every triple is consistent but which
/// is inconsistent as a whole.
inline AssignmentSet dim2_example() {
    using detail::qubit_basis;
    const Complex i{0.0, 1.0};
    ComplexMatrix p1(2, 2), p2(2, 2), p3(2, 2), p4(2, 2);
    p1 << 1.0, 0.0, 0.0, 0.0;
    p2 << 0.5, -0.5, -0.5, 0.5;
    p3 << 0.5, -0.5 * i, 0.5 * i, 0.5;
    p4 << 0.8, (6.0 + 8.0 * i) / 25.0, (6.0 - 8.0 * i) / 25.0, 0.2;

    std::vector<Assignment> a;
    a.push_back(detail::assign(qubit_basis(p1, "B1"), {0.5, 0.5}));
    a.push_back(detail::assign(qubit_basis(p2, "B2"), {5.0 / 12.0, 7.0 / 12.0}));
    a.push_back(detail::assign(qubit_basis(p3, "B3"), {3.0 / 8.0, 5.0 / 8.0}));
    a.push_back(detail::assign(qubit_basis(p4, "B4"), {9.0 / 16.0, 7.0 / 16.0}));
    return AssignmentSet(2, std::move(a));
}

struct Dim3Bases {
    std::vector<Basis> bases; // B1..B7
    Basis q;                  // {Q1, Q2, I - Q1 - Q2}
};

/// The seven simple qutrit bases and the extra general-position basis.
/// The (2,3) real-part basis carries the factor 1/2 that makes it a pair
/// of projectors.
inline Dim3Bases dim3_bases() {
    using detail::cis;
    using detail::matrix3;
    using std::numbers::pi;
    const Complex i{0.0, 1.0};
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);

    const std::vector<std::vector<ComplexMatrix>> first_two{
        {matrix3({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}), matrix3({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}})},
        {0.5 * matrix3({{1, 1, 0}, {1, 1, 0}, {0, 0, 0}}), 0.5 * matrix3({{1, -1, 0}, {-1, 1, 0}, {0, 0, 0}})},
        {0.5 * matrix3({{1, 0, 1}, {0, 0, 0}, {1, 0, 1}}), 0.5 * matrix3({{1, 0, -1}, {0, 0, 0}, {-1, 0, 1}})},
        {0.5 * matrix3({{0, 0, 0}, {0, 1, 1}, {0, 1, 1}}), 0.5 * matrix3({{0, 0, 0}, {0, 1, -1}, {0, -1, 1}})},
        {0.5 * matrix3({{1, -i, 0}, {i, 1, 0}, {0, 0, 0}}), 0.5 * matrix3({{1, i, 0}, {-i, 1, 0}, {0, 0, 0}})},
        {0.5 * matrix3({{1, 0, i}, {0, 0, 0}, {-i, 0, 1}}), 0.5 * matrix3({{1, 0, -i}, {0, 0, 0}, {i, 0, 1}})},
        {0.5 * matrix3({{0, 0, 0}, {0, 1, -i}, {0, i, 1}}), 0.5 * matrix3({{0, 0, 0}, {0, 1, i}, {0, -i, 1}})},
    };

    auto complete = [](const ComplexMatrix& a, const ComplexMatrix& b) {
        return std::vector<ComplexMatrix>{a, b, ComplexMatrix::Identity(3, 3) - a - b};
    };

    std::vector<Basis> bases;
    for (std::size_t k = 0; k < first_two.size(); ++k)
        bases.push_back(validate_basis(complete(first_two[k][0], first_two[k][1]), "B" + std::to_string(k + 1)));

    const ComplexMatrix q1 = matrix3({
        {1.0 / 3.0, cis(7 * pi / 12) / s6, cis(pi / 3) / (3 * s2)},
        {cis(-7 * pi / 12) / s6, 0.5, cis(-pi / 4) / (2 * s3)},
        {cis(-pi / 3) / (3 * s2), cis(pi / 4) / (2 * s3), 1.0 / 6.0},
    });
    const ComplexMatrix q2 = (6.0 / 11.0) * matrix3({
        {0.5, cis(-3 * pi / 4) / s6, cis(-pi / 3) / s2},
        {cis(3 * pi / 4) / s6, 1.0 / 3.0, cis(5 * pi / 12) / s3},
        {cis(pi / 3) / s2, cis(-5 * pi / 12) / s3, 1.0},
    });
    return {std::move(bases), validate_basis(complete(q1, q2), "Q")};
}

/// Computational basis, then one real-part plane basis per pair (i<j), then
/// one imaginary-part plane basis per pair, pairs in lexicographic order.
inline std::vector<Basis> standard_family(std::size_t n) {
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "dimension must be at least 2");
    using detail::unit;
    const Complex i{0.0, 1.0};
    const double h = 1.0 / std::sqrt(2.0);

    std::vector<Basis> out;
    {
        std::vector<ComplexVector> v;
        for (std::size_t k = 0; k < n; ++k) v.push_back(unit(n, k));
        out.push_back(basis_from_vectors(v, "comp"));
    }
    auto plane = [&](std::size_t a, std::size_t b, Complex phase, const std::string& tag) {
        std::vector<ComplexVector> v;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == a) v.push_back(h * (unit(n, a) + phase * unit(n, b)));
            else if (k == b) v.push_back(h * (unit(n, a) - phase * unit(n, b)));
            else v.push_back(unit(n, k));
        }
        return basis_from_vectors(v, tag + "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
    };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) out.push_back(plane(a, b, 1.0, "re"));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) out.push_back(plane(a, b, i, "im"));
    return out;
}

inline Basis dft_basis(std::size_t n) {
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "dimension must be at least 2");
    ComplexMatrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                norm * detail::cis(2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n));
    return basis_from_unitary(u, "dft");
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal moved into Q.
inline ComplexMatrix random_unitary(std::size_t n, CounterRng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto m = static_cast<Eigen::Index>(n);
    ComplexMatrix g(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c) {
            const double re = normal(rng);
            g(r, c) = Complex(re, normal(rng));
        }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < m; ++c) {
        const Complex d = r(c, c);
        if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
    }
    return q;
}

inline Basis random_unitary_basis(std::size_t n, CounterRng& rng, std::string label = "random") {
    return basis_from_unitary(random_unitary(n, rng), std::move(label));
}

/// Probabilities tr(rho P) for each basis, clipped into [0, 1] and
/// renormalized per block.
inline AssignmentSet forward_assignments(const DensityMatrix& rho, const std::vector<Basis>& bases) {
    const std::size_t n = rho.dimension();
    std::vector<Assignment> out;
    for (std::size_t k = 0; k < bases.size(); ++k) {
        if (bases[k].dimension() != n) throw Error(ErrorKind::DimensionMismatch, "basis dimension differs from state", k);
        std::vector<double> p(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = std::clamp(rho.probability(bases[k][i].matrix()), 0.0, 1.0);
            sum += p[i];
        }
        for (auto& x : p) x /= sum;
        out.push_back(detail::assign(bases[k], std::move(p)));
    }
    return AssignmentSet(n, std::move(out));
}

/// A^2 / tr(A^2); the caller is responsible for the spectrum bound.
inline DensityMatrix interior_state_from(const ComplexMatrix& a) {
    if (!is_hermitian(a)) throw Error(ErrorKind::NotHermitian, "generator matrix is not Hermitian");
    const ComplexMatrix h = 0.5 * (a + a.adjoint());
    ComplexMatrix sq = h * h;
    sq = 0.5 * (sq + sq.adjoint());
    const double t = sq.trace().real();
    if (!(t > 0.0)) throw Error(ErrorKind::ConstructionFailed, "generator matrix is zero");
    return DensityMatrix::from_matrix(sq / t);
}

/// Seeded full-rank state with lambda_min >= 0.01 / n.
inline DensityMatrix interior_state(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "dimension must be at least 2");
    const auto m = static_cast<Eigen::Index>(n);
    const double floor = 0.01 / static_cast<double>(n);
    const CounterRng base(seed);
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        CounterRng rng = base.split(attempt);
        std::normal_distribution<double> normal(0.0, 1.0);
        ComplexMatrix a(m, m);
        for (Eigen::Index r = 0; r < m; ++r) {
            a(r, r) = normal(rng);
            for (Eigen::Index c = r + 1; c < m; ++c) {
                const double re = normal(rng);
                a(r, c) = Complex(re, normal(rng)) / std::sqrt(2.0);
                a(c, r) = std::conj(a(r, c));
            }
        }
        DensityMatrix rho = interior_state_from(a);
        if (min_eigenvalue(rho.matrix()) >= floor) return rho;
    }
    throw Error(ErrorKind::ConstructionFailed, "no interior state after 100 attempts");
}

struct OptimalCounterexample {
    AssignmentSet assignments;
    DensityMatrix base_state;
    std::size_t perturbed_block = 0;
    std::size_t perturbed_index = 0;
    double perturbation = 0.0;
};

struct CounterexampleOptions {
    double margin = 1e-4;       // lambda_min required of every subset witness
    double min_residual = 1e-6; // residual required of the full family
    int bisection_steps = 60;
};

namespace detail {

struct PerturbationProbe {
    bool subsets_ok = false;
    double worst_subset_margin = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> worst_subset; // dropped block
    std::string worst_verdict;
    double full_residual = 0.0;
};

// Every leave-one-out subset must be Consistent with a witness of
// lambda_min >= margin; the full family's linear residual is also recorded.
inline PerturbationProbe probe(const AssignmentSet& f, double margin) {
    PerturbationProbe out;
    out.subsets_ok = true;
    const auto full = check_consistency(f);
    out.full_residual = full.residual;
    std::vector<std::size_t> idx;
    for (std::size_t drop = 0; drop < f.size(); ++drop) {
        idx.clear();
        for (std::size_t k = 0; k < f.size(); ++k)
            if (k != drop) idx.push_back(k);
        const auto rep = check_consistency(f.subset(idx));
        const double m = rep.witness ? min_eigenvalue(rep.witness->matrix()) : -std::numeric_limits<double>::infinity();
        if (m < out.worst_subset_margin) {
            out.worst_subset_margin = m;
            out.worst_subset = drop;
            out.worst_verdict = std::string(to_string(rep.verdict));
        }
        if (!rep.consistent() || m < margin) out.subsets_ok = false;
    }
    return out;
}

inline AssignmentSet replace_probs(const AssignmentSet& f, std::size_t block, std::vector<double> p) {
    std::vector<Assignment> a = f.assignments();
    a[block] = assign(a[block].basis(), std::move(p));
    return AssignmentSet(f.dimension(), std::move(a));
}

// Full-rank test for every leave-one-out subset that keeps the last basis.
inline bool leave_one_out_full_rank(const std::vector<Basis>& bases) {
    const int target = static_cast<int>(bases.front().dimension() * bases.front().dimension());
    for (std::size_t drop = 0; drop + 1 < bases.size(); ++drop) {
        std::vector<Basis> rest;
        for (std::size_t k = 0; k < bases.size(); ++k)
            if (k != drop) rest.push_back(bases[k]);
        if (system_rank(rest) < target) return false;
    }
    return true;
}

} // namespace detail

/// The standard family with its last imaginary-part basis replaced by a
/// general-position basis (the printed Q basis for n = 3, a seeded random
/// unitary basis otherwise), made inconsistent by moving the second
/// probability of that block.
inline std::vector<Basis> counterexample_bases(std::size_t n, std::uint64_t seed) {
    if (n < 3) throw Error(ErrorKind::DimensionTooSmall, "counterexample construction needs n >= 3");
    std::vector<Basis> bases = standard_family(n);
    bases.pop_back();
    if (n == 3) {
        bases.push_back(dim3_bases().q);
        return bases;
    }
    const CounterRng base = CounterRng(seed).split(1);
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        CounterRng rng = base.split(attempt);
        bases.push_back(random_unitary_basis(n, rng, "Q"));
        if (detail::leave_one_out_full_rank(bases)) return bases;
        bases.pop_back();
    }
    throw Error(ErrorKind::ConstructionFailed, "no general-position replacement basis after 100 attempts");
}

/// Bisects on the offset delta added to the second entry of the replaced
/// block (then renormalized): delta = 0 keeps every subset consistent, and
/// the search looks for the first delta where the full family's residual
/// reaches min_residual while every leave-one-out subset keeps a witness
/// with lambda_min >= margin.
inline OptimalCounterexample optimal_counterexample(std::size_t n, std::uint64_t seed,
                                                    const CounterexampleOptions& opt = {}) {
    const std::vector<Basis> bases = counterexample_bases(n, seed);
    DensityMatrix rho = interior_state(n, CounterRng(seed).split(2)());
    const AssignmentSet base = forward_assignments(rho, bases);
    const std::size_t block = bases.size() - 1;
    const std::size_t entry = 1;
    const std::vector<double> p0 = base[block].probs().values();
    const double sign = p0[entry] <= 0.5 ? 1.0 : -1.0;

    auto perturbed = [&](double delta) {
        std::vector<double> p = p0;
        p[entry] += sign * delta;
        const double total = 1.0 + sign * delta;
        for (auto& x : p) x /= total;
        return detail::replace_probs(base, block, std::move(p));
    };

    double lo = 0.0;
    double hi = sign > 0 ? 0.5 : std::min(0.5, p0[entry]);
    detail::PerturbationProbe at_lo = detail::probe(base, opt.margin);
    detail::PerturbationProbe at_hi;
    for (int step = 0; step < opt.bisection_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        const auto f = perturbed(mid);
        const auto pr = detail::probe(f, opt.margin);
        if (pr.subsets_ok && pr.full_residual >= opt.min_residual)
            return {f, std::move(rho), block, entry, sign * mid};
        if (pr.subsets_ok) {
            lo = mid;
            at_lo = pr;
        } else {
            hi = mid;
            at_hi = pr;
        }
    }

    std::ostringstream msg;
    msg.precision(3);
    msg << "bisection exhausted after " << opt.bisection_steps << " steps: at delta=" << lo
        << " full residual " << at_lo.full_residual << " < " << opt.min_residual << "; at delta=" << hi;
    if (at_hi.worst_subset)
        msg << " the subset without block " << *at_hi.worst_subset << " is " << at_hi.worst_verdict
            << " (lambda_min " << at_hi.worst_subset_margin << ")";
    throw Error(ErrorKind::ConstructionFailed, msg.str());
}

} // namespace qpa
