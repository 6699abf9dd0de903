#pragma once

// Consistency of quantum probability assignments.
//
// A family of (basis, probability vector) pairs is consistent when one
// density matrix rho reproduces every probability as tr(rho P). In the n^2
// real parameters of rho these are linear equations, so the decision splits
// into a linear part (least squares on the stacked blocks) and a positivity
// part (is there a PSD point on the affine solution set).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpa/error.hpp"
#include "qpa/model.hpp"
#include "qpa/numerics.hpp"
#include "qpa/rng.hpp"
#include "qpa/tolerances.hpp"

namespace qpa {

/// Trace row (sum of a_i = 1) followed by n rows per assignment, one per
/// projector: Re tr(rho P^k_i) = p^k_i. Every row of every block is kept;
/// redundancy is left to the rank computation.
inline RealLinearSystem build_system(const AssignmentSet& f) {
    const std::size_t n = f.dimension();
    const std::size_t rows = 1 + n * f.size();
    RealLinearSystem sys;
    sys.coefficients = RealMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(params::count(n)));
    sys.rhs = RealVector::Zero(static_cast<Eigen::Index>(rows));
    sys.column_labels = params::labels(n);

    for (std::size_t j = 0; j < n; ++j) sys.coefficients(0, static_cast<Eigen::Index>(j)) = 1.0;
    sys.rhs(0) = 1.0;

    Eigen::Index row = 1;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto& a = f[k];
        if (a.basis().dimension() != n) throw Error(ErrorKind::DimensionMismatch, "basis dimension differs", k);
        for (std::size_t i = 0; i < n; ++i, ++row) {
            sys.coefficients.row(row) = params::trace_row(a.basis()[i].matrix()).transpose();
            sys.rhs(row) = a.probs()[i];
        }
    }
    return sys;
}

/// Largest deviation |tr(rho P^k_i) - p^k_i| over the whole family.
inline double max_probability_error(const AssignmentSet& f, const ComplexMatrix& rho) {
    double worst = 0.0;
    for (const auto& a : f.assignments())
        for (std::size_t i = 0; i < f.dimension(); ++i)
            worst = std::max(worst, std::abs((rho * a.basis()[i].matrix()).trace().real() - a.probs()[i]));
    return worst;
}

enum class Verdict { Consistent, LinearlyInfeasible, PsdInfeasible, Undecided };

constexpr std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Consistent: return "Consistent";
        case Verdict::LinearlyInfeasible: return "LinearlyInfeasible";
        case Verdict::PsdInfeasible: return "PsdInfeasible";
        case Verdict::Undecided: return "Undecided";
    }
    return "Unknown";
}

struct ConsistencyReport {
    Verdict verdict = Verdict::Undecided;
    std::optional<DensityMatrix> witness;
    RankProfile rank_profile;
    double residual = 0.0;
    /// Best lambda_min found on the affine solution set (the least-squares
    /// candidate's lambda_min when the system is linearly infeasible).
    double psd_margin = 0.0;
    int nullspace_dim = 0;
    int iterations_used = 0;
    /// Certified upper bound on max lambda_min, when one was computed.
    std::optional<double> dual_bound;

    bool consistent() const noexcept { return verdict == Verdict::Consistent; }
};

struct SolverOptions {
    int budget = 5000;  // ascent iterations per start
    int restarts = 8;   // starts, the first at the minimum-norm solution
    std::uint64_t restart_seed = 0x9a1e5eedULL;
};

namespace detail {

// Scaling x, y columns by 1/sqrt(2) makes the Euclidean norm of the solver's
// coordinates equal the Frobenius norm of rho. Minimum-norm solutions and
// null-space directions are then independent of the basis orientation.
inline RealVector frobenius_scaling(std::size_t n) {
    RealVector d = RealVector::Constant(static_cast<Eigen::Index>(params::count(n)), 1.0 / std::sqrt(2.0));
    d.head(static_cast<Eigen::Index>(n)).setOnes();
    return d;
}

struct AffineSlice {
    std::size_t n = 0;
    ComplexMatrix offset;                  // particular solution
    std::vector<ComplexMatrix> directions; // Frobenius-orthonormal, traceless

    ComplexMatrix at(const RealVector& t) const {
        ComplexMatrix m = offset;
        for (std::size_t i = 0; i < directions.size(); ++i) m += t(static_cast<Eigen::Index>(i)) * directions[i];
        return m;
    }

    RealVector subgradient(const ComplexVector& v) const {
        RealVector g(static_cast<Eigen::Index>(directions.size()));
        for (std::size_t i = 0; i < directions.size(); ++i)
            g(static_cast<Eigen::Index>(i)) = v.dot(directions[i] * v).real();
        return g;
    }

    RealVector inner(const ComplexMatrix& z) const {
        RealVector g(static_cast<Eigen::Index>(directions.size()));
        for (std::size_t i = 0; i < directions.size(); ++i)
            g(static_cast<Eigen::Index>(i)) = (z * directions[i]).trace().real();
        return g;
    }
};

struct AscentResult {
    double best = -std::numeric_limits<double>::infinity();
    RealVector best_t;
    int iterations = 0;
};

// Projected subgradient ascent on the concave map t -> lambda_min(rho(t)),
// normalized steps of length step0 / sqrt(k).
inline AscentResult maximize_min_eigenvalue(const AffineSlice& slice, RealVector t, int budget) {
    constexpr double step0 = 0.5;
    constexpr int plateau = 1000;
    AscentResult out;
    out.best_t = t;
    int last_improvement = 0;
    for (int k = 1; k <= budget; ++k) {
        out.iterations = k;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(slice.at(t));
        const double lmin = es.eigenvalues()(0);
        if (lmin > out.best) {
            out.best = lmin;
            out.best_t = t;
            last_improvement = k;
        }
        const RealVector g = slice.subgradient(es.eigenvectors().col(0));
        const double gnorm = g.norm();
        if (gnorm < 1e-14) break; // zero subgradient: t is a maximizer
        if (k - last_improvement > plateau) break;
        t += (step0 / std::sqrt(static_cast<double>(k))) * (g / gnorm);
    }
    return out;
}

// Projects a candidate dual point onto tr(Z H_i) = 0, restores PSD-ness with
// a multiple of the identity and returns tr(Z rho), an upper bound on
// lambda_min over the whole slice.
inline double bound_from_dual_point(const AffineSlice& slice, const ComplexMatrix& z, const ComplexMatrix& rho) {
    const Eigen::Index n = z.rows();
    const RealVector g = slice.inner(z);
    ComplexMatrix corrected = z;
    for (std::size_t i = 0; i < slice.directions.size(); ++i)
        corrected -= g(static_cast<Eigen::Index>(i)) * slice.directions[i];
    corrected = 0.5 * (corrected + corrected.adjoint());
    const double shift = std::max(0.0, -Eigen::SelfAdjointEigenSolver<ComplexMatrix>(corrected).eigenvalues()(0));
    corrected += shift * ComplexMatrix::Identity(n, n);
    corrected /= corrected.trace().real();
    return (corrected * rho).trace().real();
}

// Upper bound on max_t lambda_min(rho(t)) from a dual point: any PSD Z with
// tr Z = 1 and tr(Z H_i) = 0 gives lambda_min(rho(t)) <= tr(Z rho(t)), which
// is constant on the slice. Z is sought among states supported on the
// low-lying eigenspace at the best point, then corrected onto the
// constraints and shifted back into the PSD cone with the identity.
inline double dual_upper_bound(const AffineSlice& slice, const ComplexMatrix& rho_best) {
    const Eigen::Index n = rho_best.rows();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_best);
    const RealVector& vals = es.eigenvalues();
    double bound = std::numeric_limits<double>::infinity();

    for (double width : {0.0, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1}) {
        Eigen::Index k = 1;
        while (k < n && vals(k) <= vals(0) + width) ++k;
        const ComplexMatrix v = es.eigenvectors().leftCols(k);

        // Frank-Wolfe on ||G(Z)||^2 over density matrices on span(v).
        ComplexMatrix z = v.col(0) * v.col(0).adjoint();
        RealVector g = slice.inner(z);
        for (int it = 0; it < 400 && g.norm() > 1e-15; ++it) {
            ComplexMatrix grad = ComplexMatrix::Zero(n, n);
            for (std::size_t i = 0; i < slice.directions.size(); ++i)
                grad += g(static_cast<Eigen::Index>(i)) * slice.directions[i];
            const ComplexMatrix compressed = v.adjoint() * grad * v;
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> ces(0.5 * (compressed + compressed.adjoint()));
            const ComplexVector w = v * ces.eigenvectors().col(0);
            const ComplexMatrix vertex = w * w.adjoint();
            const RealVector h = slice.inner(vertex) - g;
            const double hh = h.squaredNorm();
            if (hh <= 0.0) break;
            const double gamma = std::clamp(-g.dot(h) / hh, 0.0, 1.0);
            if (gamma == 0.0) break;
            z += gamma * (vertex - z);
            g += gamma * h;
        }

        bound = std::min(bound, bound_from_dual_point(slice, z, rho_best));
    }
    return bound;
}

struct BarrierResult {
    double best = -std::numeric_limits<double>::infinity();
    RealVector best_t;
    double dual_bound = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

// Log-barrier path for max s subject to rho(t) - s I > 0. Used when the
// subgradient ascent stalls near a degenerate minimum eigenvalue. Points on
// the central path carry the dual point mu (rho(t) - s I)^{-1}.
inline BarrierResult barrier_refine(const AffineSlice& slice, RealVector t) {
    const auto n = static_cast<Eigen::Index>(slice.n);
    const auto m = static_cast<Eigen::Index>(slice.directions.size());
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    BarrierResult out;

    auto lmin_at = [&](const RealVector& tt) { return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(slice.at(tt)).eigenvalues()(0); };
    double s = lmin_at(t) - 1.0;
    out.best = s + 1.0;
    out.best_t = t;

    auto objective = [&](const RealVector& tt, double ss, double mu, bool& ok) {
        Eigen::LLT<ComplexMatrix> llt(slice.at(tt) - ss * id);
        ok = llt.info() == Eigen::Success;
        if (!ok) return -std::numeric_limits<double>::infinity();
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
        return ss + mu * logdet;
    };

    for (double mu = 1.0; mu * static_cast<double>(n) > 1e-13; mu *= 0.2) {
        for (int it = 0; it < 60; ++it) {
            ++out.iterations;
            const ComplexMatrix w = (slice.at(t) - s * id).inverse();
            std::vector<ComplexMatrix> wd(static_cast<std::size_t>(m + 1));
            for (Eigen::Index k = 0; k < m; ++k) wd[static_cast<std::size_t>(k)] = w * slice.directions[static_cast<std::size_t>(k)];
            wd[static_cast<std::size_t>(m)] = -w;
            RealVector grad(m + 1);
            RealMatrix hess(m + 1, m + 1);
            for (Eigen::Index k = 0; k <= m; ++k) {
                grad(k) = mu * wd[static_cast<std::size_t>(k)].trace().real();
                for (Eigen::Index l = k; l <= m; ++l)
                    hess(k, l) = hess(l, k) =
                        -mu * (wd[static_cast<std::size_t>(k)] * wd[static_cast<std::size_t>(l)]).trace().real();
            }
            grad(m) += 1.0;
            const RealVector step = (-hess).ldlt().solve(grad);
            const double decrement = grad.dot(step);
            if (!(decrement > 1e-14)) break;

            bool ok = false;
            const double f0 = objective(t, s, mu, ok);
            double alpha = 1.0;
            for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
                const RealVector tt = t + alpha * step.head(m);
                const double ss = s + alpha * step(m);
                const double f1 = objective(tt, ss, mu, ok);
                if (ok && f1 >= f0 + 0.25 * alpha * decrement) {
                    t = tt;
                    s = ss;
                    break;
                }
            }
            if (alpha < 1e-15) break;
        }
        const double l = lmin_at(t);
        if (l > out.best) {
            out.best = l;
            out.best_t = t;
        }
        const ComplexMatrix rho = slice.at(t);
        out.dual_bound = std::min(out.dual_bound, bound_from_dual_point(slice, (rho - s * id).inverse(), rho));
        if (out.best >= 0.0) break;
    }
    return out;
}

inline DensityMatrix make_witness(ComplexMatrix rho) {
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    return DensityMatrix::from_matrix(std::move(rho));
}

} // namespace detail

/// Decides whether one density matrix reproduces every assignment in f.
///
/// Linear part: minimum-norm least squares; a residual above tol::residual
/// means no Hermitian matrix fits. If the solution is unique its spectrum
/// decides. Otherwise lambda_min is maximized over the affine solution set
/// (subgradient ascent, then a barrier path if that stalls below zero);
/// crossing -tol::psd proves consistency, a dual bound below -10 tol::psd
/// proves infeasibility, and anything in between is reported as Undecided.
inline ConsistencyReport check_consistency(const AssignmentSet& f, const SolverOptions& opt = {}) {
    const std::size_t n = f.dimension();
    const RealLinearSystem sys = build_system(f);
    const RealVector d = detail::frobenius_scaling(n);
    const RealMatrix scaled = sys.coefficients * d.asDiagonal();
    const LeastSquaresResult ls = least_squares(scaled, sys.rhs);
    const RealVector theta = d.asDiagonal() * ls.solution;

    ConsistencyReport rep;
    rep.rank_profile = ls.rank;
    rep.residual = (sys.coefficients * theta - sys.rhs).norm();
    rep.nullspace_dim = ls.nullspace_dim;

    const ComplexMatrix candidate = params::to_matrix(n, theta);
    if (rep.residual > tol::residual) {
        rep.verdict = Verdict::LinearlyInfeasible;
        rep.psd_margin = min_eigenvalue(candidate);
        return rep;
    }

    if (ls.nullspace_dim == 0) {
        ComplexMatrix rho = candidate / candidate.trace().real();
        rep.psd_margin = min_eigenvalue(rho);
        const PsdCheck psd = psd_check(rho, tol::psd);
        if (psd.is_psd) {
            rep.verdict = Verdict::Consistent;
            rep.witness = detail::make_witness(std::move(rho));
        } else {
            rep.verdict = Verdict::PsdInfeasible;
            rep.dual_bound = rep.psd_margin;
        }
        return rep;
    }

    detail::AffineSlice slice;
    slice.n = n;
    slice.offset = candidate;
    for (Eigen::Index i = 0; i < ls.nullspace_basis.cols(); ++i) {
        const RealVector dir = d.asDiagonal() * ls.nullspace_basis.col(i);
        slice.directions.push_back(params::to_matrix(n, dir));
    }

    const auto dim = static_cast<Eigen::Index>(slice.directions.size());
    const CounterRng base(opt.restart_seed);
    detail::AscentResult best;
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        RealVector t0 = RealVector::Zero(dim);
        if (r > 0) {
            CounterRng rng = base.split(static_cast<std::uint64_t>(r));
            std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
            for (Eigen::Index i = 0; i < dim; ++i) t0(i) = normal(rng);
        }
        const auto run = detail::maximize_min_eigenvalue(slice, t0, opt.budget);
        rep.iterations_used += run.iterations;
        if (run.best > best.best) best = run;
        if (best.best >= -tol::psd) break;
    }

    double dual = std::numeric_limits<double>::infinity();
    if (best.best < -tol::psd) {
        const auto refined = detail::barrier_refine(slice, best.best_t);
        rep.iterations_used += refined.iterations;
        dual = refined.dual_bound;
        if (refined.best > best.best) {
            best.best = refined.best;
            best.best_t = refined.best_t;
        }
    }

    rep.psd_margin = best.best;
    const ComplexMatrix rho_best = slice.at(best.best_t);
    if (best.best >= -tol::psd) {
        rep.verdict = Verdict::Consistent;
        rep.witness = detail::make_witness(rho_best);
        return rep;
    }
    rep.dual_bound = std::min(dual, detail::dual_upper_bound(slice, rho_best));
    rep.verdict = *rep.dual_bound < -10.0 * tol::psd ? Verdict::PsdInfeasible : Verdict::Undecided;
    return rep;
}

/// Cumulative numerical ranks as the blocks are added in the given order.
inline std::vector<int> rank_chain(const AssignmentSet& f, std::span<const std::size_t> order) {
    std::vector<bool> seen(f.size(), false);
    if (order.size() != f.size()) throw Error(ErrorKind::MalformedInput, "order is not a permutation of the assignments");
    for (auto i : order) {
        if (i >= f.size() || seen[i]) throw Error(ErrorKind::MalformedInput, "order is not a permutation of the assignments");
        seen[i] = true;
    }
    const RealLinearSystem full = build_system(f.subset(order));
    const Eigen::Index n = static_cast<Eigen::Index>(f.dimension());
    std::vector<int> ranks;
    ranks.reserve(order.size());
    for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(order.size()); ++k)
        ranks.push_back(numerical_rank(full.coefficients.topRows(1 + k * n)).rank);
    return ranks;
}

inline std::vector<int> rank_chain(const AssignmentSet& f) {
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return rank_chain(f, order);
}

/// Numerical rank of the combined blocks of a list of bases (plus trace row).
inline int system_rank(std::span<const Basis> bases) {
    if (bases.empty()) return 0;
    const std::size_t n = bases.front().dimension();
    RealMatrix a = RealMatrix::Zero(static_cast<Eigen::Index>(1 + n * bases.size()), static_cast<Eigen::Index>(n * n));
    a.row(0).head(static_cast<Eigen::Index>(n)).setOnes();
    Eigen::Index row = 1;
    for (std::size_t k = 0; k < bases.size(); ++k) {
        if (bases[k].dimension() != n) throw Error(ErrorKind::DimensionMismatch, "basis dimension differs", k);
        for (std::size_t i = 0; i < n; ++i) a.row(row++) = params::trace_row(bases[k][i].matrix()).transpose();
    }
    return numerical_rank(a).rank;
}

enum class PairKind { SamePermuted, PlanePair, GeneralPosition };

constexpr std::string_view to_string(PairKind k) noexcept {
    switch (k) {
        case PairKind::SamePermuted: return "SamePermuted";
        case PairKind::PlanePair: return "PlanePair";
        case PairKind::GeneralPosition: return "GeneralPosition";
    }
    return "Unknown";
}

struct PairStructure {
    PairKind kind = PairKind::GeneralPosition;
    /// (r, s) into the second basis and (j_r, j_s) into the first.
    std::optional<std::pair<std::size_t, std::size_t>> plane_second;
    std::optional<std::pair<std::size_t, std::size_t>> plane_first;
    /// Second-basis index -> first-basis index for the vectors shared up to phase.
    std::map<std::size_t, std::size_t> permutation;
    int rank_increment = 0;
};

/// Classifies how a second basis sits relative to a first one. A rank
/// increment of exactly one forces two vectors of the second basis into a
/// coordinate plane of the first, with every other vector shared.
inline PairStructure analyze_pair(const Basis& first, const Basis& second) {
    const std::size_t n = first.dimension();
    if (second.dimension() != n) throw Error(ErrorKind::DimensionMismatch, "bases have different dimensions");

    PairStructure out;
    const std::vector<Basis> both{first, second};
    out.rank_increment = system_rank(both) - static_cast<int>(n);

    // overlap(i, j) = |<e_i|b_j>|
    RealMatrix overlap(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<ComplexVector> e, b;
    for (std::size_t i = 0; i < n; ++i) {
        e.push_back(first.vector(i));
        b.push_back(second.vector(i));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            overlap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::abs(e[i].dot(b[j]));

    auto support = [&](std::size_t j) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (overlap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > tol::orth) s.push_back(i);
        return s;
    };

    if (out.rank_increment == 0) {
        std::vector<bool> used(n, false);
        for (std::size_t j = 0; j < n; ++j) {
            const auto s = support(j);
            if (s.size() != 1 || used[s[0]]) return out; // inconsistent with the rank: leave as general
            used[s[0]] = true;
            out.permutation[j] = s[0];
        }
        out.kind = PairKind::SamePermuted;
        return out;
    }
    if (out.rank_increment != 1) return out;

    std::vector<std::size_t> multi;
    std::map<std::size_t, std::size_t> singles;
    for (std::size_t j = 0; j < n; ++j) {
        const auto s = support(j);
        if (s.size() >= 2) {
            multi.push_back(j);
        } else if (s.size() == 1) {
            singles[j] = s[0];
        }
    }
    // Lexicographically smallest plane pair with matching two-element supports.
    for (std::size_t ai = 0; ai < multi.size(); ++ai)
        for (std::size_t bi = ai + 1; bi < multi.size(); ++bi) {
            const std::size_t r = multi[ai], s = multi[bi];
            const auto sr = support(r);
            if (sr.size() != 2 || support(s) != sr) continue;
            if (multi.size() != 2 || singles.size() != n - 2) continue;
            std::vector<bool> used(n, false);
            used[sr[0]] = used[sr[1]] = true;
            bool ok = true;
            for (const auto& [j, i] : singles) {
                if (used[i]) ok = false;
                used[i] = true;
            }
            if (!ok) continue;
            out.kind = PairKind::PlanePair;
            out.plane_second = {r, s};
            out.plane_first = {sr[0], sr[1]};
            out.permutation = singles;
            return out;
        }
    return out;
}

/// r-wise consistency for r = R_n implies global
/// consistency, and no smaller r does.
inline int consistency_number(int n) {
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "dimension must be at least 2");
    return n == 2 ? 4 : n * n - n + 1;
}

struct AuditResult {
    bool all_consistent = true;
    std::vector<std::size_t> failing_subset; // empty when all consistent
    std::optional<ConsistencyReport> failure_report;
    std::size_t subsets_checked = 0;
    /// Over the consistent subsets visited: smallest witness lambda_min and
    /// largest probability error of the witnesses.
    double min_witness_eigenvalue = std::numeric_limits<double>::infinity();
    double max_witness_error = 0.0;
};

/// Checks every subset of exactly r assignments in lexicographic order and
/// stops at the first one that is not Consistent.
inline AuditResult audit_subsets(const AssignmentSet& f, std::size_t r, const SolverOptions& opt = {}) {
    if (r < 1 || r > f.size()) throw Error(ErrorKind::MalformedInput, "subset size must be in [1, |F|]");
    AuditResult out;
    std::vector<std::size_t> idx(r);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t m = f.size();
    while (true) {
        const AssignmentSet sub = f.subset(idx);
        ConsistencyReport rep = check_consistency(sub, opt);
        ++out.subsets_checked;
        if (!rep.consistent()) {
            out.all_consistent = false;
            out.failing_subset = idx;
            out.failure_report = std::move(rep);
            return out;
        }
        out.min_witness_eigenvalue = std::min(out.min_witness_eigenvalue, min_eigenvalue(rep.witness->matrix()));
        out.max_witness_error = std::max(out.max_witness_error, max_probability_error(sub, rep.witness->matrix()));

        // next combination
        std::size_t pos = r;
        while (pos > 0 && idx[pos - 1] == m - r + (pos - 1)) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t k = pos; k < r; ++k) idx[k] = idx[k - 1] + 1;
    }
    return out;
}

} // namespace qpa
