#pragma once

// Domain types: projectors, bases, probability vectors, assignments, and
// density matrices. Everything here is immutable once constructed; the
// factory functions are the only way in and they enforce the invariants.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpa/error.hpp"
#include "qpa/numerics.hpp"
#include "qpa/tolerances.hpp"

namespace qpa {

// ---------------------------------------------------------------------------
// Real parametrization of an n x n Hermitian matrix.
//
// Parameter vector layout (length n^2):
//   [a_1 .. a_n | x_jk for j<k in lexicographic order | y_jk, same order]
// with rho_jj = a_j and rho_jk = x_jk + i y_jk for j<k.
// ---------------------------------------------------------------------------
namespace params {

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }
inline std::size_t count(std::size_t n) { return n * n; }

/// Index of the pair (j,k), j<k, in lexicographic order (0-based indices).
inline std::size_t pair_index(std::size_t n, std::size_t j, std::size_t k) {
    return j * n - j * (j + 1) / 2 + (k - j - 1);
}
inline std::size_t diag(std::size_t, std::size_t j) { return j; }
inline std::size_t re(std::size_t n, std::size_t j, std::size_t k) { return n + pair_index(n, j, k); }
inline std::size_t im(std::size_t n, std::size_t j, std::size_t k) { return n + pair_count(n) + pair_index(n, j, k); }

/// Human-readable column labels, 1-based: a1, x12, y12, ...
inline std::vector<std::string> labels(std::size_t n) {
    std::vector<std::string> out(count(n));
    for (std::size_t j = 0; j < n; ++j) out[diag(n, j)] = "a" + std::to_string(j + 1);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const std::string tag = std::to_string(j + 1) + "," + std::to_string(k + 1);
            out[re(n, j, k)] = "x" + tag;
            out[im(n, j, k)] = "y" + tag;
        }
    return out;
}

/// Hermitian matrix with the given parameter vector. No trace or PSD checks.
inline ComplexMatrix to_matrix(std::size_t n, const RealVector& theta) {
    if (static_cast<std::size_t>(theta.size()) != count(n))
        throw Error(ErrorKind::DimensionMismatch, "parameter vector must have n^2 entries");
    ComplexMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) m(j, j) = theta(diag(n, j));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            const Complex z(theta(re(n, j, k)), theta(im(n, j, k)));
            m(j, k) = z;
            m(k, j) = std::conj(z);
        }
    return m;
}

inline RealVector from_matrix(const ComplexMatrix& m) {
    const auto n = static_cast<std::size_t>(m.rows());
    RealVector theta(count(n));
    for (std::size_t j = 0; j < n; ++j) theta(diag(n, j)) = m(j, j).real();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            theta(re(n, j, k)) = m(j, k).real();
            theta(im(n, j, k)) = m(j, k).imag();
        }
    return theta;
}

/// Coefficient row r with r . theta = Re tr(rho(theta) P) for Hermitian P.
inline RealVector trace_row(const ComplexMatrix& p) {
    const auto n = static_cast<std::size_t>(p.rows());
    RealVector row(count(n));
    for (std::size_t j = 0; j < n; ++j) row(diag(n, j)) = p(j, j).real();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            // rho_jk P_kj + rho_kj P_jk = 2 Re(rho_jk conj(P_jk))
            row(re(n, j, k)) = 2.0 * p(j, k).real();
            row(im(n, j, k)) = 2.0 * p(j, k).imag();
        }
    return row;
}

} // namespace params

// ---------------------------------------------------------------------------

class Projector {
public:
    /// Validates Hermiticity, idempotence and integral trace.
    static Projector from_matrix(ComplexMatrix m, std::optional<std::size_t> index = std::nullopt) {
        if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "projector is not square", index);
        if (!all_finite(m)) throw Error(ErrorKind::NonFiniteInput, "projector has NaN or Inf entries", index);
        if ((m - m.adjoint()).norm() > tol::herm)
            throw Error(ErrorKind::NotHermitian, "||P - P^*||_F exceeds tolerance", index);
        const double idem_err = (m * m - m).norm();
        if (idem_err > tol::idem)
            throw Error(ErrorKind::NotIdempotent, "||P^2 - P||_F = " + std::to_string(idem_err), index);
        const double tr = m.trace().real();
        const double rounded = std::round(tr);
        if (rounded < 1.0 || std::abs(tr - rounded) > static_cast<double>(m.rows()) * tol::idem)
            throw Error(ErrorKind::NotAProjector, "trace is not a positive integer", index);
        return Projector(std::move(m), static_cast<int>(rounded));
    }

    /// |v><v| for a unit vector v.
    static Projector from_vector(const ComplexVector& v, std::optional<std::size_t> index = std::nullopt) {
        return from_matrix(v * v.adjoint(), index);
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    int rank() const noexcept { return rank_; }
    Eigen::Index dimension() const noexcept { return m_.rows(); }

private:
    Projector(ComplexMatrix m, int rank) : m_(std::move(m)), rank_(rank) {}

    ComplexMatrix m_;
    int rank_;
};

/// Unit vector spanning a rank-1 projector, fixed up to a global phase by
/// making the component of largest modulus real and positive.
inline ComplexVector spanning_vector(const ComplexMatrix& p) {
    Eigen::Index col = 0;
    p.diagonal().real().maxCoeff(&col);
    ComplexVector v = p.col(col) / std::sqrt(p(col, col).real());
    return v / v.norm();
}

class Basis {
public:
    std::size_t dimension() const noexcept { return projectors_.size(); }
    const std::vector<Projector>& projectors() const noexcept { return projectors_; }
    const Projector& operator[](std::size_t i) const { return projectors_.at(i); }
    const std::string& label() const noexcept { return label_; }

    /// The orthonormal vectors behind the projectors, in order.
    ComplexVector vector(std::size_t i) const { return spanning_vector(projectors_.at(i).matrix()); }

private:
    friend Basis validate_basis(std::span<const ComplexMatrix>, std::string);
    Basis(std::vector<Projector> p, std::string label) : projectors_(std::move(p)), label_(std::move(label)) {}

    std::vector<Projector> projectors_;
    std::string label_;
};

/// Checks that the n matrices are mutually orthogonal rank-1 projectors
/// resolving the identity. Input order is preserved.
inline Basis validate_basis(std::span<const ComplexMatrix> candidate, std::string label = {}) {
    const std::size_t n = candidate.size();
    if (n == 0) throw Error(ErrorKind::DimensionMismatch, "basis has no projectors");
    std::vector<Projector> ps;
    ps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = candidate[i];
        if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n)
            throw Error(ErrorKind::DimensionMismatch,
                        "expected " + std::to_string(n) + "x" + std::to_string(n) + " projector", i);
        ps.push_back(Projector::from_matrix(m, i));
        if (ps.back().rank() != 1) throw Error(ErrorKind::NotRankOne, "trace is " + std::to_string(ps.back().rank()), i);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((ps[i].matrix() * ps[j].matrix()).norm() > tol::orth)
                throw Error(ErrorKind::NotComplete, "projector not orthogonal to projector " + std::to_string(i), j);
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& p : ps) sum += p.matrix();
    if ((sum - ComplexMatrix::Identity(n, n)).norm() > tol::orth)
        throw Error(ErrorKind::NotComplete, "projectors do not sum to the identity");
    return Basis(std::move(ps), std::move(label));
}

inline Basis validate_basis(const std::vector<ComplexMatrix>& candidate, std::string label = {}) {
    return validate_basis(std::span<const ComplexMatrix>(candidate), std::move(label));
}

/// Basis from n column vectors, each turned into |v><v|.
inline Basis basis_from_vectors(std::span<const ComplexVector> vectors, std::string label = {}) {
    std::vector<ComplexMatrix> ps;
    ps.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (static_cast<std::size_t>(vectors[i].size()) != vectors.size())
            throw Error(ErrorKind::DimensionMismatch, "vector length differs from vector count", i);
        ps.push_back(vectors[i] * vectors[i].adjoint());
    }
    return validate_basis(ps, std::move(label));
}

inline Basis basis_from_vectors(const std::vector<ComplexVector>& vectors, std::string label = {}) {
    return basis_from_vectors(std::span<const ComplexVector>(vectors), std::move(label));
}

/// Columns of a unitary matrix as a basis.
inline Basis basis_from_unitary(const ComplexMatrix& u, std::string label = {}) {
    std::vector<ComplexVector> cols;
    for (Eigen::Index j = 0; j < u.cols(); ++j) cols.emplace_back(u.col(j));
    return basis_from_vectors(cols, std::move(label));
}

class ProbabilityVector {
public:
    static ProbabilityVector from_values(std::vector<double> values) {
        if (values.empty()) throw Error(ErrorKind::InvalidProbabilities, "empty probability vector");
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) throw Error(ErrorKind::NonFiniteInput, "probability is NaN or Inf", i);
            if (values[i] < -tol::prob) throw Error(ErrorKind::InvalidProbabilities, "negative probability", i);
            sum += values[i];
        }
        if (std::abs(sum - 1.0) > tol::prob)
            throw Error(ErrorKind::InvalidProbabilities, "probabilities sum to " + std::to_string(sum));
        return ProbabilityVector(std::move(values));
    }

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_.at(i); }

private:
    explicit ProbabilityVector(std::vector<double> v) : values_(std::move(v)) {}
    std::vector<double> values_;
};

class Assignment {
public:
    Assignment(Basis basis, ProbabilityVector probs) : basis_(std::move(basis)), probs_(std::move(probs)) {
        if (probs_.size() != basis_.dimension())
            throw Error(ErrorKind::DimensionMismatch, "probability vector length differs from basis dimension");
    }

    const Basis& basis() const noexcept { return basis_; }
    const ProbabilityVector& probs() const noexcept { return probs_; }

private:
    Basis basis_;
    ProbabilityVector probs_;
};

class AssignmentSet {
public:
    explicit AssignmentSet(std::size_t dimension, std::vector<Assignment> assignments = {})
        : dimension_(dimension), assignments_(std::move(assignments)) {
        if (dimension_ == 0) throw Error(ErrorKind::DimensionMismatch, "dimension must be positive");
        for (std::size_t i = 0; i < assignments_.size(); ++i)
            if (assignments_[i].basis().dimension() != dimension_)
                throw Error(ErrorKind::DimensionMismatch, "assignment dimension differs from set dimension", i);
    }

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return assignments_.size(); }
    bool empty() const noexcept { return assignments_.empty(); }
    const std::vector<Assignment>& assignments() const noexcept { return assignments_; }
    const Assignment& operator[](std::size_t i) const { return assignments_.at(i); }

    AssignmentSet subset(std::span<const std::size_t> indices) const {
        std::vector<Assignment> picked;
        picked.reserve(indices.size());
        for (auto i : indices) picked.push_back(assignments_.at(i));
        return AssignmentSet(dimension_, std::move(picked));
    }

    AssignmentSet with(Assignment extra) const {
        auto copy = assignments_;
        copy.push_back(std::move(extra));
        return AssignmentSet(dimension_, std::move(copy));
    }

private:
    std::size_t dimension_;
    std::vector<Assignment> assignments_;
};

/// Hermitian, unit-trace matrix whose positivity has not been established.
class HermitianUnitTrace {
public:
    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    RealVector parameters() const { return params::from_matrix(m_); }

private:
    friend HermitianUnitTrace density_from_params(std::span<const double>, std::span<const double>,
                                                  std::span<const double>);
    friend HermitianUnitTrace density_from_param_vector(std::size_t, const RealVector&);
    explicit HermitianUnitTrace(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

inline HermitianUnitTrace density_from_param_vector(std::size_t n, const RealVector& theta) {
    if (!all_finite(theta)) throw Error(ErrorKind::NonFiniteInput, "parameter is NaN or Inf");
    double tr = 0.0;
    for (std::size_t j = 0; j < n; ++j) tr += theta(static_cast<Eigen::Index>(j));
    if (std::abs(tr - 1.0) > tol::prob)
        throw Error(ErrorKind::TraceNotOne, "diagonal sums to " + std::to_string(tr));
    return HermitianUnitTrace(params::to_matrix(n, theta));
}

/// Builds rho from diagonal a, and x, y indexed by pairs j<k in lexicographic order.
inline HermitianUnitTrace density_from_params(std::span<const double> a, std::span<const double> x,
                                              std::span<const double> y) {
    const std::size_t n = a.size();
    if (n == 0 || x.size() != params::pair_count(n) || y.size() != params::pair_count(n))
        throw Error(ErrorKind::DimensionMismatch, "need n diagonal and n(n-1)/2 off-diagonal parameters");
    RealVector theta(params::count(n));
    for (std::size_t j = 0; j < n; ++j) theta(j) = a[j];
    for (std::size_t p = 0; p < x.size(); ++p) {
        theta(n + p) = x[p];
        theta(n + x.size() + p) = y[p];
    }
    return density_from_param_vector(n, theta);
}

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and lambda_min >= -tol::psd.
    static DensityMatrix from_matrix(ComplexMatrix m) {
        if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "density matrix is not square");
        if (!all_finite(m)) throw Error(ErrorKind::NonFiniteInput, "density matrix has NaN or Inf entries");
        if (!is_hermitian(m)) throw Error(ErrorKind::NotHermitian, "density matrix differs from its adjoint");
        const double tr = m.trace().real();
        if (std::abs(tr - 1.0) > tol::prob) throw Error(ErrorKind::TraceNotOne, "trace is " + std::to_string(tr));
        const double lmin = min_eigenvalue(m);
        if (lmin < -tol::psd)
            throw Error(ErrorKind::InvalidProbabilities, "not positive semidefinite, lambda_min = " + std::to_string(lmin));
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix from(const HermitianUnitTrace& h) { return from_matrix(h.matrix()); }

    static DensityMatrix maximally_mixed(std::size_t n) {
        return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    RealVector parameters() const { return params::from_matrix(m_); }

    /// Born-rule probability tr(rho P).
    double probability(const ComplexMatrix& p) const { return (m_ * p).trace().real(); }

private:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

/// Splits a rank-k projector into k mutually orthogonal rank-1 projectors
/// summing to it. A rank-1 input is returned unchanged.
inline std::vector<Projector> decompose_projection(const ComplexMatrix& e) {
    Projector proj = [&] {
        try {
            return Projector::from_matrix(e);
        } catch (const Error& err) {
            throw Error(ErrorKind::NotAProjector, err.what());
        }
    }();
    if (proj.rank() == 1) return {proj};

    const auto eig = hermitian_eigen(proj.matrix());
    const Eigen::Index n = proj.dimension();
    std::vector<Projector> out;
    out.reserve(static_cast<std::size_t>(proj.rank()));
    // eigenvalues ascending: the top `rank` belong to the range of E
    for (Eigen::Index i = n - proj.rank(); i < n; ++i) {
        const ComplexVector v = eig.vectors.col(i).normalized();
        out.push_back(Projector::from_vector(v));
    }
    return out;
}

} // namespace qpa
