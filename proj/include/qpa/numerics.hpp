#pragma once

// Small dense kernels used by the consistency solver: SVD-based numerical
// rank and minimum-norm least squares, Hermitian eigendecomposition, and a
// Cholesky-first positive-semidefiniteness test.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qpa/error.hpp"
#include "qpa/tolerances.hpp"

namespace qpa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = tol::herm) {
    return m.rows() == m.cols() && (m - m.adjoint()).norm() <= tol;
}

/// Real linear system over the n^2 real parameters of a Hermitian matrix.
struct RealLinearSystem {
    RealMatrix coefficients;
    RealVector rhs;
    std::vector<std::string> column_labels;
};

struct RankProfile {
    int rank = 0;
    std::vector<double> singular_values; // nonincreasing
    double threshold_used = 0.0;
};

namespace detail {

inline RankProfile profile_from_singular_values(const RealVector& sv, double rel_tol) {
    RankProfile p;
    p.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    p.threshold_used = rel_tol * smax;
    p.rank = static_cast<int>(std::count_if(p.singular_values.begin(), p.singular_values.end(),
                                            [&](double s) { return s > p.threshold_used; }));
    return p;
}

inline void require_finite(const RealMatrix& a, const char* what) {
    if (!all_finite(a)) throw Error(ErrorKind::NonFiniteInput, what);
}

} // namespace detail

/// Rank by thresholding singular values at tol::rank * sigma_max.
inline RankProfile numerical_rank(const RealMatrix& a, double rel_tol = tol::rank) {
    detail::require_finite(a, "coefficient matrix contains NaN or Inf");
    if (a.size() == 0) return {};
    Eigen::BDCSVD<RealMatrix> svd(a);
    return detail::profile_from_singular_values(svd.singularValues(), rel_tol);
}

struct LeastSquaresResult {
    RealVector solution;
    double residual_norm = 0.0;
    int nullspace_dim = 0;
    RealMatrix nullspace_basis; // columns are orthonormal
    RankProfile rank;
};

/// Minimum-norm least-squares solution of a x = b, with an orthonormal basis
/// of the numerical null space of a.
inline LeastSquaresResult least_squares(const RealMatrix& a, const RealVector& b, double rel_tol = tol::rank) {
    detail::require_finite(a, "coefficient matrix contains NaN or Inf");
    if (!all_finite(b)) throw Error(ErrorKind::NonFiniteInput, "right-hand side contains NaN or Inf");
    if (a.rows() != b.size()) throw Error(ErrorKind::DimensionMismatch, "rhs length differs from row count");

    const Eigen::Index cols = a.cols();
    LeastSquaresResult out;
    if (a.rows() == 0) {
        out.solution = RealVector::Zero(cols);
        out.nullspace_dim = static_cast<int>(cols);
        out.nullspace_basis = RealMatrix::Identity(cols, cols);
        return out;
    }

    Eigen::BDCSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
    out.rank = detail::profile_from_singular_values(svd.singularValues(), rel_tol);
    const int r = out.rank.rank;

    const RealMatrix& u = svd.matrixU();
    const RealMatrix& v = svd.matrixV();
    const RealVector& s = svd.singularValues();

    RealVector coeffs = u.leftCols(r).transpose() * b;
    for (int i = 0; i < r; ++i) coeffs(i) /= s(i);
    out.solution = v.leftCols(r) * coeffs;
    out.residual_norm = (a * out.solution - b).norm();
    out.nullspace_dim = static_cast<int>(cols) - r;
    out.nullspace_basis = v.rightCols(out.nullspace_dim);
    return out;
}

inline LeastSquaresResult least_squares_solve(const RealLinearSystem& sys) {
    if (sys.column_labels.size() != static_cast<std::size_t>(sys.coefficients.cols()))
        throw Error(ErrorKind::DimensionMismatch, "column labels do not match coefficient columns");
    return least_squares(sys.coefficients, sys.rhs);
}

struct HermitianEigen {
    RealVector values;     // nondecreasing
    ComplexMatrix vectors; // column i pairs with values(i)
};

inline HermitianEigen hermitian_eigen(const ComplexMatrix& m, double herm_tol = tol::herm) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
    if (!all_finite(m)) throw Error(ErrorKind::NonFiniteInput, "matrix contains NaN or Inf");
    if (!is_hermitian(m, herm_tol)) throw Error(ErrorKind::NotHermitian, "matrix differs from its adjoint");
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    return {es.eigenvalues(), es.eigenvectors()};
}

inline double min_eigenvalue(const ComplexMatrix& m) {
    return hermitian_eigen(m).values(0);
}

struct PsdCheck {
    bool is_psd = false;
    std::optional<ComplexMatrix> cholesky_factor; // lower factor of m + shift*I
    std::optional<double> min_eigenvalue;         // filled whenever the fast path fails
};

/// Cholesky of m + shift*I first; falls back to the spectrum when that fails.
/// The verdict is PSD iff lambda_min(m) >= -shift.
inline PsdCheck psd_check(const ComplexMatrix& m, double shift = tol::psd) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
    if (!all_finite(m)) throw Error(ErrorKind::NonFiniteInput, "matrix contains NaN or Inf");
    if (!is_hermitian(m)) throw Error(ErrorKind::NotHermitian, "matrix differs from its adjoint");

    const ComplexMatrix shifted = 0.5 * (m + m.adjoint()) + shift * ComplexMatrix::Identity(m.rows(), m.cols());
    Eigen::LLT<ComplexMatrix> llt(shifted);
    PsdCheck out;
    if (llt.info() == Eigen::Success) {
        out.is_psd = true;
        out.cholesky_factor = ComplexMatrix(llt.matrixL());
        return out;
    }
    const double lmin = min_eigenvalue(m);
    out.min_eigenvalue = lmin;
    out.is_psd = lmin >= -shift;
    return out;
}

} // namespace qpa
