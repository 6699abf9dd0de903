#pragma once

namespace qpa::tol {

// Absolute, Frobenius-norm tolerances for matrices with entries of magnitude <= 1.
inline constexpr double herm = 1e-10;
inline constexpr double idem = 1e-10;
inline constexpr double orth = 1e-10;

inline constexpr double prob = 1e-9;
inline constexpr double psd = 1e-9;

// Relative singular-value cutoff: sigma > rank * sigma_max counts toward rank.
inline constexpr double rank = 1e-9;

// Least-squares residual above which a system is declared linearly infeasible.
inline constexpr double residual = 1e-8;

} // namespace qpa::tol
