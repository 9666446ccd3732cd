#pragma once

// Condition numbers, forward errors and the a-priori bounds, all measured
// with the double-double Jacobi oracle.

#include <optional>
#include <span>
#include <vector>

#include "mpjacobi/matrix.hpp"
#include "mpjacobi/multiprec.hpp"

namespace mpj {

/// Eigenvalues of A, descending, from cyclic Jacobi run in double-double.
std::vector<DDNumber> reference_eigenvalues(const SymMatrix<double>& a, bool allow_indefinite = false);
std::vector<DDNumber> reference_eigenvalues(const SymMatrix<DDNumber>& a, bool allow_indefinite = false);

/// kappa_2(D A D) with D = diag(a_ii^{-1/2}). Throws DomainError on a
/// non-positive diagonal entry.
double scaled_cond(const SymMatrix<double>& a);
double scaled_cond(const SymMatrix<DDNumber>& a);

/// lambda_1 / lambda_n. Throws IndefiniteMatrixError if lambda_n <= 0.
double cond2(const SymMatrix<double>& a);
double cond2(const SymMatrix<DDNumber>& a);

// max|lambda| / min|lambda|, for matrices such as Hilbert(20) whose binary64
// rounding is no longer positive definite. Infinite for a singular matrix.
double cond2_abs(const SymMatrix<double>& a);
double cond2_abs(const SymMatrix<DDNumber>& a);
double scaled_cond_abs(const SymMatrix<double>& a);
double scaled_cond_abs(const SymMatrix<DDNumber>& a);

struct ErrorProfile {
    std::vector<double> per_eigenvalue_rel_error;
    double max_rel_error = 0.0;
    double bound_7n_kappaS_u = std::numeric_limits<double>::quiet_NaN(); ///< NaN unless kappaS(A~) given
};

ErrorProfile forward_errors(std::span<const double> computed, std::span<const double> ref,
                            std::optional<double> kappaS_At = std::nullopt);
ErrorProfile forward_errors(std::span<const double> computed, std::span<const DDNumber> ref,
                            std::optional<double> kappaS_At = std::nullopt);

/// 7 n kappa u, the plotted surrogate of the main error bound.
double bound_7n_kappa_u(std::size_t n, double kappaS);

/// off(A) / min_i a_ii.
double theta_sdd(const SymMatrix<double>& a);

/// (1 + theta)/(1 - theta) for theta < 1, +inf otherwise.
double kappaS_from_theta(double theta);

/// n e prod d_i / lambda_i with diagonal entries and eigenvalues both sorted
/// descending; +inf if the product overflows.
double hadamard_bound(const SymMatrix<double>& a);

/// n (2u + 2u/sqrt(1 - 2u) + 2u/(1 - 2u)).
double c_nu(std::size_t n, double u);

} // namespace mpj
