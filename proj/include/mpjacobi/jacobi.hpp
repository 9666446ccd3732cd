#pragma once

// Two-sided cyclic Jacobi with the relative stopping criterion
// |a_ij| <= tol * sqrt(a_ii a_jj), at working precision or in double-double.

#include <cstddef>
#include <vector>

#include "mpjacobi/matrix.hpp"
#include "mpjacobi/multiprec.hpp"

namespace mpj {

template <class T>
struct JacobiReport {
    std::vector<T> lambda; ///< descending
    Matrix<T> q;           ///< accumulated rotations, columns match lambda; empty when not accumulated
    SymMatrix<T> final_matrix;
    int sweeps = 0;                 ///< sweeps that applied at least one rotation
    std::size_t rotations_applied = 0;
    bool converged = false;
    T final_off{};
    std::vector<T> off_history; ///< off(A) on entry, then after every sweep
};

struct JacobiOptions {
    double tol = 0.0; ///< 0 selects sqrt(n) times the unit roundoff of the arithmetic
    int max_sweeps = 30;
    bool accumulate = true;
    /// Accept diagonal entries of either sign, testing against |a_ii a_jj|.
    /// Used only to measure matrices that stopped being definite when rounded.
    bool allow_indefinite = false;
};

/// Frobenius norm of the off-diagonal part.
double off(const SymMatrix<double>& a);
DDNumber off(const SymMatrix<DDNumber>& a);

template <class T>
struct Rotation {
    T c;
    T s;
    T t; ///< tangent, |t| <= 1
};

/// Rotation that annihilates a_pq: t = sign(tau)/(|tau| + sqrt(1 + tau^2)),
/// tau = (a_qq - a_pp)/(2 a_pq).
template <class T>
Rotation<T> jacobi_rotation(const T& app, const T& aqq, const T& apq);

/// Throws IndefiniteMatrixError on a non-positive diagonal entry, on entry or
/// mid-iteration. Running out of sweeps is reported with converged == false.
JacobiReport<double> cyclic_jacobi(const SymMatrix<double>& a, const JacobiOptions& opt = {});

/// Same algorithm in double-double; default tol is sqrt(n) * 2^-104.
JacobiReport<DDNumber> cyclic_jacobi_dd(const SymMatrix<DDNumber>& a, const JacobiOptions& opt = {});

/// True when every off-diagonal pair satisfies the stopping criterion.
bool satisfies_criterion(const SymMatrix<double>& a, double tol);

} // namespace mpj
