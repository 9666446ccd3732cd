#pragma once

// Small dense building blocks shared by the solver modules.

#include "mpjacobi/matrix.hpp"

namespace mpj {

/// C = A * B at working precision.
Matrix<double> matmul(const Matrix<double>& a, const Matrix<double>& b);

/// C = A^T * B at working precision.
Matrix<double> matmul_tn(const Matrix<double>& a, const Matrix<double>& b);

double frobenius(const Matrix<double>& a);
double frobenius(const SymMatrix<double>& a);
DDNumber frobenius(const SymMatrix<DDNumber>& a);

double max_abs(const Matrix<double>& a);

/// Q^T Q - I with each entry accumulated in double-double before rounding,
/// so the result measures Q itself rather than the cost of forming the Gram
/// matrix.
SymMatrix<double> gram_residual(const Matrix<double>& q);

} // namespace mpj
