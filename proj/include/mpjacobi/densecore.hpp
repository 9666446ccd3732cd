#pragma once

// Householder reflectors, tridiagonal reduction, the implicit QL tridiagonal
// eigensolver, and the three orthogonalizers (HHQR, MGS, Newton-Schulz).
//
// The tier-generic routines are templates over the scalar type: LowFloat for
// simulated binary32, float for native binary32, double for working
// precision and DDNumber for double-double.

#include <cstddef>
#include <span>
#include <vector>

#include "mpjacobi/matrix.hpp"
#include "mpjacobi/multiprec.hpp"

namespace mpj {

template <class T>
struct HouseholderVector {
    std::vector<T> v; ///< v[0] == 1
    T tau{};
    T beta{};
};

/// (I - tau v v^T) x = beta e1, beta = -sign(x0) ||x||. Returns the identity
/// reflector (tau = 0, beta = x0) when x has nothing below its first entry.
template <class T>
HouseholderVector<T> householder_vector(std::span<const T> x);

/// Reflectors from a tridiagonal reduction. Column j of V holds v_j with
/// v_j[j+1] == 1 and zeros above row j+1. tau[j] == 0 marks an identity
/// reflector.
template <class T>
struct HouseholderSet {
    Matrix<T> V;
    std::vector<T> tau;

    std::size_t n() const noexcept { return V.rows(); }
    std::size_t count() const noexcept { return tau.size(); }
};

template <class T>
struct TridiagMatrix {
    std::vector<T> diag;
    std::vector<T> offdiag;

    std::size_t n() const noexcept { return diag.size(); }
};

template <class T>
struct Tridiagonalization {
    TridiagMatrix<T> t;
    HouseholderSet<T> h;
};

/// A = Q_T T Q_T^T with Q_T = H_0 H_1 ... H_{n-3}.
template <class T>
Tridiagonalization<T> tridiagonalize(const SymMatrix<T>& a);

/// Runs the reduction at the requested tier (Low or Work) and returns the
/// results widened to binary64, which is exact.
Tridiagonalization<double> tridiagonalize(const SymMatrix<double>& a, Tier tier);

/// tau_j = 2 / ||v_j||^2 at working precision; identity reflectors keep
/// tau_j = 0. Throws DomainError on a zero column that is not marked identity.
HouseholderSet<double> recompute_tau(HouseholderSet<double> h);

/// Returns H_0 H_1 ... H_{k-1} B.
template <class T>
Matrix<T> apply_reflectors(const HouseholderSet<T>& h, Matrix<T> b);

Matrix<double> apply_reflectors(const HouseholderSet<double>& h, const Matrix<double>& b, Tier tier);

template <class T>
struct EigenPairs {
    Matrix<T> q;
    std::vector<T> lambda; ///< descending
};

/// Implicit QL with Wilkinson shift. Throws NonConvergenceError after 30 n
/// iterations.
template <class T>
EigenPairs<T> tridiag_eig(const TridiagMatrix<T>& t);

/// Full symmetric eigendecomposition at the precision of T (any sign).
template <class T>
EigenPairs<T> sym_eig(const SymMatrix<T>& a);

enum class LowBackend { Simulated, Native };

/// True when the last diagonal entry outweighs the first. Householder
/// reduction of a graded matrix should start from its large end, so callers
/// then work on J A J (J the reversal permutation).
bool prefer_reversed(const SymMatrix<double>& a);

/// J A J.
SymMatrix<double> reverse_order(const SymMatrix<double>& a);

/// J Q: maps eigenvectors of J A J back to eigenvectors of A.
Matrix<double> reverse_rows(Matrix<double> q);

/// Spectral decomposition of A carried out entirely in binary32 arithmetic
/// (tridiagonalization, QL and back-transformation). A is scaled by a power
/// of two internally so binary32 cannot overflow, and reduced from its
/// heavier end; eigenvalues are returned unscaled.
EigenPairs<double> sym_eig_low(const SymMatrix<double>& a, LowBackend backend = LowBackend::Simulated);

struct QrFactor {
    Matrix<double> q;
    std::vector<double> r_diag; ///< all >= 0 after the sign fix
};

/// Householder QR, explicit Q with the column signs chosen so diag(R) >= 0.
QrFactor householder_qr(const Matrix<double>& a);

/// Orthogonal QR factor of an almost-orthogonal matrix. Throws
/// InvalidPreconditionerError if some |r_jj| < n u ||Q_l||_F.
Matrix<double> hhqr_orth(const Matrix<double>& ql);

/// Single-pass modified Gram-Schmidt, same contract as hhqr_orth.
Matrix<double> mgs_orth(const Matrix<double>& ql);

struct NewtonSchulzResult {
    Matrix<double> q;
    int iterations = 0;
    double residual = 0.0; ///< ||Q^T Q - I||_F of the returned matrix
};

/// X <- X (3I - X^T X) / 2 until ||X^T X - I||_F <= n u. Throws
/// NonConvergenceError after 20 iterations.
NewtonSchulzResult newton_schulz(const Matrix<double>& ql);

inline Matrix<double> newton_schulz_orth(const Matrix<double>& ql) { return newton_schulz(ql).q; }

/// Largest absolute eigenvalue of a symmetric matrix.
double sym_norm2(const SymMatrix<double>& a);

/// Spectral norm via the Gram matrix.
double norm2(const Matrix<double>& a);

/// ||Q^T Q - I||_2 with the Gram residual accumulated in double-double.
double orthogonality_error(const Matrix<double>& q);

} // namespace mpj
