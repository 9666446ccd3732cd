#pragma once

// The mixed-precision preconditioned Jacobi solver:
//   A~ = Q~^T A Q~ at high precision, demoted to binary64,
//   A~ = Q_J Lambda Q_J^T by cyclic Jacobi, Q = Q~ Q_J.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpjacobi/jacobi.hpp"
#include "mpjacobi/matrix.hpp"
#include "mpjacobi/multiprec.hpp"
#include "mpjacobi/precond.hpp"

namespace mpj {

/// Jacobi: plain cyclic Jacobi on A. MP2: sandwich at working precision.
/// MP3: sandwich in double-double.
enum class Variant { Jacobi, MP2, MP3 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct SolveConfig {
    Variant variant = Variant::MP3;
    PrecondMethod precond_method = PrecondMethod::SpectralHHQR;
    double tol = 0.0; ///< 0 selects sqrt(n) u
    int max_sweeps = 30;
    bool check_assumptions = true;
    bool accumulate = true;
    LowBackend backend = LowBackend::Simulated;
};

struct ScaledInput {
    SymMatrix<double> a;
    int exponent = 0; ///< a = 2^exponent * input
};

/// Power-of-two scaling bringing max |a_ij| into [2^-512, 2^512]; exponent 0
/// when it already is, or when A is zero.
ScaledInput scale_input(const SymMatrix<double>& a);

SymMatrix<DDNumber> sandwich_high(const Matrix<double>& qt, const SymMatrix<double>& a);
SymMatrix<double> sandwich_work(const Matrix<double>& qt, const SymMatrix<double>& a);

struct Demoted {
    SymMatrix<double> a;
    bool underflow = false; ///< some nonzero entry landed below the binary64 normal range
};

Demoted demote_high_to_work(const SymMatrix<DDNumber>& m);

struct AssumptionCheck {
    bool a1 = false;
    bool a2 = false;
    double a3_factor = 0.0; ///< 14 n u; A3 holds when a3_factor * kappaS(A~) < 1
};

/// Evaluates A1 and A2 for kappa_2(A) ~ kappa_est with p1 = 10 n by default.
/// tier_high selects u_h: Work for MP2, High for MP3.
AssumptionCheck check_assumptions(std::size_t n, double kappa_est, Tier tier_high, double p1 = 0.0);

/// Largest kappa_2(A) for which A2 holds at the given u_h, with p1 = 10 n.
double a2_kappa_limit(std::size_t n, Tier tier_high);

struct Diagnostics {
    int scale_exponent = 0;
    double kappa_estimate = 0.0; ///< from the low-precision eigenvalues
    std::optional<bool> a1;
    std::optional<bool> a2;
    std::optional<bool> a3;
    double off_ratio = 0.0; ///< off(A~)/||A~||_F of the matrix handed to Jacobi
    double theta = 0.0;
    bool underflow_warned = false;
    std::vector<std::string> warnings;
};

struct SpectralResult {
    std::vector<double> lambda; ///< descending
    Matrix<double> q;
    JacobiReport<double> report;
    Diagnostics diagnostics;
};

/// Throws IndefiniteMatrixError when Jacobi meets a non-positive pivot.
SpectralResult solve(const SymMatrix<double>& a, const SolveConfig& cfg = {});

/// solve() with a preconditioner built elsewhere (for example shared
/// between MP2 and MP3 runs). Ignored by the Jacobi variant.
SpectralResult solve_preconditioned(const SymMatrix<double>& a, const Preconditioner& p, const SolveConfig& cfg = {});

} // namespace mpj
