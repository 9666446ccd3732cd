#pragma once

// Preconditioners Q~ with Q~^T A Q~ close to diagonal, built from a
// binary32 spectral decomposition (then orthogonalized) or from a binary32
// tridiagonalization.

#include <string>
#include <string_view>
#include <vector>

#include "mpjacobi/densecore.hpp"
#include "mpjacobi/matrix.hpp"

namespace mpj {

enum class PrecondMethod { SpectralHHQR, SpectralMGS, SpectralNS, Tridiag };

enum class Orthogonalizer { HHQR, MGS, NewtonSchulz };

/// "hhqr", "mgs", "ns", "tridiag"
std::string_view to_string(PrecondMethod m);
PrecondMethod parse_precond_method(std::string_view s);

struct Preconditioner {
    Matrix<double> q_tilde;
    PrecondMethod method = PrecondMethod::SpectralHHQR;
    std::vector<double> lambda_low; ///< descending low-precision eigenvalue estimates
};

Preconditioner build_spectral(const SymMatrix<double>& a, Orthogonalizer orth,
                              LowBackend backend = LowBackend::Simulated);

Preconditioner build_tridiag(const SymMatrix<double>& a);

Preconditioner build_preconditioner(const SymMatrix<double>& a, PrecondMethod method,
                                    LowBackend backend = LowBackend::Simulated);

struct QualityReport {
    double p1_residual = 0.0;  ///< ||Q~^T Q~ - I||_2
    double off_ratio = 0.0;    ///< off(A~) / ||A||_F, A~ from the double-double sandwich
    double theta = 0.0;        ///< off(A~) / min_i a~_ii
    double kappaS_bound = 0.0; ///< (1 + theta)/(1 - theta), or inf when theta >= 1
    double kappa_limit = 0.0;  ///< largest kappa_2(A) allowed by assumption A2 for double-double
    bool underflow = false;
};

QualityReport precond_quality(const SymMatrix<double>& a, const Preconditioner& p);

} // namespace mpj
