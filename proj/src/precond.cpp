#include "mpjacobi/precond.hpp"

#include <cmath>
#include <limits>

#include "mpjacobi/jacobi.hpp"
#include "mpjacobi/linalg.hpp"
#include "mpjacobi/metrics.hpp"
#include "mpjacobi/mpjacobi.hpp"

namespace mpj {

std::string_view to_string(PrecondMethod m)
{
    switch (m) {
    case PrecondMethod::SpectralHHQR: return "hhqr";
    case PrecondMethod::SpectralMGS: return "mgs";
    case PrecondMethod::SpectralNS: return "ns";
    case PrecondMethod::Tridiag: return "tridiag";
    }
    return "?";
}

PrecondMethod parse_precond_method(std::string_view s)
{
    if (s == "hhqr")
        return PrecondMethod::SpectralHHQR;
    if (s == "mgs")
        return PrecondMethod::SpectralMGS;
    if (s == "ns")
        return PrecondMethod::SpectralNS;
    if (s == "tridiag")
        return PrecondMethod::Tridiag;
    throw DomainError("unknown preconditioner '" + std::string(s) + "' (expected hhqr, mgs, ns or tridiag)");
}

Preconditioner build_spectral(const SymMatrix<double>& a, Orthogonalizer orth, LowBackend backend)
{
    auto low = sym_eig_low(a, backend);
    Preconditioner p;
    p.lambda_low = std::move(low.lambda);
    switch (orth) {
    case Orthogonalizer::HHQR:
        p.q_tilde = hhqr_orth(low.q);
        p.method = PrecondMethod::SpectralHHQR;
        break;
    case Orthogonalizer::MGS:
        p.q_tilde = mgs_orth(low.q);
        p.method = PrecondMethod::SpectralMGS;
        break;
    case Orthogonalizer::NewtonSchulz:
        p.q_tilde = newton_schulz(low.q).q;
        p.method = PrecondMethod::SpectralNS;
        break;
    }
    return p;
}

Preconditioner build_tridiag(const SymMatrix<double>& a)
{
    if (prefer_reversed(a)) {
        auto p = build_tridiag(reverse_order(a));
        p.q_tilde = reverse_rows(std::move(p.q_tilde));
        return p;
    }
    const std::size_t n = a.n();
    Preconditioner p;
    p.method = PrecondMethod::Tridiag;
    const double amax = max_abs(a.full());
    if (n == 0 || amax == 0.0) {
        p.q_tilde = Matrix<double>::identity(n);
        p.lambda_low.assign(n, 0.0);
        return p;
    }
    // binary32 overflows long before binary64 does
    const int shift = -std::ilogb(amax) - 1;
    Matrix<double> scaled = a.full();
    for (double& x : scaled.values())
        x = std::ldexp(x, shift);

    auto tr = tridiagonalize(SymMatrix<double>::from_lower(std::move(scaled)), Tier::Low);
    const HouseholderSet<double> h = recompute_tau(std::move(tr.h));
    auto ep = tridiag_eig(tr.t);
    p.q_tilde = apply_reflectors(h, std::move(ep.q));
    p.lambda_low.reserve(n);
    for (double l : ep.lambda)
        p.lambda_low.push_back(std::ldexp(l, -shift));
    return p;
}

Preconditioner build_preconditioner(const SymMatrix<double>& a, PrecondMethod method, LowBackend backend)
{
    switch (method) {
    case PrecondMethod::SpectralHHQR: return build_spectral(a, Orthogonalizer::HHQR, backend);
    case PrecondMethod::SpectralMGS: return build_spectral(a, Orthogonalizer::MGS, backend);
    case PrecondMethod::SpectralNS: return build_spectral(a, Orthogonalizer::NewtonSchulz, backend);
    case PrecondMethod::Tridiag: return build_tridiag(a);
    }
    throw DomainError("build_preconditioner: unknown method");
}

QualityReport precond_quality(const SymMatrix<double>& a, const Preconditioner& p)
{
    QualityReport r;
    const std::size_t n = a.n();
    r.p1_residual = orthogonality_error(p.q_tilde);
    const SymMatrix<DDNumber> at_high = sandwich_high(p.q_tilde, a);
    const double fa = frobenius(a);
    r.off_ratio = fa > 0.0 ? off(at_high).to_double() / fa : 0.0;
    const Demoted d = demote_high_to_work(at_high);
    r.underflow = d.underflow;
    r.theta = n > 0 ? theta_sdd(d.a) : 0.0;
    r.kappaS_bound = kappaS_from_theta(r.theta);
    r.kappa_limit = a2_kappa_limit(n, Tier::High);
    return r;
}

} // namespace mpj
