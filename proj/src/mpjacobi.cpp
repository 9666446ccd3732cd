#include "mpjacobi/mpjacobi.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "mpjacobi/kernels.hpp"
#include "mpjacobi/linalg.hpp"
#include "mpjacobi/metrics.hpp"

namespace mpj {

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::Jacobi: return "jacobi";
    case Variant::MP2: return "mp2";
    case Variant::MP3: return "mp3";
    }
    return "?";
}

Variant parse_variant(std::string_view s)
{
    if (s == "jacobi")
        return Variant::Jacobi;
    if (s == "mp2")
        return Variant::MP2;
    if (s == "mp3")
        return Variant::MP3;
    throw DomainError("unknown variant '" + std::string(s) + "' (expected jacobi, mp2 or mp3)");
}

ScaledInput scale_input(const SymMatrix<double>& a)
{
    const double amax = max_abs(a.full());
    for (double x : a.full().values())
        if (!std::isfinite(x))
            throw DomainError("scale_input: matrix has a non-finite entry");
    if (amax == 0.0)
        return {a, 0};
    const int e = std::ilogb(amax);
    int shift = 0;
    if (e >= 512)
        shift = 511 - e;
    else if (e < -512)
        shift = -512 - e;
    if (shift == 0)
        return {a, 0};
    Matrix<double> m = a.full();
    for (double& x : m.values())
        x = std::ldexp(x, shift);
    return {SymMatrix<double>::from_lower(std::move(m)), shift};
}

SymMatrix<DDNumber> sandwich_high(const Matrix<double>& qt, const SymMatrix<double>& a)
{
    const std::size_t n = a.n();
    if (qt.rows() != n || qt.cols() != n)
        throw DomainError("sandwich_high: preconditioner and matrix sizes differ");
    const auto& k = kernels::active();
    const Matrix<double> qtt = qt.transposed();

    // M = Q~^T A, column by column: M(:,j) = sum_p Q~^T(:,p) a_pj, products exact
    Matrix<DDNumber> m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < n; ++p) {
            const double apj = a(p, j);
            if (apj != 0.0)
                k.dd_axpy_d(m.col(j).data(), qtt.col(p).data(), n, apj);
        }
    // A~ = M Q~
    Matrix<DDNumber> at(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < n; ++p) {
            const double qpj = qt(p, j);
            if (qpj != 0.0)
                k.dd_axpy_dd(at.col(j).data(), m.col(p).data(), n, qpj);
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) {
            const DDNumber s = dd_mul(dd_add(at(i, j), at(j, i)), 0.5);
            at(i, j) = s;
            at(j, i) = s;
        }
    return SymMatrix<DDNumber>::from_lower(std::move(at));
}

SymMatrix<double> sandwich_work(const Matrix<double>& qt, const SymMatrix<double>& a)
{
    if (qt.rows() != a.n() || qt.cols() != a.n())
        throw DomainError("sandwich_work: preconditioner and matrix sizes differ");
    Matrix<double> at = matmul(matmul_tn(qt, a.full()), qt);
    const std::size_t n = a.n();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i)
            at(i, j) = 0.5 * (at(i, j) + at(j, i));
    return SymMatrix<double>::from_lower(std::move(at));
}

Demoted demote_high_to_work(const SymMatrix<DDNumber>& m)
{
    const std::size_t n = m.n();
    Matrix<double> r(n, n);
    bool underflow = false;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
            const DDNumber x = m(i, j);
            if (!std::isfinite(x.hi))
                throw DomainError("demote_high_to_work: non-finite entry");
            const double v = x.to_double();
            if (!x.is_zero() && std::fabs(v) < DBL_MIN)
                underflow = true;
            r(i, j) = v;
        }
    return {SymMatrix<double>::from_lower(std::move(r)), underflow};
}

AssumptionCheck check_assumptions(std::size_t n, double kappa_est, Tier tier_high, double p1)
{
    const double u = kUnitRoundoffWork;
    const double nd = static_cast<double>(n);
    if (p1 <= 0.0)
        p1 = 10.0 * nd;
    AssumptionCheck c;
    c.a1 = 10.0 * std::pow(nd, 1.5) * u / (1.0 - p1 * u) * kappa_est < 1.0;
    c.a2 = gamma(n, tier_high) < u * (1.0 - p1 * u) / (16.0 * std::sqrt(nd) * kappa_est);
    c.a3_factor = 14.0 * nd * u;
    return c;
}

double a2_kappa_limit(std::size_t n, Tier tier_high)
{
    if (n == 0)
        return std::numeric_limits<double>::infinity();
    const double u = kUnitRoundoffWork;
    const double nd = static_cast<double>(n);
    return u * (1.0 - 10.0 * nd * u) / (16.0 * std::sqrt(nd) * gamma(n, tier_high));
}

namespace {

SpectralResult finish(const SymMatrix<double>& to_solve, const Matrix<double>* q_tilde, int exponent,
                      const SolveConfig& cfg, Diagnostics diag)
{
    JacobiOptions jo;
    jo.tol = cfg.tol;
    jo.max_sweeps = cfg.max_sweeps;
    jo.accumulate = cfg.accumulate;
    SpectralResult res;
    res.report = cyclic_jacobi(to_solve, jo);
    if (!res.report.converged)
        diag.warnings.push_back("Jacobi did not converge within " + std::to_string(cfg.max_sweeps) + " sweeps");
    res.lambda.reserve(res.report.lambda.size());
    for (double l : res.report.lambda)
        res.lambda.push_back(std::ldexp(l, -exponent));
    if (cfg.accumulate)
        res.q = q_tilde ? matmul(*q_tilde, res.report.q) : res.report.q;
    res.diagnostics = std::move(diag);
    return res;
}

SpectralResult trivial_result(std::size_t n)
{
    SpectralResult res;
    res.lambda.assign(n, 0.0);
    res.q = Matrix<double>::identity(n);
    res.report.lambda = res.lambda;
    res.report.q = res.q;
    res.report.final_matrix = SymMatrix<double>(n);
    res.report.converged = true;
    res.report.off_history = {0.0};
    res.diagnostics.warnings.push_back("zero matrix");
    return res;
}

void fill_shape(Diagnostics& d, const SymMatrix<double>& m)
{
    const double f = frobenius(m);
    d.off_ratio = f > 0.0 ? off(m) / f : 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.n(); ++i)
        dmin = std::min(dmin, m(i, i));
    d.theta = dmin > 0.0 ? off(m) / dmin : std::numeric_limits<double>::infinity();
}

} // namespace

SpectralResult solve_preconditioned(const SymMatrix<double>& a, const Preconditioner& p, const SolveConfig& cfg)
{
    const std::size_t n = a.n();
    const ScaledInput s = scale_input(a);
    if (n == 0 || max_abs(s.a.full()) == 0.0)
        return trivial_result(n);

    Diagnostics diag;
    diag.scale_exponent = s.exponent;
    if (cfg.variant == Variant::Jacobi) {
        fill_shape(diag, s.a);
        return finish(s.a, nullptr, s.exponent, cfg, std::move(diag));
    }

    if (p.q_tilde.rows() != n || p.q_tilde.cols() != n)
        throw InvalidPreconditionerError("preconditioner size does not match the matrix");

    SymMatrix<double> at;
    if (cfg.variant == Variant::MP3) {
        Demoted d = demote_high_to_work(sandwich_high(p.q_tilde, s.a));
        at = std::move(d.a);
        if (d.underflow) {
            diag.underflow_warned = true;
            diag.warnings.push_back("underflow while demoting the preconditioned matrix to binary64");
        }
    } else {
        at = sandwich_work(p.q_tilde, s.a);
    }
    fill_shape(diag, at);

    if (cfg.check_assumptions) {
        const double lmax = p.lambda_low.empty() ? 0.0 : p.lambda_low.front();
        const double lmin = p.lambda_low.empty() ? 0.0 : p.lambda_low.back();
        diag.kappa_estimate = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
        const Tier th = cfg.variant == Variant::MP3 ? Tier::High : Tier::Work;
        const AssumptionCheck c = check_assumptions(n, diag.kappa_estimate, th);
        diag.a1 = c.a1;
        diag.a2 = c.a2;
        double ks = kappaS_from_theta(diag.theta);
        if (!std::isfinite(ks)) {
            try {
                ks = scaled_cond(at);
            } catch (const Error&) {
                ks = std::numeric_limits<double>::infinity();
            }
        }
        diag.a3 = c.a3_factor * ks < 1.0;
        if (!c.a1)
            diag.warnings.push_back("a1: 10 n^1.5 u kappa_2(A) / (1 - p1 u) >= 1 for the estimated condition number");
        if (!c.a2)
            diag.warnings.push_back("a2: high precision too coarse for the estimated condition number");
        if (!*diag.a3)
            diag.warnings.push_back("a3: 14 n u kappaS(A~) >= 1 for the preconditioned matrix");
    }
    return finish(at, &p.q_tilde, s.exponent, cfg, std::move(diag));
}

SpectralResult solve(const SymMatrix<double>& a, const SolveConfig& cfg)
{
    if (cfg.variant == Variant::Jacobi)
        return solve_preconditioned(a, Preconditioner{}, cfg);
    const ScaledInput s = scale_input(a);
    if (a.n() == 0 || max_abs(s.a.full()) == 0.0)
        return trivial_result(a.n());
    return solve_preconditioned(a, build_preconditioner(s.a, cfg.precond_method, cfg.backend), cfg);
}

} // namespace mpj
