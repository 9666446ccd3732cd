#include "mpjacobi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "mpjacobi/jacobi.hpp"

namespace mpj {
namespace {

SymMatrix<DDNumber> unit_diagonal(const SymMatrix<DDNumber>& a)
{
    const std::size_t n = a.n();
    std::vector<DDNumber> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(DDNumber(0.0) < a(i, i)))
            throw DomainError("scaled_cond: diagonal entry " + std::to_string(i) + " is not positive");
        d[i] = dd_div(DDNumber(1.0), dd_sqrt(a(i, i)));
    }
    Matrix<DDNumber> m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        m(j, j) = DDNumber(1.0);
        for (std::size_t i = j + 1; i < n; ++i)
            m(i, j) = a(i, j) * d[i] * d[j];
    }
    return SymMatrix<DDNumber>::from_lower(std::move(m));
}

double ratio_of_extremes(const std::vector<DDNumber>& lambda)
{
    if (lambda.empty())
        return 1.0;
    if (!(DDNumber(0.0) < lambda.back()))
        throw IndefiniteMatrixError("smallest eigenvalue is not positive");
    return dd_div(lambda.front(), lambda.back()).to_double();
}

double abs_ratio(const std::vector<DDNumber>& lambda)
{
    if (lambda.empty())
        return 1.0;
    DDNumber lo = dd_abs(lambda.front());
    DDNumber hi = lo;
    for (const auto& l : lambda) {
        const DDNumber x = dd_abs(l);
        if (x < lo)
            lo = x;
        if (hi < x)
            hi = x;
    }
    if (lo == DDNumber(0.0))
        return std::numeric_limits<double>::infinity();
    return dd_div(hi, lo).to_double();
}

} // namespace

std::vector<DDNumber> reference_eigenvalues(const SymMatrix<DDNumber>& a, bool allow_indefinite)
{
    JacobiOptions opt;
    opt.accumulate = false;
    opt.max_sweeps = 60;
    opt.allow_indefinite = allow_indefinite;
    return cyclic_jacobi_dd(a, opt).lambda;
}

std::vector<DDNumber> reference_eigenvalues(const SymMatrix<double>& a, bool allow_indefinite)
{
    return reference_eigenvalues(convert<DDNumber>(a), allow_indefinite);
}

double scaled_cond(const SymMatrix<DDNumber>& a) { return ratio_of_extremes(reference_eigenvalues(unit_diagonal(a))); }

double scaled_cond(const SymMatrix<double>& a) { return scaled_cond(convert<DDNumber>(a)); }

double cond2(const SymMatrix<DDNumber>& a) { return ratio_of_extremes(reference_eigenvalues(a)); }

double cond2(const SymMatrix<double>& a) { return cond2(convert<DDNumber>(a)); }

double cond2_abs(const SymMatrix<DDNumber>& a) { return abs_ratio(reference_eigenvalues(a, true)); }

double cond2_abs(const SymMatrix<double>& a) { return cond2_abs(convert<DDNumber>(a)); }

double scaled_cond_abs(const SymMatrix<DDNumber>& a) { return abs_ratio(reference_eigenvalues(unit_diagonal(a), true)); }

double scaled_cond_abs(const SymMatrix<double>& a) { return scaled_cond_abs(convert<DDNumber>(a)); }

double bound_7n_kappa_u(std::size_t n, double kappaS) { return 7.0 * static_cast<double>(n) * kappaS * kUnitRoundoffWork; }

ErrorProfile forward_errors(std::span<const double> computed, std::span<const DDNumber> ref,
                            std::optional<double> kappaS_At)
{
    if (computed.size() != ref.size())
        throw DomainError("forward_errors: " + std::to_string(computed.size()) + " computed vs " +
                          std::to_string(ref.size()) + " reference eigenvalues");
    ErrorProfile p;
    p.per_eigenvalue_rel_error.reserve(ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
        if (!(DDNumber(0.0) < ref[k]))
            throw DomainError("forward_errors: reference eigenvalue " + std::to_string(k) + " is not positive");
        const double e = dd_div(dd_abs(dd_sub(DDNumber(computed[k]), ref[k])), ref[k]).to_double();
        p.per_eigenvalue_rel_error.push_back(e);
        p.max_rel_error = std::max(p.max_rel_error, e);
    }
    if (kappaS_At)
        p.bound_7n_kappaS_u = bound_7n_kappa_u(ref.size(), *kappaS_At);
    return p;
}

ErrorProfile forward_errors(std::span<const double> computed, std::span<const double> ref,
                            std::optional<double> kappaS_At)
{
    std::vector<DDNumber> r(ref.begin(), ref.end());
    return forward_errors(computed, std::span<const DDNumber>(r), kappaS_At);
}

double theta_sdd(const SymMatrix<double>& a)
{
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.n(); ++i)
        dmin = std::min(dmin, a(i, i));
    if (!(dmin > 0.0))
        throw DomainError("theta_sdd: diagonal must be positive");
    return off(a) / dmin;
}

double kappaS_from_theta(double theta)
{
    if (!(theta < 1.0))
        return std::numeric_limits<double>::infinity();
    return (1.0 + theta) / (1.0 - theta);
}

double hadamard_bound(const SymMatrix<double>& a)
{
    const std::size_t n = a.n();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = a(i, i);
    std::sort(d.begin(), d.end(), std::greater<>());
    const auto lambda = reference_eigenvalues(a);
    if (n > 0 && !(DDNumber(0.0) < lambda.back()))
        throw IndefiniteMatrixError("hadamard_bound: matrix is not positive definite");
    double log_sum = std::log(static_cast<double>(n) * std::numbers::e);
    for (std::size_t i = 0; i < n; ++i)
        log_sum += std::log(d[i]) - std::log(lambda[i].to_double());
    if (log_sum > std::log(std::numeric_limits<double>::max()))
        return std::numeric_limits<double>::infinity();
    return std::exp(log_sum);
}

double c_nu(std::size_t n, double u)
{
    return static_cast<double>(n) * (2.0 * u + 2.0 * u / std::sqrt(1.0 - 2.0 * u) + 2.0 * u / (1.0 - 2.0 * u));
}

} // namespace mpj
