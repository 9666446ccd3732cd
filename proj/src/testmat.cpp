#include "mpjacobi/testmat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "mpjacobi/densecore.hpp"
#include "mpjacobi/kernels.hpp"

namespace mpj {
namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t binomial(unsigned n, unsigned k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (unsigned i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return static_cast<std::uint64_t>(r);
}

DDNumber exact_dd(std::uint64_t x)
{
    const double hi = static_cast<double>(x);
    // hi may round up past x, so take the signed difference
    const auto diff = static_cast<std::int64_t>(x - static_cast<std::uint64_t>(hi));
    return DDNumber::from_pair(hi, static_cast<double>(diff));
}

} // namespace

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    std::uint64_t x = splitmix(base);
    x = splitmix(x ^ a);
    x = splitmix(x ^ b);
    return splitmix(x ^ c);
}

std::vector<double> randsvd_spectrum(const RandSvdSpec& spec)
{
    const std::size_t n = spec.n;
    if (n == 0)
        throw DomainError("randsvd: n must be positive");
    if (!(spec.kappa >= 1.0) || !std::isfinite(spec.kappa))
        throw DomainError("randsvd: kappa must be finite and >= 1");
    if (spec.mode < 1 || spec.mode > 5)
        throw DomainError("randsvd: mode must be in 1..5");
    const double kappa = spec.kappa;
    const double nm1 = static_cast<double>(n > 1 ? n - 1 : 1);
    std::vector<double> lambda(n, 1.0);
    switch (spec.mode) {
    case 1:
        for (std::size_t k = 1; k < n; ++k)
            lambda[k] = 1.0 / kappa;
        break;
    case 2:
        lambda[n - 1] = n > 1 ? 1.0 / kappa : 1.0;
        break;
    case 3:
        for (std::size_t k = 0; k < n; ++k)
            lambda[k] = std::pow(kappa, -static_cast<double>(k) / nm1);
        break;
    case 4:
        for (std::size_t k = 0; k < n; ++k)
            lambda[k] = 1.0 - static_cast<double>(k) * (1.0 - 1.0 / kappa) / nm1;
        break;
    case 5: {
        // separate stream from the orthogonal factor
        Rng rng(derive_seed(spec.seed, 0x5eed5));
        const double lk = std::log(kappa);
        for (double& l : lambda)
            l = std::exp(-rng.uniform() * lk);
        std::sort(lambda.begin(), lambda.end(), std::greater<>());
        break;
    }
    }
    return lambda;
}

Matrix<double> haar_orthogonal(std::size_t n, Rng& rng)
{
    Matrix<double> g(n, n);
    for (double& x : g.values())
        x = rng.normal();
    return householder_qr(g).q;
}

SymMatrix<double> randsvd_spd(const RandSvdSpec& spec)
{
    const std::vector<double> lambda = randsvd_spectrum(spec);
    const std::size_t n = spec.n;
    Rng rng(spec.seed);
    const Matrix<double> q = haar_orthogonal(n, rng);

    // B = Q Lambda exactly in double-double, then A(:,j) = sum_k B(:,k) q_jk
    Matrix<DDNumber> b(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            b(i, k) = two_prod(q(i, k), lambda[k]);
    const auto& kt = kernels::active();
    Matrix<DDNumber> acc(n, 1);
    Matrix<double> a(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(acc.values().begin(), acc.values().end(), DDNumber(0.0));
        for (std::size_t k = 0; k < n; ++k)
            kt.dd_axpy_dd(acc.data(), b.col(k).data(), n, q(j, k));
        for (std::size_t i = j; i < n; ++i)
            a(i, j) = acc(i, 0).to_double();
    }
    return SymMatrix<double>::from_lower(std::move(a));
}

SymMatrix<double> hilbert(std::size_t n)
{
    Matrix<double> h(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            h(i, j) = 1.0 / static_cast<double>(i + j + 1);
    return SymMatrix<double>::from_lower(std::move(h));
}

SymMatrix<double> invhilbert(std::size_t n)
{
    if (n > 30)
        throw DomainError("invhilbert: n must be at most 30");
    const auto nn = static_cast<unsigned>(n);
    Matrix<double> h(n, n);
    for (unsigned j = 1; j <= nn; ++j)
        for (unsigned i = j; i <= nn; ++i) {
            const std::uint64_t c3 = binomial(i + j - 2, i - 1);
            DDNumber v = exact_dd(i + j - 1);
            v = v * exact_dd(binomial(nn + i - 1, nn - j));
            v = v * exact_dd(binomial(nn + j - 1, nn - i));
            v = v * exact_dd(c3) * exact_dd(c3);
            if ((i + j) % 2 == 1)
                v = -v;
            h(i - 1, j - 1) = v.to_double();
        }
    return SymMatrix<double>::from_lower(std::move(h));
}

SymMatrix<double> pascal(std::size_t n)
{
    if (n > 29)
        throw DomainError("pascal: entries are not exact in binary64 for n > 29");
    Matrix<double> p(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            p(i, j) = static_cast<double>(binomial(static_cast<unsigned>(i + j), static_cast<unsigned>(i)));
    return SymMatrix<double>::from_lower(std::move(p));
}

SymMatrix<double> lauchli_gram(std::size_t n, double mu)
{
    if (n < 2)
        throw DomainError("lauchli_gram: n must be at least 2");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw DomainError("lauchli_gram: mu must be positive");
    const double diag = dd_add(two_prod(mu, mu), 1.0).to_double();
    Matrix<double> a(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) = diag;
    return SymMatrix<double>::from_lower(std::move(a));
}

} // namespace mpj
