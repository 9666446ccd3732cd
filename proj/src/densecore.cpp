#include "mpjacobi/densecore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpjacobi/kernels.hpp"
#include "mpjacobi/linalg.hpp"

namespace mpj {
namespace {

template <class T>
using traits = scalar_traits<T>;

template <class T>
T absv(const T& x)
{
    return traits<T>::abs(x);
}

template <class T>
T sqrtv(const T& x)
{
    return traits<T>::sqrt(x);
}

template <class T>
T dot(std::span<const T> x, std::span<const T> y)
{
    T s(0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        s = s + x[i] * y[i];
    return s;
}

template <>
double dot<double>(std::span<const double> x, std::span<const double> y)
{
    return kernels::active().dot_d(x.data(), y.data(), x.size());
}

/// y <- y + a x
template <class T>
void axpy(std::span<T> y, std::span<const T> x, const T& a)
{
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = y[i] + a * x[i];
}

template <>
void axpy<double>(std::span<double> y, std::span<const double> x, const double& a)
{
    kernels::active().axpy_d(y.data(), x.data(), y.size(), a);
}

/// x <- c x - s y, y <- s x + c y
template <class T>
void rotate(std::span<T> x, std::span<T> y, const T& c, const T& s)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T xi = x[i];
        const T yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

template <>
void rotate<double>(std::span<double> x, std::span<double> y, const double& c, const double& s)
{
    kernels::active().rot_d(x.data(), y.data(), x.size(), c, s);
}

template <>
void rotate<DDNumber>(std::span<DDNumber> x, std::span<DDNumber> y, const DDNumber& c, const DDNumber& s)
{
    kernels::active().rot_dd(x.data(), y.data(), x.size(), c, s);
}

/// sqrt(a^2 + b^2) without intermediate overflow.
template <class T>
T hypotv(const T& a, const T& b)
{
    const T x = absv(a);
    const T y = absv(b);
    const T w = x < y ? y : x;
    const T z = x < y ? x : y;
    if (z == T(0.0))
        return w;
    const T q = z / w;
    return w * sqrtv(T(1.0) + q * q);
}

/// Scaled 2-norm.
template <class T>
T norm2v(std::span<const T> x)
{
    T scale(0.0);
    for (const T& xi : x) {
        const T a = absv(xi);
        if (scale < a)
            scale = a;
    }
    if (scale == T(0.0))
        return scale;
    T ssq(0.0);
    for (const T& xi : x) {
        const T y = xi / scale;
        ssq = ssq + y * y;
    }
    return scale * sqrtv(ssq);
}

template <class T>
std::span<const T> as_const(std::span<T> s)
{
    return {s.data(), s.size()};
}

/// Stable descending sort of eigenpairs.
template <class T>
void sort_descending(std::vector<T>& lambda, Matrix<T>& q)
{
    const std::size_t n = lambda.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lambda[b] < lambda[a]; });
    std::vector<T> sorted(n);
    Matrix<T> qs(q.rows(), n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = lambda[order[k]];
        auto src = q.col(order[k]);
        std::copy(src.begin(), src.end(), qs.col(k).begin());
    }
    lambda = std::move(sorted);
    q = std::move(qs);
}

} // namespace

template <class T>
HouseholderVector<T> householder_vector(std::span<const T> x)
{
    if (x.empty())
        throw DomainError("householder_vector: empty input");
    HouseholderVector<T> r;
    r.v.assign(x.size(), T(0.0));
    r.v[0] = T(1.0);
    const T alpha = x[0];
    const T sigma = norm2v(x.subspan(1));
    if (sigma == T(0.0)) {
        r.tau = T(0.0);
        r.beta = alpha;
        return r;
    }
    const T nrm = hypotv(alpha, sigma);
    r.beta = alpha < T(0.0) ? nrm : -nrm;
    const T denom = alpha - r.beta;
    T vnorm2(1.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        r.v[i] = x[i] / denom;
        vnorm2 = vnorm2 + r.v[i] * r.v[i];
    }
    r.tau = T(2.0) / vnorm2;
    return r;
}

template <class T>
Tridiagonalization<T> tridiagonalize(const SymMatrix<T>& sym)
{
    const std::size_t n = sym.n();
    Matrix<T> a = sym.full();
    const std::size_t nref = n > 2 ? n - 2 : 0;
    Tridiagonalization<T> out;
    out.h.V = Matrix<T>(n, nref);
    out.h.tau.assign(nref, T(0.0));
    out.t.diag.assign(n, T(0.0));
    out.t.offdiag.assign(n > 1 ? n - 1 : 0, T(0.0));

    std::vector<T> p(n), w(n);
    for (std::size_t k = 0; k < nref; ++k) {
        const std::size_t m = n - k - 1;
        const std::size_t off = k + 1;
        const auto hv = householder_vector<T>(as_const(a.col(k).subspan(off, m)));
        for (std::size_t i = 0; i < m; ++i)
            out.h.V(off + i, k) = hv.v[i];
        out.h.tau[k] = hv.tau;
        out.t.offdiag[k] = hv.beta;
        if (hv.tau == T(0.0))
            continue;

        // p = tau S v, w = p - (tau/2)(p^T v) v, S <- S - v w^T - w v^T
        std::span<T> ps(p.data(), m);
        std::fill(ps.begin(), ps.end(), T(0.0));
        for (std::size_t j = 0; j < m; ++j)
            if (!(hv.v[j] == T(0.0)))
                axpy<T>(ps, as_const(a.col(off + j).subspan(off, m)), hv.v[j]);
        for (std::size_t i = 0; i < m; ++i)
            ps[i] = hv.tau * ps[i];
        const T kfac = hv.tau * dot<T>(as_const(ps), std::span<const T>(hv.v)) / T(2.0);
        for (std::size_t i = 0; i < m; ++i)
            w[i] = ps[i] - kfac * hv.v[i];
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = j; i < m; ++i) {
                const T upd = a(off + i, off + j) - (hv.v[i] * w[j] + w[i] * hv.v[j]);
                a(off + i, off + j) = upd;
                a(off + j, off + i) = upd;
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        out.t.diag[i] = a(i, i);
    if (n >= 2)
        out.t.offdiag[n - 2] = a(n - 1, n - 2);
    return out;
}

Tridiagonalization<double> tridiagonalize(const SymMatrix<double>& a, Tier tier)
{
    auto widen = [](const auto& tr) {
        Tridiagonalization<double> out;
        for (const auto& x : tr.t.diag)
            out.t.diag.push_back(scalar_traits<std::decay_t<decltype(x)>>::to_double(x));
        for (const auto& x : tr.t.offdiag)
            out.t.offdiag.push_back(scalar_traits<std::decay_t<decltype(x)>>::to_double(x));
        out.h.V = convert<double>(tr.h.V);
        for (const auto& x : tr.h.tau)
            out.h.tau.push_back(scalar_traits<std::decay_t<decltype(x)>>::to_double(x));
        return out;
    };
    switch (tier) {
    case Tier::Low: return widen(tridiagonalize(convert<LowFloat>(a)));
    case Tier::Work: return tridiagonalize(a);
    case Tier::High: break;
    }
    throw DomainError("tridiagonalize: use the double-double template for the high tier");
}

HouseholderSet<double> recompute_tau(HouseholderSet<double> h)
{
    const std::size_t n = h.n();
    for (std::size_t j = 0; j < h.count(); ++j) {
        if (h.tau[j] == 0.0)
            continue;
        const auto v = h.V.col(j).subspan(j + 1, n - j - 1);
        const DDNumber s = kernels::active().dot2_d(v.data(), v.data(), v.size());
        const double nrm2 = s.to_double();
        if (!(nrm2 > 0.0) || !std::isfinite(nrm2))
            throw DomainError("recompute_tau: Householder vector " + std::to_string(j) + " has no usable norm");
        h.tau[j] = 2.0 / nrm2;
    }
    return h;
}

template <class T>
Matrix<T> apply_reflectors(const HouseholderSet<T>& h, Matrix<T> b)
{
    const std::size_t n = h.n();
    if (b.rows() != n)
        throw DomainError("apply_reflectors: row count differs from reflector size");
    for (std::size_t jj = h.count(); jj-- > 0;) {
        if (h.tau[jj] == T(0.0))
            continue;
        const std::size_t piv = jj + 1;
        const auto v = h.V.col(jj).subspan(piv, n - piv);
        for (std::size_t c = 0; c < b.cols(); ++c) {
            auto bc = b.col(c).subspan(piv, n - piv);
            const T w = dot<T>(v, as_const(bc));
            if (!(w == T(0.0)))
                axpy<T>(bc, v, -(h.tau[jj] * w));
        }
    }
    return b;
}

Matrix<double> apply_reflectors(const HouseholderSet<double>& h, const Matrix<double>& b, Tier tier)
{
    switch (tier) {
    case Tier::Low: {
        HouseholderSet<LowFloat> hl{convert<LowFloat>(h.V), {}};
        for (double t : h.tau)
            hl.tau.push_back(LowFloat(t));
        return convert<double>(apply_reflectors(hl, convert<LowFloat>(b)));
    }
    case Tier::Work: return apply_reflectors(h, b);
    case Tier::High: break;
    }
    throw DomainError("apply_reflectors: use the double-double template for the high tier");
}

template <class T>
EigenPairs<T> tridiag_eig(const TridiagMatrix<T>& tri)
{
    const std::size_t n = tri.n();
    std::vector<T> d = tri.diag;
    std::vector<T> e(n, T(0.0));
    for (std::size_t i = 0; i + 1 < n; ++i)
        e[i] = tri.offdiag[i];
    Matrix<T> z = Matrix<T>::identity(n);
    const T eps(traits<T>::unit_roundoff);
    const T tiny(std::numeric_limits<float>::min());
    const std::size_t max_iter = 30 * std::max<std::size_t>(n, 1);
    std::size_t total_iter = 0;

    // |e_m| small relative to the geometric mean of its neighbours; graded
    // matrices keep their small eigenvalues this way.
    auto negligible = [&](std::size_t m) {
        const T bound = eps * (sqrtv(absv(d[m])) * sqrtv(absv(d[m + 1])));
        return !(bound < absv(e[m])) || !(tiny < absv(e[m]));
    };

    std::size_t l1 = 0;
    while (l1 < n) {
        std::size_t lend = l1;
        while (lend + 1 < n && !negligible(lend))
            ++lend;
        if (lend + 1 < n)
            e[lend] = T(0.0);
        if (lend == l1) {
            ++l1;
            continue;
        }
        // QL chases bulges upwards, so put the larger end of a graded block at
        // the bottom (the same choice as QL versus QR).
        if (absv(d[lend]) < absv(d[l1])) {
            for (std::size_t i = l1, j = lend; i < j; ++i, --j) {
                std::swap(d[i], d[j]);
                auto zi = z.col(i);
                auto zj = z.col(j);
                std::swap_ranges(zi.begin(), zi.end(), zj.begin());
            }
            std::reverse(e.begin() + static_cast<std::ptrdiff_t>(l1), e.begin() + static_cast<std::ptrdiff_t>(lend));
        }

        for (std::size_t l = l1; l <= lend; ++l) {
            std::size_t m;
            do {
                for (m = l; m < lend; ++m)
                    if (negligible(m)) {
                        e[m] = T(0.0);
                        break;
                    }
                if (m == l)
                    break;
                if (++total_iter > max_iter)
                    throw NonConvergenceError("tridiag_eig: no convergence after " + std::to_string(max_iter) +
                                              " QL iterations");
                // Wilkinson shift from the leading 2x2 block.
                T g = (d[l + 1] - d[l]) / (T(2.0) * e[l]);
                T r = hypotv(g, T(1.0));
                g = d[m] - d[l] + e[l] / (g + (g < T(0.0) ? -r : r));
                T s(1.0), c(1.0), p(0.0);
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    const T f = s * e[i];
                    const T b = c * e[i];
                    r = hypotv(f, g);
                    e[i + 1] = r;
                    if (r == T(0.0)) {
                        d[i + 1] = d[i + 1] - p;
                        e[m] = T(0.0);
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + T(2.0) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    // z_i <- c z_i - s z_{i+1}, z_{i+1} <- s z_i + c z_{i+1}
                    rotate<T>(z.col(i), z.col(i + 1), c, s);
                }
                if (underflow)
                    continue;
                d[l] = d[l] - p;
                e[l] = g;
                e[m] = T(0.0);
            } while (m != l);
        }
        l1 = lend + 1;
    }
    EigenPairs<T> out{std::move(z), std::move(d)};
    sort_descending(out.lambda, out.q);
    return out;
}

template <class T>
EigenPairs<T> sym_eig(const SymMatrix<T>& a)
{
    auto tr = tridiagonalize(a);
    auto ep = tridiag_eig(tr.t);
    ep.q = apply_reflectors(tr.h, std::move(ep.q));
    return ep;
}

bool prefer_reversed(const SymMatrix<double>& a)
{
    const std::size_t n = a.n();
    return n > 1 && std::fabs(a(0, 0)) < std::fabs(a(n - 1, n - 1));
}

SymMatrix<double> reverse_order(const SymMatrix<double>& a)
{
    const std::size_t n = a.n();
    Matrix<double> m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            m(i, j) = a(n - 1 - i, n - 1 - j);
    return SymMatrix<double>::from_lower(std::move(m));
}

Matrix<double> reverse_rows(Matrix<double> q)
{
    for (std::size_t j = 0; j < q.cols(); ++j) {
        auto c = q.col(j);
        std::reverse(c.begin(), c.end());
    }
    return q;
}

EigenPairs<double> sym_eig_low(const SymMatrix<double>& a, LowBackend backend)
{
    if (prefer_reversed(a)) {
        auto ep = sym_eig_low(reverse_order(a), backend);
        ep.q = reverse_rows(std::move(ep.q));
        return ep;
    }

    const std::size_t n = a.n();
    const double amax = max_abs(a.full());
    if (n == 0 || amax == 0.0)
        return {Matrix<double>::identity(n), std::vector<double>(n, 0.0)};
    const int shift = -std::ilogb(amax) - 1;
    Matrix<double> scaled = a.full();
    for (double& x : scaled.values())
        x = std::ldexp(x, shift);
    const auto as = SymMatrix<double>::from_lower(std::move(scaled));

    auto run = [&](auto tag) {
        using L = decltype(tag);
        const auto ep = sym_eig(convert<L>(as));
        EigenPairs<double> out;
        out.q = convert<double>(ep.q);
        for (const auto& x : ep.lambda)
            out.lambda.push_back(std::ldexp(scalar_traits<L>::to_double(x), -shift));
        return out;
    };
    return backend == LowBackend::Native ? run(float{}) : run(LowFloat{});
}

QrFactor householder_qr(const Matrix<double>& a)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n > m)
        throw DomainError("householder_qr: more columns than rows");
    Matrix<double> r = a;
    Matrix<double> vs(m, n);
    std::vector<double> taus(n, 0.0);
    std::vector<double> rdiag(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto hv = householder_vector<double>(as_const(r.col(j).subspan(j, m - j)));
        std::copy(hv.v.begin(), hv.v.end(), vs.col(j).begin() + static_cast<std::ptrdiff_t>(j));
        taus[j] = hv.tau;
        rdiag[j] = hv.beta;
        if (hv.tau == 0.0)
            continue;
        const std::span<const double> v(hv.v);
        for (std::size_t c = j + 1; c < n; ++c) {
            auto rc = r.col(c).subspan(j, m - j);
            const double w = dot<double>(v, as_const(rc));
            axpy<double>(rc, v, -(hv.tau * w));
        }
    }
    Matrix<double> q(m, n);
    for (std::size_t j = 0; j < n; ++j)
        q(j, j) = 1.0;
    for (std::size_t j = n; j-- > 0;) {
        if (taus[j] == 0.0)
            continue;
        const auto v = std::span<const double>(vs.col(j)).subspan(j, m - j);
        for (std::size_t c = j; c < n; ++c) {
            auto qc = q.col(c).subspan(j, m - j);
            const double w = dot<double>(v, as_const(qc));
            axpy<double>(qc, v, -(taus[j] * w));
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        if (rdiag[j] < 0.0) {
            rdiag[j] = -rdiag[j];
            for (double& x : q.col(j))
                x = -x;
        }
    return {std::move(q), std::move(rdiag)};
}

namespace {

void check_rank(std::span<const double> rdiag, const Matrix<double>& ql, const char* who)
{
    const double thresh = static_cast<double>(ql.cols()) * kUnitRoundoffWork * frobenius(ql);
    for (std::size_t j = 0; j < rdiag.size(); ++j)
        if (!(std::fabs(rdiag[j]) >= thresh))
            throw InvalidPreconditionerError(std::string(who) + ": column " + std::to_string(j) +
                                             " is numerically dependent");
}

void require_square(const Matrix<double>& q, const char* who)
{
    if (q.rows() != q.cols() || q.rows() == 0)
        throw DomainError(std::string(who) + ": expected a non-empty square matrix");
}

} // namespace

Matrix<double> hhqr_orth(const Matrix<double>& ql)
{
    require_square(ql, "hhqr_orth");
    auto f = householder_qr(ql);
    check_rank(f.r_diag, ql, "hhqr_orth");
    return std::move(f.q);
}

Matrix<double> mgs_orth(const Matrix<double>& ql)
{
    require_square(ql, "mgs_orth");
    const std::size_t n = ql.cols();
    Matrix<double> q = ql;
    std::vector<double> rdiag(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto qj = q.col(j);
        for (std::size_t i = 0; i < j; ++i) {
            const auto qi = std::span<const double>(q.col(i));
            const double r = dot<double>(qi, as_const(qj));
            axpy<double>(qj, qi, -r);
        }
        rdiag[j] = norm2v<double>(as_const(qj));
        if (rdiag[j] > 0.0)
            for (double& x : qj)
                x = x / rdiag[j];
    }
    check_rank(rdiag, ql, "mgs_orth");
    return q;
}

NewtonSchulzResult newton_schulz(const Matrix<double>& ql)
{
    require_square(ql, "newton_schulz");
    const std::size_t n = ql.cols();
    Matrix<double> x = ql;

    // The iteration converges when ||X||_2 < sqrt(3). ||X^T X - I||_F < 1 already
    // gives ||X||_2 < sqrt(2); otherwise scale so that ||X||_2 <= ||X||_F = 1.
    SymMatrix<double> r = gram_residual(x);
    if (!(frobenius(r) < 1.0)) {
        const double f = frobenius(x);
        for (double& v : x.values())
            v = v / f;
        r = gram_residual(x);
    }

    const double tol = static_cast<double>(n) * kUnitRoundoffWork;
    double prev = frobenius(r);
    for (int it = 1; it <= 20; ++it) {
        // X (3I - X^T X)/2 = X - X (X^T X - I)/2
        const Matrix<double> xr = matmul(x, r.full());
        auto xv = x.values();
        auto dv = xr.values();
        for (std::size_t k = 0; k < xv.size(); ++k)
            xv[k] = xv[k] - 0.5 * dv[k];
        r = gram_residual(x);
        const double res = frobenius(r);
        if (res <= tol)
            return {std::move(x), it, res};
        // Stalled at the rounding floor of binary64 storage.
        if (it >= 2 && res >= 0.5 * prev && res <= 10.0 * tol)
            return {std::move(x), it, res};
        prev = res;
    }
    throw NonConvergenceError("newton_schulz: no convergence within 20 iterations");
}

double sym_norm2(const SymMatrix<double>& a)
{
    if (a.n() == 0)
        return 0.0;
    const auto ep = sym_eig(a);
    return std::max(std::fabs(ep.lambda.front()), std::fabs(ep.lambda.back()));
}

double norm2(const Matrix<double>& a)
{
    return std::sqrt(sym_norm2(SymMatrix<double>::from_lower(matmul_tn(a, a))));
}

double orthogonality_error(const Matrix<double>& q) { return sym_norm2(gram_residual(q)); }

#define MPJ_INSTANTIATE(T)                                                                     \
    template HouseholderVector<T> householder_vector<T>(std::span<const T>);                   \
    template Tridiagonalization<T> tridiagonalize<T>(const SymMatrix<T>&);                     \
    template Matrix<T> apply_reflectors<T>(const HouseholderSet<T>&, Matrix<T>);               \
    template EigenPairs<T> tridiag_eig<T>(const TridiagMatrix<T>&);                            \
    template EigenPairs<T> sym_eig<T>(const SymMatrix<T>&);

MPJ_INSTANTIATE(float)
MPJ_INSTANTIATE(LowFloat)
MPJ_INSTANTIATE(double)
MPJ_INSTANTIATE(DDNumber)

#undef MPJ_INSTANTIATE

} // namespace mpj
