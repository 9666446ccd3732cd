#include "mpjacobi/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpjacobi/kernels.hpp"

namespace mpj {
namespace {

template <class T>
using traits = scalar_traits<T>;

void rotate_columns(Matrix<double>& m, std::size_t p, std::size_t q, double c, double s)
{
    kernels::active().rot_d(m.col(p).data(), m.col(q).data(), m.rows(), c, s);
}

void rotate_columns(Matrix<DDNumber>& m, std::size_t p, std::size_t q, const DDNumber& c, const DDNumber& s)
{
    kernels::active().rot_dd(m.col(p).data(), m.col(q).data(), m.rows(), c, s);
}

template <class T>
T off_impl(const Matrix<T>& a)
{
    const std::size_t n = a.rows();
    T scale(0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) {
            const T x = traits<T>::abs(a(i, j));
            if (scale < x)
                scale = x;
        }
    if (scale == T(0.0))
        return scale;
    T sum(0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) {
            const T y = a(i, j) / scale;
            sum = sum + y * y;
        }
    return scale * traits<T>::sqrt(T(2.0) * sum);
}

[[noreturn]] void throw_indefinite(std::size_t i, double v)
{
    throw IndefiniteMatrixError("Jacobi: diagonal entry " + std::to_string(i) + " is not positive (" +
                                std::to_string(v) + "); matrix is not positive definite");
}

template <class T>
JacobiReport<T> run_jacobi(const SymMatrix<T>& in, const JacobiOptions& opt)
{
    const std::size_t n = in.n();
    const T tol = opt.tol > 0.0 ? T(opt.tol) : T(std::sqrt(static_cast<double>(n)) * traits<T>::unit_roundoff);
    Matrix<T> a = in.full();
    JacobiReport<T> rep;
    if (opt.accumulate)
        rep.q = Matrix<T>::identity(n);

    auto diag_root = [&](std::size_t i, const T& v) {
        if (opt.allow_indefinite)
            return traits<T>::sqrt(traits<T>::abs(v));
        if (!(T(0.0) < v))
            throw_indefinite(i, traits<T>::to_double(v));
        return traits<T>::sqrt(v);
    };
    std::vector<T> root(n);
    for (std::size_t i = 0; i < n; ++i)
        root[i] = diag_root(i, a(i, i));

    auto small_enough = [&](std::size_t p, std::size_t q) {
        return !(tol * (root[p] * root[q]) < traits<T>::abs(a(p, q)));
    };

    rep.off_history.push_back(off_impl(a));
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        std::size_t applied = 0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (small_enough(p, q))
                    continue;
                const T app = a(p, p);
                const T aqq = a(q, q);
                const T apq = a(q, p);
                const Rotation<T> r = jacobi_rotation(app, aqq, apq);
                rotate_columns(a, p, q, r.c, r.s);
                for (std::size_t k = 0; k < n; ++k) {
                    a(p, k) = a(k, p);
                    a(q, k) = a(k, q);
                }
                const T newp = app - r.t * apq;
                const T newq = aqq + r.t * apq;
                a(p, p) = newp;
                a(q, q) = newq;
                a(p, q) = T(0.0);
                a(q, p) = T(0.0);
                root[p] = diag_root(p, newp);
                root[q] = diag_root(q, newq);
                if (opt.accumulate)
                    rotate_columns(rep.q, p, q, r.c, r.s);
                ++applied;
            }
        if (applied == 0) {
            rep.converged = true;
            break;
        }
        ++rep.sweeps;
        rep.rotations_applied += applied;
        rep.off_history.push_back(off_impl(a));
    }
    if (!rep.converged) {
        bool ok = true;
        for (std::size_t p = 0; ok && p + 1 < n; ++p)
            for (std::size_t q = p + 1; ok && q < n; ++q)
                ok = small_enough(p, q);
        rep.converged = ok;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(y, y) < a(x, x); });
    rep.lambda.resize(n);
    Matrix<T> qs(opt.accumulate ? n : 0, opt.accumulate ? n : 0);
    for (std::size_t k = 0; k < n; ++k) {
        rep.lambda[k] = a(order[k], order[k]);
        if (opt.accumulate)
            std::copy(rep.q.col(order[k]).begin(), rep.q.col(order[k]).end(), qs.col(k).begin());
    }
    rep.q = std::move(qs);
    rep.final_off = rep.off_history.back();
    rep.final_matrix = SymMatrix<T>::from_lower(std::move(a));
    return rep;
}

} // namespace

double off(const SymMatrix<double>& a) { return off_impl(a.full()); }
DDNumber off(const SymMatrix<DDNumber>& a) { return off_impl(a.full()); }

template <class T>
Rotation<T> jacobi_rotation(const T& app, const T& aqq, const T& apq)
{
    if (apq == T(0.0))
        return {T(1.0), T(0.0), T(0.0)};
    const T tau = (aqq - app) / (T(2.0) * apq);
    const T atau = traits<T>::abs(tau);
    T t;
    if (traits<T>::to_double(atau) > 1e150)
        t = T(1.0) / (T(2.0) * tau);
    else {
        t = T(1.0) / (atau + traits<T>::sqrt(T(1.0) + tau * tau));
        if (tau < T(0.0))
            t = -t;
    }
    const T c = T(1.0) / traits<T>::sqrt(T(1.0) + t * t);
    return {c, t * c, t};
}

template Rotation<double> jacobi_rotation<double>(const double&, const double&, const double&);
template Rotation<DDNumber> jacobi_rotation<DDNumber>(const DDNumber&, const DDNumber&, const DDNumber&);

JacobiReport<double> cyclic_jacobi(const SymMatrix<double>& a, const JacobiOptions& opt)
{
    return run_jacobi(a, opt);
}

JacobiReport<DDNumber> cyclic_jacobi_dd(const SymMatrix<DDNumber>& a, const JacobiOptions& opt)
{
    return run_jacobi(a, opt);
}

bool satisfies_criterion(const SymMatrix<double>& a, double tol)
{
    const std::size_t n = a.n();
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
            if (std::fabs(a(q, p)) > tol * (std::sqrt(a(p, p)) * std::sqrt(a(q, q))))
                return false;
    return true;
}

} // namespace mpj
