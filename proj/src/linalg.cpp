#include "mpjacobi/linalg.hpp"

#include <cmath>

#include "mpjacobi/kernels.hpp"

namespace mpj {

Matrix<double> matmul(const Matrix<double>& a, const Matrix<double>& b)
{
    if (a.cols() != b.rows())
        throw DomainError("matmul: inner dimensions differ");
    const auto& k = kernels::active();
    Matrix<double> c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double bpj = b(p, j);
            if (bpj != 0.0)
                k.axpy_d(c.col(j).data(), a.col(p).data(), a.rows(), bpj);
        }
    return c;
}

Matrix<double> matmul_tn(const Matrix<double>& a, const Matrix<double>& b)
{
    if (a.rows() != b.rows())
        throw DomainError("matmul_tn: inner dimensions differ");
    const auto& k = kernels::active();
    Matrix<double> c(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < a.cols(); ++i)
            c(i, j) = k.dot_d(a.col(i).data(), b.col(j).data(), a.rows());
    return c;
}

double frobenius(const Matrix<double>& a)
{
    double scale = 0.0;
    for (double x : a.values())
        scale = std::fmax(scale, std::fabs(x));
    if (scale == 0.0)
        return 0.0;
    double sum = 0.0;
    for (double x : a.values()) {
        const double y = x / scale;
        sum += y * y;
    }
    return scale * std::sqrt(sum);
}

double frobenius(const SymMatrix<double>& a) { return frobenius(a.full()); }

DDNumber frobenius(const SymMatrix<DDNumber>& a)
{
    DDNumber sum;
    for (const DDNumber& x : a.full().values())
        sum = dd_add(sum, dd_mul(x, x));
    return dd_sqrt(sum);
}

double max_abs(const Matrix<double>& a)
{
    double m = 0.0;
    for (double x : a.values())
        m = std::fmax(m, std::fabs(x));
    return m;
}

SymMatrix<double> gram_residual(const Matrix<double>& q)
{
    const auto& k = kernels::active();
    const std::size_t n = q.cols();
    Matrix<double> e(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
            DDNumber g = k.dot2_d(q.col(i).data(), q.col(j).data(), q.rows());
            if (i == j)
                g = dd_add(g, -1.0);
            e(i, j) = g.to_double();
        }
    return SymMatrix<double>::from_lower(std::move(e));
}

} // namespace mpj
