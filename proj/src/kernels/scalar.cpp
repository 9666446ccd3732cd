#include "mpjacobi/kernels.hpp"

#include "kernels_internal.hpp"

namespace mpj::kernels {
namespace {

void rot_d(double* x, double* y, std::size_t n, double c, double s)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void rot_dd(DDNumber* x, DDNumber* y, std::size_t n, DDNumber c, DDNumber s)
{
    for (std::size_t i = 0; i < n; ++i) {
        const DDNumber xi = x[i];
        const DDNumber yi = y[i];
        x[i] = dd_add(dd_mul(c, xi), dd_neg(dd_mul(s, yi)));
        y[i] = dd_add(dd_mul(s, xi), dd_mul(c, yi));
    }
}

void axpy_d(double* y, const double* x, std::size_t n, double a)
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] = y[i] + a * x[i];
}

double dot_d(const double* x, const double* y, std::size_t n)
{
    double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n - n % kLanes;
    for (std::size_t i = 0; i < body; i += kLanes)
        for (std::size_t l = 0; l < kLanes; ++l)
            acc[l] = acc[l] + x[i + l] * y[i + l];
    for (std::size_t i = body; i < n; ++i)
        acc[i - body] = acc[i - body] + x[i] * y[i];
    return combine_lanes(acc);
}

DDNumber dot2_d(const double* x, const double* y, std::size_t n)
{
    DDNumber acc[kLanes];
    const std::size_t body = n - n % kLanes;
    for (std::size_t i = 0; i < body; i += kLanes)
        for (std::size_t l = 0; l < kLanes; ++l)
            acc[l] = dd_add(acc[l], two_prod(x[i + l], y[i + l]));
    for (std::size_t i = body; i < n; ++i)
        acc[i - body] = dd_add(acc[i - body], two_prod(x[i], y[i]));
    return combine_lanes(acc);
}

void dd_axpy_d(DDNumber* acc, const double* x, std::size_t n, double a)
{
    for (std::size_t i = 0; i < n; ++i)
        acc[i] = dd_add(acc[i], two_prod(a, x[i]));
}

void dd_axpy_dd(DDNumber* acc, const DDNumber* x, std::size_t n, double a)
{
    for (std::size_t i = 0; i < n; ++i)
        acc[i] = dd_add(acc[i], dd_mul(x[i], a));
}

} // namespace

const KernelTable& scalar_table() noexcept
{
    static const KernelTable table{"scalar", rot_d, rot_dd, axpy_d, dot_d, dot2_d, dd_axpy_d, dd_axpy_dd};
    return table;
}

} // namespace mpj::kernels
