#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an
// AVX2+FMA variant that reproduces the reference bit for bit: the vector
// code performs the same operation sequence per element, and reductions use
// a fixed four-lane interleaved order in both variants.

#include <cstddef>

#include "mpjacobi/multiprec.hpp"

namespace mpj::kernels {

struct KernelTable {
    const char* name;

    /// x <- c*x - s*y,  y <- s*x + c*y
    void (*rot_d)(double* x, double* y, std::size_t n, double c, double s);
    void (*rot_dd)(DDNumber* x, DDNumber* y, std::size_t n, DDNumber c, DDNumber s);

    /// y <- y + a*x (separate multiply and add)
    void (*axpy_d)(double* y, const double* x, std::size_t n, double a);

    /// Four-lane interleaved dot product.
    double (*dot_d)(const double* x, const double* y, std::size_t n);

    /// Dot product of binary64 vectors accumulated in double-double.
    DDNumber (*dot2_d)(const double* x, const double* y, std::size_t n);

    /// acc <- acc + a*x with exact products, double-double accumulation.
    void (*dd_axpy_d)(DDNumber* acc, const double* x, std::size_t n, double a);

    /// acc <- acc + x*a for double-double x.
    void (*dd_axpy_dd)(DDNumber* acc, const DDNumber* x, std::size_t n, double a);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

/// Selected once: AVX2 when available unless MPJ_KERNELS=scalar is set.
const KernelTable& active() noexcept;

} // namespace mpj::kernels
