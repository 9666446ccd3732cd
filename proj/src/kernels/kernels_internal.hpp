#pragma once

#include <cstddef>

#include "mpjacobi/multiprec.hpp"

namespace mpj::kernels {

inline constexpr std::size_t kLanes = 4;

inline double combine_lanes(const double (&acc)[kLanes])
{
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

inline DDNumber combine_lanes(const DDNumber (&acc)[kLanes])
{
    return dd_add(dd_add(acc[0], acc[1]), dd_add(acc[2], acc[3]));
}

#if MPJ_HAVE_AVX2
const KernelTable& avx2_table_impl() noexcept;
#endif

} // namespace mpj::kernels
