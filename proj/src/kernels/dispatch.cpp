#include "mpjacobi/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace mpj::kernels {

const KernelTable* avx2_table() noexcept
{
#if MPJ_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_table_impl() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() noexcept
{
    static const KernelTable& selected = []() -> const KernelTable& {
        const char* env = std::getenv("MPJ_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0)
            return scalar_table();
        if (const KernelTable* t = avx2_table())
            return *t;
        return scalar_table();
    }();
    return selected;
}

} // namespace mpj::kernels
