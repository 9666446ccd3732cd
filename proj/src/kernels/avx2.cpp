// AVX2+FMA variants; only reached after a runtime CPU check. Headers are
// included before the target pragma so their inline functions keep the
// baseline instruction set.

#include "mpjacobi/kernels.hpp"

#include "kernels_internal.hpp"

#if MPJ_HAVE_AVX2

#include <immintrin.h>

#pragma GCC push_options
#pragma GCC target("avx2,fma")

namespace mpj::kernels {
namespace {

struct VDD {
    __m256d hi;
    __m256d lo;
};

inline __m256d vneg(__m256d a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }

inline void v_two_sum(__m256d a, __m256d b, __m256d& s, __m256d& e)
{
    s = _mm256_add_pd(a, b);
    const __m256d bb = _mm256_sub_pd(s, a);
    e = _mm256_add_pd(_mm256_sub_pd(a, _mm256_sub_pd(s, bb)), _mm256_sub_pd(b, bb));
}

inline void v_fast_two_sum(__m256d a, __m256d b, __m256d& s, __m256d& e)
{
    s = _mm256_add_pd(a, b);
    e = _mm256_sub_pd(b, _mm256_sub_pd(s, a));
}

inline void v_two_prod(__m256d a, __m256d b, __m256d& p, __m256d& e)
{
    p = _mm256_mul_pd(a, b);
    e = _mm256_fmsub_pd(a, b, p);
}

inline VDD v_add(VDD x, VDD y)
{
    __m256d sh, sl, th, tl, vh, vl;
    v_two_sum(x.hi, y.hi, sh, sl);
    v_two_sum(x.lo, y.lo, th, tl);
    const __m256d c = _mm256_add_pd(sl, th);
    v_fast_two_sum(sh, c, vh, vl);
    const __m256d w = _mm256_add_pd(tl, vl);
    VDD z;
    v_fast_two_sum(vh, w, z.hi, z.lo);
    return z;
}

inline VDD v_mul(VDD x, VDD y)
{
    __m256d ch, cl1;
    v_two_prod(x.hi, y.hi, ch, cl1);
    const __m256d tl0 = _mm256_mul_pd(x.lo, y.lo);
    const __m256d tl1 = _mm256_fmadd_pd(x.hi, y.lo, tl0);
    const __m256d cl2 = _mm256_fmadd_pd(x.lo, y.hi, tl1);
    const __m256d cl3 = _mm256_add_pd(cl1, cl2);
    VDD z;
    v_fast_two_sum(ch, cl3, z.hi, z.lo);
    return z;
}

inline VDD v_mul_d(VDD x, __m256d y)
{
    __m256d ch, cl1;
    v_two_prod(x.hi, y, ch, cl1);
    const __m256d cl3 = _mm256_fmadd_pd(x.lo, y, cl1);
    VDD z;
    v_fast_two_sum(ch, cl3, z.hi, z.lo);
    return z;
}

// Four interleaved DDNumbers <-> split hi/lo registers. Lane order comes out
// permuted (0,2,1,3) but is restored by the matching store.
inline VDD load_dd(const DDNumber* p)
{
    const double* d = reinterpret_cast<const double*>(p);
    const __m256d a = _mm256_loadu_pd(d);
    const __m256d b = _mm256_loadu_pd(d + 4);
    return {_mm256_unpacklo_pd(a, b), _mm256_unpackhi_pd(a, b)};
}

inline void store_dd(DDNumber* p, VDD v)
{
    double* d = reinterpret_cast<double*>(p);
    _mm256_storeu_pd(d, _mm256_unpacklo_pd(v.hi, v.lo));
    _mm256_storeu_pd(d + 4, _mm256_unpackhi_pd(v.hi, v.lo));
}

inline VDD broadcast(DDNumber x) { return {_mm256_set1_pd(x.hi), _mm256_set1_pd(x.lo)}; }

void rot_d(double* x, double* y, std::size_t n, double c, double s)
{
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d yi = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void rot_dd(DDNumber* x, DDNumber* y, std::size_t n, DDNumber c, DDNumber s)
{
    const VDD vc = broadcast(c);
    const VDD vs = broadcast(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const VDD xi = load_dd(x + i);
        const VDD yi = load_dd(y + i);
        const VDD sy = v_mul(vs, yi);
        store_dd(x + i, v_add(v_mul(vc, xi), VDD{vneg(sy.hi), vneg(sy.lo)}));
        store_dd(y + i, v_add(v_mul(vs, xi), v_mul(vc, yi)));
    }
    for (; i < n; ++i) {
        const DDNumber xi = x[i];
        const DDNumber yi = y[i];
        x[i] = dd_add(dd_mul(c, xi), dd_neg(dd_mul(s, yi)));
        y[i] = dd_add(dd_mul(s, xi), dd_mul(c, yi));
    }
}

void axpy_d(double* y, const double* x, std::size_t n, double a)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    for (; i < n; ++i)
        y[i] = y[i] + a * x[i];
}

double dot_d(const double* x, const double* y, std::size_t n)
{
    __m256d vacc = _mm256_setzero_pd();
    const std::size_t body = n - n % kLanes;
    for (std::size_t i = 0; i < body; i += kLanes)
        vacc = _mm256_add_pd(vacc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    double acc[kLanes];
    _mm256_storeu_pd(acc, vacc);
    for (std::size_t i = body; i < n; ++i)
        acc[i - body] = acc[i - body] + x[i] * y[i];
    return combine_lanes(acc);
}

DDNumber dot2_d(const double* x, const double* y, std::size_t n)
{
    VDD vacc{_mm256_setzero_pd(), _mm256_setzero_pd()};
    const std::size_t body = n - n % kLanes;
    for (std::size_t i = 0; i < body; i += kLanes) {
        VDD p;
        v_two_prod(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), p.hi, p.lo);
        vacc = v_add(vacc, p);
    }
    double hi[kLanes];
    double lo[kLanes];
    _mm256_storeu_pd(hi, vacc.hi);
    _mm256_storeu_pd(lo, vacc.lo);
    DDNumber acc[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l)
        acc[l] = DDNumber(hi[l], lo[l]);
    for (std::size_t i = body; i < n; ++i)
        acc[i - body] = dd_add(acc[i - body], two_prod(x[i], y[i]));
    return combine_lanes(acc);
}

void dd_axpy_d(DDNumber* acc, const double* x, std::size_t n, double a)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // load_dd permutes lanes to (0,2,1,3); permute x the same way
        const __m256d xi = _mm256_permute4x64_pd(_mm256_loadu_pd(x + i), 0xD8);
        VDD p;
        v_two_prod(va, xi, p.hi, p.lo);
        store_dd(acc + i, v_add(load_dd(acc + i), p));
    }
    for (; i < n; ++i)
        acc[i] = dd_add(acc[i], two_prod(a, x[i]));
}

void dd_axpy_dd(DDNumber* acc, const DDNumber* x, std::size_t n, double a)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        store_dd(acc + i, v_add(load_dd(acc + i), v_mul_d(load_dd(x + i), va)));
    for (; i < n; ++i)
        acc[i] = dd_add(acc[i], dd_mul(x[i], a));
}

} // namespace

const KernelTable& avx2_table_impl() noexcept
{
    static const KernelTable table{"avx2", rot_d, rot_dd, axpy_d, dot_d, dot2_d, dd_axpy_d, dd_axpy_dd};
    return table;
}

} // namespace mpj::kernels

#pragma GCC pop_options

#endif
