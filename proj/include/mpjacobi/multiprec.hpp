#pragma once

// Precision tiers: simulated binary32 (low), native binary64 (working),
// and double-double (high), plus the error-free transforms underneath.

#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mpjacobi/errors.hpp"

namespace mpj {

enum class Tier { Low, Work, High };

inline constexpr double kUnitRoundoffLow = 0x1p-24;
inline constexpr double kUnitRoundoffWork = 0x1p-53;
inline constexpr double kUnitRoundoffHigh = 0x1p-104;

constexpr double unit_roundoff(Tier t) noexcept
{
    switch (t) {
    case Tier::Low: return kUnitRoundoffLow;
    case Tier::Work: return kUnitRoundoffWork;
    case Tier::High: return kUnitRoundoffHigh;
    }
    return kUnitRoundoffWork;
}

/// gamma_n = n u / (1 - n u) for the given tier.
inline double gamma(std::size_t n, Tier t) noexcept
{
    const double nu = static_cast<double>(n) * unit_roundoff(t);
    return nu / (1.0 - nu);
}

const char* to_string(Tier t) noexcept;

// ---------------------------------------------------------------------------
// Error-free transforms

struct DDNumber;

inline void two_sum(double a, double b, double& s, double& e) noexcept
{
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

/// Requires |a| >= |b| (or a == 0).
inline void fast_two_sum(double a, double b, double& s, double& e) noexcept
{
    s = a + b;
    e = b - (s - a);
}

inline void two_prod_fma(double a, double b, double& p, double& e) noexcept
{
    p = a * b;
    e = std::fma(a, b, -p);
}

/// Dekker/Veltkamp splitting. Exact for |a|,|b| below 2^996 and products
/// clear of the underflow range.
inline void two_prod_dekker(double a, double b, double& p, double& e) noexcept
{
    constexpr double split = 134217729.0; // 2^27 + 1
    p = a * b;
    const double ca = split * a;
    const double ah = ca - (ca - a);
    const double al = a - ah;
    const double cb = split * b;
    const double bh = cb - (cb - b);
    const double bl = b - bh;
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
}

#if defined(__FMA__) || defined(FP_FAST_FMA) || defined(__aarch64__)
inline constexpr bool kTwoProdUsesFma = true;
inline void two_prod(double a, double b, double& p, double& e) noexcept { two_prod_fma(a, b, p, e); }
#else
inline constexpr bool kTwoProdUsesFma = false;
inline void two_prod(double a, double b, double& p, double& e) noexcept { two_prod_dekker(a, b, p, e); }
#endif

// ---------------------------------------------------------------------------
// Double-double

/// Unevaluated sum hi + lo with hi = fl(hi + lo).
struct DDNumber {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DDNumber() noexcept = default;
    constexpr DDNumber(double h) noexcept : hi(h), lo(0.0) {}
    constexpr DDNumber(double h, double l) noexcept : hi(h), lo(l) {}

    /// Renormalizes an arbitrary pair.
    static DDNumber from_pair(double a, double b) noexcept
    {
        DDNumber r;
        two_sum(a, b, r.hi, r.lo);
        return r;
    }

    constexpr double to_double() const noexcept { return hi + lo; }
    constexpr bool is_zero() const noexcept { return hi == 0.0; }
};

static_assert(sizeof(DDNumber) == 2 * sizeof(double));

inline DDNumber two_sum(double a, double b) noexcept
{
    DDNumber r;
    two_sum(a, b, r.hi, r.lo);
    return r;
}

inline DDNumber two_prod(double a, double b) noexcept
{
    DDNumber r;
    two_prod(a, b, r.hi, r.lo);
    return r;
}

// Accurate double-word algorithms (relative error at most a few 2^-106).

inline DDNumber dd_add(const DDNumber& x, double y) noexcept
{
    double sh, sl;
    two_sum(x.hi, y, sh, sl);
    const double v = x.lo + sl;
    DDNumber z;
    fast_two_sum(sh, v, z.hi, z.lo);
    return z;
}

inline DDNumber dd_add(const DDNumber& x, const DDNumber& y) noexcept
{
    double sh, sl, th, tl;
    two_sum(x.hi, y.hi, sh, sl);
    two_sum(x.lo, y.lo, th, tl);
    const double c = sl + th;
    double vh, vl;
    fast_two_sum(sh, c, vh, vl);
    const double w = tl + vl;
    DDNumber z;
    fast_two_sum(vh, w, z.hi, z.lo);
    return z;
}

inline DDNumber dd_neg(const DDNumber& x) noexcept { return {-x.hi, -x.lo}; }

inline DDNumber dd_sub(const DDNumber& x, const DDNumber& y) noexcept { return dd_add(x, dd_neg(y)); }

inline DDNumber dd_mul(const DDNumber& x, double y) noexcept
{
    double ch, cl1;
    two_prod(x.hi, y, ch, cl1);
    const double cl3 = std::fma(x.lo, y, cl1);
    DDNumber z;
    fast_two_sum(ch, cl3, z.hi, z.lo);
    return z;
}

inline DDNumber dd_mul(const DDNumber& x, const DDNumber& y) noexcept
{
    double ch, cl1;
    two_prod(x.hi, y.hi, ch, cl1);
    const double tl0 = x.lo * y.lo;
    const double tl1 = std::fma(x.hi, y.lo, tl0);
    const double cl2 = std::fma(x.lo, y.hi, tl1);
    const double cl3 = cl1 + cl2;
    DDNumber z;
    fast_two_sum(ch, cl3, z.hi, z.lo);
    return z;
}

/// Throws DomainError when y is zero.
DDNumber dd_div(const DDNumber& x, const DDNumber& y);

/// Throws DomainError for negative input.
DDNumber dd_sqrt(const DDNumber& x);

inline DDNumber dd_abs(const DDNumber& x) noexcept
{
    return (x.hi < 0.0 || (x.hi == 0.0 && x.lo < 0.0)) ? dd_neg(x) : x;
}

inline DDNumber operator+(const DDNumber& a, const DDNumber& b) noexcept { return dd_add(a, b); }
inline DDNumber operator-(const DDNumber& a, const DDNumber& b) noexcept { return dd_sub(a, b); }
inline DDNumber operator*(const DDNumber& a, const DDNumber& b) noexcept { return dd_mul(a, b); }
inline DDNumber operator/(const DDNumber& a, const DDNumber& b) { return dd_div(a, b); }
inline DDNumber operator-(const DDNumber& a) noexcept { return dd_neg(a); }
inline DDNumber& operator+=(DDNumber& a, const DDNumber& b) noexcept { return a = dd_add(a, b); }
inline DDNumber& operator-=(DDNumber& a, const DDNumber& b) noexcept { return a = dd_sub(a, b); }
inline DDNumber& operator*=(DDNumber& a, const DDNumber& b) noexcept { return a = dd_mul(a, b); }
inline DDNumber& operator/=(DDNumber& a, const DDNumber& b) { return a = dd_div(a, b); }

inline bool operator==(const DDNumber& a, const DDNumber& b) noexcept { return a.hi == b.hi && a.lo == b.lo; }
inline std::partial_ordering operator<=>(const DDNumber& a, const DDNumber& b) noexcept
{
    if (auto c = a.hi <=> b.hi; c != 0)
        return c;
    return a.lo <=> b.lo;
}

inline DDNumber sqrt(const DDNumber& x) { return dd_sqrt(x); }
inline DDNumber abs(const DDNumber& x) noexcept { return dd_abs(x); }

/// Hex-float "hi+lo" rendering, exact.
std::string to_string(const DDNumber& x);

// ---------------------------------------------------------------------------
// Simulated binary32

struct LowRounding {
    double value = 0.0;
    bool underflow = false; ///< |x| was below the binary32 normal range and x != 0
};

/// Rounds a binary64 value to the nearest binary32 value (ties to even) and
/// returns it as a binary64. Throws RangeError when the result would overflow
/// binary32.
LowRounding round_low(double x);

namespace detail {
double round_low_outside_normal(double x);
[[noreturn]] void throw_low_overflow(double x);
} // namespace detail

/// round_low without the flag; same overflow behaviour.
inline double round_low_value(double x)
{
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    const std::uint64_t biased = (bits >> 52) & 0x7ffu;
    // binary32 normal exponents -126..127 map to biased binary64 897..1150
    if (biased >= 897 && biased <= 1150) {
        bits += 0x0fffffffu + ((bits >> 29) & 1u);
        bits &= ~std::uint64_t{0x1fffffff};
        if (((bits >> 52) & 0x7ffu) > 1150)
            detail::throw_low_overflow(x);
        return std::bit_cast<double>(bits);
    }
    return detail::round_low_outside_normal(x);
}

/// A binary64 holding a binary32-representable value. Every arithmetic
/// result is rounded with round_low, which matches native binary32 for
/// + - * / and sqrt because binary64 carries more than 2*24+2 bits.
class LowFloat {
public:
    constexpr LowFloat() noexcept = default;
    LowFloat(double x) : v_(round_low_value(x)) {}

    static constexpr LowFloat exact(double x) noexcept
    {
        LowFloat r;
        r.v_ = x;
        return r;
    }

    constexpr double value() const noexcept { return v_; }
    constexpr double to_double() const noexcept { return v_; }

    friend LowFloat operator+(LowFloat a, LowFloat b) { return LowFloat(a.v_ + b.v_); }
    friend LowFloat operator-(LowFloat a, LowFloat b) { return LowFloat(a.v_ - b.v_); }
    friend LowFloat operator*(LowFloat a, LowFloat b) { return LowFloat(a.v_ * b.v_); }
    friend LowFloat operator/(LowFloat a, LowFloat b) { return LowFloat(a.v_ / b.v_); }
    friend constexpr LowFloat operator-(LowFloat a) noexcept { return exact(-a.v_); }
    LowFloat& operator+=(LowFloat b) { return *this = *this + b; }
    LowFloat& operator-=(LowFloat b) { return *this = *this - b; }
    LowFloat& operator*=(LowFloat b) { return *this = *this * b; }
    LowFloat& operator/=(LowFloat b) { return *this = *this / b; }

    friend constexpr bool operator==(LowFloat a, LowFloat b) noexcept { return a.v_ == b.v_; }
    friend constexpr std::partial_ordering operator<=>(LowFloat a, LowFloat b) noexcept { return a.v_ <=> b.v_; }

private:
    double v_ = 0.0;
};

inline LowFloat sqrt(LowFloat a) { return LowFloat(std::sqrt(a.value())); }
inline constexpr LowFloat abs(LowFloat a) noexcept { return LowFloat::exact(a.value() < 0 ? -a.value() : a.value()); }

// ---------------------------------------------------------------------------
// Uniform scalar access for the tier-generic kernels.

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr Tier tier = Tier::Work;
    static constexpr double unit_roundoff = kUnitRoundoffWork;
    static double from_double(double x) noexcept { return x; }
    static double to_double(double x) noexcept { return x; }
    static double sqrt(double x) noexcept { return std::sqrt(x); }
    static double abs(double x) noexcept { return std::fabs(x); }
    static constexpr const char* name = "binary64";
};

template <>
struct scalar_traits<float> {
    static constexpr Tier tier = Tier::Low;
    static constexpr double unit_roundoff = kUnitRoundoffLow;
    static float from_double(double x) noexcept { return static_cast<float>(x); }
    static double to_double(float x) noexcept { return x; }
    static float sqrt(float x) noexcept { return std::sqrt(x); }
    static float abs(float x) noexcept { return std::fabs(x); }
    static constexpr const char* name = "binary32";
};

template <>
struct scalar_traits<LowFloat> {
    static constexpr Tier tier = Tier::Low;
    static constexpr double unit_roundoff = kUnitRoundoffLow;
    static LowFloat from_double(double x) { return LowFloat(x); }
    static double to_double(LowFloat x) noexcept { return x.value(); }
    static LowFloat sqrt(LowFloat x) { return mpj::sqrt(x); }
    static LowFloat abs(LowFloat x) noexcept { return mpj::abs(x); }
    static constexpr const char* name = "binary32-simulated";
};

template <>
struct scalar_traits<DDNumber> {
    static constexpr Tier tier = Tier::High;
    static constexpr double unit_roundoff = kUnitRoundoffHigh;
    static DDNumber from_double(double x) noexcept { return DDNumber(x); }
    static double to_double(const DDNumber& x) noexcept { return x.to_double(); }
    static DDNumber sqrt(const DDNumber& x) { return dd_sqrt(x); }
    static DDNumber abs(const DDNumber& x) noexcept { return dd_abs(x); }
    static constexpr const char* name = "double-double";
};

} // namespace mpj
