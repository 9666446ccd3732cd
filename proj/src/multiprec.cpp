#include "mpjacobi/multiprec.hpp"

#include <cstdio>

namespace mpj {

const char* to_string(Tier t) noexcept
{
    switch (t) {
    case Tier::Low: return "low";
    case Tier::Work: return "work";
    case Tier::High: return "high";
    }
    return "?";
}

DDNumber dd_div(const DDNumber& x, const DDNumber& y)
{
    if (y.hi == 0.0)
        throw DomainError("double-double division by zero");
    const double q1 = x.hi / y.hi;
    DDNumber r = dd_sub(x, dd_mul(y, q1));
    const double q2 = r.hi / y.hi;
    r = dd_sub(r, dd_mul(y, q2));
    const double q3 = r.hi / y.hi;
    DDNumber q;
    fast_two_sum(q1, q2, q.hi, q.lo);
    return dd_add(q, q3);
}

DDNumber dd_sqrt(const DDNumber& x)
{
    if (x.hi == 0.0)
        return {};
    if (x.hi < 0.0)
        throw DomainError("double-double sqrt of negative value");
    const double s = std::sqrt(x.hi);
    const DDNumber e = dd_sub(x, two_prod(s, s));
    const double corr = e.hi / (2.0 * s);
    DDNumber r;
    fast_two_sum(s, corr, r.hi, r.lo);
    return r;
}

std::string to_string(const DDNumber& x)
{
    char buf[80];
    std::snprintf(buf, sizeof buf, "%a%+a", x.hi, x.lo);
    return buf;
}

namespace detail {

void throw_low_overflow(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    throw RangeError(std::string("value overflows binary32: ") + buf);
}

double round_low_outside_normal(double x)
{
    if (x == 0.0 || std::isnan(x))
        return x;
    if (std::fabs(x) >= 0x1p-126)
        throw_low_overflow(x);
    // Subnormal binary32 range: quantum 2^-149; the scaling is exact.
    return std::ldexp(std::nearbyint(std::ldexp(x, 149)), -149);
}

} // namespace detail

LowRounding round_low(double x)
{
    LowRounding r;
    r.value = round_low_value(x);
    r.underflow = x != 0.0 && std::fabs(x) < 0x1p-126;
    return r;
}

} // namespace mpj
