// Build-time check: the FMA and Dekker-split two_prod agree bit for bit.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "mpjacobi/multiprec.hpp"

int main()
{
    // Fixed xorshift stream plus a few hand-picked edge cases.
    std::uint64_t s = 0x243f6a8885a308d3ULL;
    auto next = [&s] {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    };
    const double special[][2] = {{1.0 + 0x1p-30, 1.0 + 0x1p-30}, {0.1, 0.2}, {3.0, 1.0 / 3.0},
                                 {0x1.fffffffffffffp+500, 0x1.fffffffffffffp+500}, {-0x1p-500, 0x1.8p-400}};
    int failures = 0;
    auto check = [&](double a, double b) {
        double p1, e1, p2, e2;
        mpj::two_prod_fma(a, b, p1, e1);
        mpj::two_prod_dekker(a, b, p2, e2);
        if (std::bit_cast<std::uint64_t>(p1) != std::bit_cast<std::uint64_t>(p2) ||
            std::bit_cast<std::uint64_t>(e1) != std::bit_cast<std::uint64_t>(e2)) {
            if (++failures <= 5)
                std::fprintf(stderr, "two_prod mismatch: %a * %a: fma (%a, %a) dekker (%a, %a)\n", a, b, p1, e1, p2, e2);
        }
    };
    for (const auto& p : special)
        check(p[0], p[1]);
    for (int i = 0; i < 100000; ++i) {
        // random significands, exponents in [-60, 60] so no overflow or underflow
        const double a = std::ldexp(1.0 + static_cast<double>(next() >> 12) * 0x1p-52, static_cast<int>(next() % 121) - 60);
        const double b = std::ldexp(1.0 + static_cast<double>(next() >> 12) * 0x1p-52, static_cast<int>(next() % 121) - 60);
        check((next() & 1) ? a : -a, b);
    }
    if (failures) {
        std::fprintf(stderr, "two_prod self-test: %d mismatches\n", failures);
        return 1;
    }
    std::printf("two_prod self-test: fma and dekker agree (%s path active)\n",
                mpj::kTwoProdUsesFma ? "fma" : "dekker");
    return 0;
}
