#pragma once

// Helpers shared by the unit tests: seeded random inputs, exact rational
// conversion through GMP, and a few norms computed the slow, obvious way.

#include <cmath>
#include <cstdint>
#include <vector>

#include "mpjacobi/linalg.hpp"
#include "mpjacobi/matrix.hpp"
#include "mpjacobi/multiprec.hpp"
#include "mpjacobi/testmat.hpp"

#ifdef MPJ_HAVE_GMP
#include <gmpxx.h>
#endif

namespace testsupport {

/// Random double with a uniformly distributed exponent in [lo, hi].
inline double random_double(mpj::Rng& rng, int lo, int hi)
{
    const double m = 1.0 + rng.uniform();
    const int e = lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
    const double x = std::ldexp(m, e);
    return (rng.next() & 1) ? -x : x;
}

inline mpj::Matrix<double> random_matrix(std::size_t m, std::size_t n, mpj::Rng& rng)
{
    mpj::Matrix<double> a(m, n);
    for (double& x : a.values())
        x = rng.normal();
    return a;
}

inline mpj::SymMatrix<double> random_symmetric(std::size_t n, mpj::Rng& rng)
{
    return mpj::SymMatrix<double>::from_lower(random_matrix(n, n, rng));
}

/// Seeded random SPD matrix with kappa_2 around 10^2 .. 10^6.
inline mpj::SymMatrix<double> random_spd(std::size_t n, std::uint64_t seed, double kappa = 0.0, int mode = 0)
{
    mpj::Rng rng(seed);
    if (kappa == 0.0)
        kappa = std::pow(10.0, 2.0 + 4.0 * rng.uniform());
    if (mode == 0)
        mode = 1 + static_cast<int>(rng.next() % 5);
    return mpj::randsvd_spd({n, kappa, mode, seed});
}

/// ||a - b||_F for matrices of equal shape.
inline double frob_diff(const mpj::Matrix<double>& a, const mpj::Matrix<double>& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        const double d = a.values()[k] - b.values()[k];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Q diag(lambda) Q^T at working precision.
inline mpj::Matrix<double> reconstruct(const mpj::Matrix<double>& q, const std::vector<double>& lambda)
{
    mpj::Matrix<double> ql = q;
    for (std::size_t j = 0; j < q.cols(); ++j)
        for (std::size_t i = 0; i < q.rows(); ++i)
            ql(i, j) *= lambda[j];
    return mpj::matmul(ql, q.transposed());
}

/// ||Q^T Q - I||_F with double-double accumulation.
inline double orth_frob(const mpj::Matrix<double>& q)
{
    return mpj::frobenius(mpj::gram_residual(q));
}

#ifdef MPJ_HAVE_GMP
inline mpq_class exact(double x)
{
    mpq_class q(x); // mpq from double is exact
    return q;
}

inline mpq_class exact(const mpj::DDNumber& x) { return exact(x.hi) + exact(x.lo); }

/// Entries of the computed sandwich comp ~ Q^T A Q violating
/// |comp - exact| <= u |exact| + 4 gamma_n(u_h) (|Q|^T |A| |Q|), all in rationals.
inline int componentwise_violations(const mpj::SymMatrix<double>& a, const mpj::Matrix<double>& q,
                                    const mpj::SymMatrix<double>& comp)
{
    const std::size_t n = a.n();
    const mpq_class uq = exact(mpj::kUnitRoundoffWork);
    const mpq_class nuh = exact(static_cast<double>(n) * mpj::kUnitRoundoffHigh);
    const mpq_class gamma_h = nuh / (1 - nuh);

    std::vector<mpq_class> aq(n * n), aabs(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            mpq_class s = 0, t = 0;
            for (std::size_t l = 0; l < n; ++l) {
                s += exact(a(k, l)) * exact(q(l, j));
                t += abs(exact(a(k, l))) * abs(exact(q(l, j)));
            }
            aq[k + j * n] = s;
            aabs[k + j * n] = t;
        }
    int violations = 0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            mpq_class ex = 0, mag = 0;
            for (std::size_t k = 0; k < n; ++k) {
                ex += exact(q(k, i)) * aq[k + j * n];
                mag += abs(exact(q(k, i))) * aabs[k + j * n];
            }
            const mpq_class err = abs(exact(comp(i, j)) - ex);
            if (err > uq * abs(ex) + 4 * gamma_h * mag)
                ++violations;
        }
    return violations;
}
#endif

} // namespace testsupport
