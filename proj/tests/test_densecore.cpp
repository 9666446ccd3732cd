#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mpjacobi/densecore.hpp"
#include "mpjacobi/linalg.hpp"
#include "mpjacobi/metrics.hpp"
#include "support.hpp"

using namespace mpj;
using testsupport::frob_diff;
using testsupport::random_matrix;
using testsupport::random_symmetric;
using testsupport::reconstruct;

namespace {

constexpr double u = kUnitRoundoffWork;
constexpr double ul = kUnitRoundoffLow;

Matrix<double> tridiag_full(const TridiagMatrix<double>& t)
{
    const std::size_t n = t.n();
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = t.diag[i];
        if (i + 1 < n) {
            m(i + 1, i) = t.offdiag[i];
            m(i, i + 1) = t.offdiag[i];
        }
    }
    return m;
}

Matrix<double> identity_minus(const Matrix<double>& a)
{
    Matrix<double> d = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        d(i, i) -= 1.0;
    return d;
}

} // namespace

TEST_CASE("householder_vector on (3, 4)")
{
    const std::vector<double> x{3.0, 4.0};
    const auto h = householder_vector<double>(x);
    CHECK(h.beta == -5.0);
    CHECK(h.v[0] == 1.0);
    CHECK(h.v[1] == 0.5);
    CHECK(h.tau == 2.0 / 1.25);
    // H x = x - tau v (v^T x)
    const double w = h.v[0] * x[0] + h.v[1] * x[1];
    CHECK(std::fabs(x[0] - h.tau * w * h.v[0] - (-5.0)) <= 4 * u * 5.0);
    CHECK(std::fabs(x[1] - h.tau * w * h.v[1]) <= 4 * u * 5.0);
}

TEST_CASE("householder_vector returns the identity when nothing needs annihilating")
{
    const std::vector<double> x{2.0, 0.0, 0.0};
    const auto h = householder_vector<double>(x);
    CHECK(h.tau == 0.0);
    CHECK(h.beta == 2.0);
    CHECK(h.v == std::vector<double>{1.0, 0.0, 0.0});
    const std::vector<double> single{-3.0};
    CHECK(householder_vector<double>(single).tau == 0.0);
    CHECK_THROWS_AS(householder_vector<double>(std::vector<double>{}), DomainError);
}

TEST_CASE("householder_vector maps (0, ..., 0, a) onto a multiple of e1")
{
    const std::vector<double> x{0.0, 0.0, 0.0, 7.0};
    const auto h = householder_vector<double>(x);
    CHECK(std::fabs(std::fabs(h.beta) - 7.0) <= 4 * u * 7.0);
    double w = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        w += h.v[i] * x[i];
    for (std::size_t i = 1; i < x.size(); ++i)
        CHECK(std::fabs(x[i] - h.tau * w * h.v[i]) <= 8 * u * 7.0);
}

TEST_CASE("reflectors with recomputed tau are orthogonal to working precision")
{
    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng.next() % 40;
        HouseholderSet<double> h;
        h.V = Matrix<double>(n, 1);
        h.V(0, 0) = 1.0;
        for (std::size_t i = 1; i < n; ++i)
            h.V(i, 0) = static_cast<double>(static_cast<float>(rng.normal())); // binary32-born, as in the Low path
        h.tau = {1.0};
        const auto fixed = recompute_tau(h);
        const Matrix<double> q = apply_reflectors(fixed, Matrix<double>::identity(n));
        CHECK(sym_norm2(gram_residual(q)) <= 10.0 * static_cast<double>(n) * u);
    }
}

TEST_CASE("recompute_tau keeps identity markers and rejects empty reflectors")
{
    HouseholderSet<double> h;
    h.V = Matrix<double>(3, 1);
    h.tau = {0.0};
    CHECK(recompute_tau(h).tau[0] == 0.0);
    h.tau = {1.0};
    CHECK_THROWS_AS(recompute_tau(h), DomainError);
}

TEST_CASE("tridiagonalize reconstructs Hilbert(6) at working precision")
{
    const auto a = hilbert(6);
    const auto tr = tridiagonalize(a);
    const Matrix<double> q = apply_reflectors(tr.h, Matrix<double>::identity(6));
    const Matrix<double> rec = matmul(matmul(q, tridiag_full(tr.t)), q.transposed());
    CHECK(frob_diff(rec, a.full()) <= 100.0 * u * frobenius(a));
}

TEST_CASE("tridiagonalize reconstruction on random matrices at both tiers")
{
    Rng rng(32);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 1 + rng.next() % 50;
        const auto a = random_symmetric(n, rng);
        for (Tier tier : {Tier::Work, Tier::Low}) {
            CAPTURE(n);
            const auto tr = tridiagonalize(a, tier);
            const Matrix<double> q = apply_reflectors(tr.h, Matrix<double>::identity(n), tier);
            const Matrix<double> rec = matmul(matmul(q, tridiag_full(tr.t)), q.transposed());
            CHECK(frob_diff(rec, a.full()) <= 100.0 * static_cast<double>(n) * unit_roundoff(tier) * frobenius(a));
        }
    }
    CHECK_THROWS_AS(tridiagonalize(hilbert(3), Tier::High), DomainError);
}

TEST_CASE("apply_reflectors matches an explicit double-double product")
{
    Rng rng(33);
    const std::size_t n = 12;
    const auto tr = tridiagonalize(random_symmetric(n, rng));
    const Matrix<double> b = random_matrix(n, 5, rng);
    CHECK(apply_reflectors(tr.h, Matrix<double>::identity(n)).rows() == n);
    const Matrix<double> got = apply_reflectors(tr.h, b);

    Matrix<DDNumber> ref = convert<DDNumber>(b);
    for (std::size_t j = tr.h.count(); j-- > 0;) {
        const DDNumber tau(tr.h.tau[j]);
        for (std::size_t c = 0; c < ref.cols(); ++c) {
            DDNumber w;
            for (std::size_t i = 0; i < n; ++i)
                w += DDNumber(tr.h.V(i, j)) * ref(i, c);
            for (std::size_t i = 0; i < n; ++i)
                ref(i, c) -= tau * w * DDNumber(tr.h.V(i, j));
        }
    }
    double err = 0.0;
    for (std::size_t k = 0; k < got.values().size(); ++k)
        err = std::max(err, std::fabs(got.values()[k] - ref.values()[k].to_double()));
    CHECK(err <= 10.0 * n * u * frobenius(b));

    HouseholderSet<double> none;
    none.V = Matrix<double>(n, 0);
    CHECK(apply_reflectors(none, b) == b);
    CHECK_THROWS_AS(apply_reflectors(tr.h, Matrix<double>(n + 1, 2)), DomainError);
}

TEST_CASE("tridiag_eig on the (1, 2, 1) Toeplitz matrix")
{
    TridiagMatrix<double> t{{2, 2, 2, 2, 2}, {1, 1, 1, 1}};
    const auto ep = tridiag_eig(t);
    for (int k = 1; k <= 5; ++k)
        CHECK(std::fabs(ep.lambda[k - 1] - (2.0 + 2.0 * std::cos(k * std::numbers::pi / 6.0))) <= 10 * 5 * u * 4.0);
    CHECK(std::is_sorted(ep.lambda.rbegin(), ep.lambda.rend()));
    const Matrix<double> rec = reconstruct(ep.q, ep.lambda);
    CHECK(frob_diff(rec, tridiag_full(t)) <= 100 * 5 * u * 4.0);
}

TEST_CASE("tridiag_eig conserves the trace")
{
    Rng rng(34);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 1 + rng.next() % 60;
        TridiagMatrix<double> t;
        for (std::size_t i = 0; i < n; ++i)
            t.diag.push_back(rng.normal());
        for (std::size_t i = 0; i + 1 < n; ++i)
            t.offdiag.push_back(rng.normal());
        const auto ep = tridiag_eig(t);
        double tr = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tr += t.diag[i];
            sum += ep.lambda[i];
        }
        const Matrix<double> full = tridiag_full(t);
        CHECK(std::fabs(sum - tr) <= 10.0 * static_cast<double>(n) * u * frobenius(full));
        CHECK(testsupport::orth_frob(ep.q) <= 10.0 * std::pow(static_cast<double>(n), 1.5) * u);
    }
}

TEST_CASE("tridiag_eig resolves the small end of a graded matrix in either orientation")
{
    const std::size_t n = 8;
    TridiagMatrix<double> down, up;
    for (std::size_t i = 0; i < n; ++i)
        down.diag.push_back(std::pow(10.0, -2.0 * static_cast<double>(i)));
    for (std::size_t i = 0; i + 1 < n; ++i)
        down.offdiag.push_back(0.3 * std::pow(10.0, -2.0 * static_cast<double>(i) - 1.0));
    up.diag.assign(down.diag.rbegin(), down.diag.rend());
    up.offdiag.assign(down.offdiag.rbegin(), down.offdiag.rend());

    const auto ref = reference_eigenvalues(SymMatrix<double>::from_lower(tridiag_full(down)));
    for (const auto* t : {&down, &up}) {
        const auto ep = tridiag_eig(*t);
        for (std::size_t k = 0; k < n; ++k) {
            const double rel = std::fabs(ep.lambda[k] - ref[k].to_double()) / ref[k].to_double();
            CHECK(rel <= 100.0 * n * u);
        }
    }
}

TEST_CASE("sym_eig_low on a diagonal matrix is exact")
{
    Matrix<double> d(4, 4);
    d(0, 0) = 3.0;
    d(1, 1) = 0.5;
    d(2, 2) = 7.0;
    d(3, 3) = 2.0;
    const auto ep = sym_eig_low(SymMatrix<double>::from_lower(d));
    CHECK(ep.lambda == std::vector<double>{7.0, 3.0, 2.0, 0.5});
    for (std::size_t j = 0; j < 4; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            nrm += std::fabs(ep.q(i, j));
        CHECK(nrm == 1.0);
    }
}

TEST_CASE("sym_eig_low on Hilbert(8)")
{
    const auto a = hilbert(8);
    const auto ep = sym_eig_low(a);
    CHECK(sym_norm2(gram_residual(ep.q)) <= 100.0 * ul);
    CHECK(frob_diff(reconstruct(ep.q, ep.lambda), a.full()) <= 100.0 * ul * frobenius(a));
}

TEST_CASE("native and simulated binary32 back ends agree at the u_l level")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto a = testsupport::random_spd(30, seed);
        const auto s = sym_eig_low(a, LowBackend::Simulated);
        const auto nat = sym_eig_low(a, LowBackend::Native);
        for (std::size_t k = 0; k < a.n(); ++k)
            CHECK(std::fabs(s.lambda[k] - nat.lambda[k]) <= 10.0 * 30 * ul * s.lambda.front());
    }
}

TEST_CASE("sym_eig_low survives entries far outside the binary32 range")
{
    Matrix<double> m = hilbert(5).full();
    for (double& x : m.values())
        x = std::ldexp(x, 300);
    const auto ep = sym_eig_low(SymMatrix<double>::from_lower(m));
    const auto ref = sym_eig_low(hilbert(5));
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(ep.lambda[k] == std::ldexp(ref.lambda[k], 300));
}

TEST_CASE("reversal helpers")
{
    const auto p = pascal(4);
    CHECK(prefer_reversed(p));
    CHECK_FALSE(prefer_reversed(hilbert(4)));
    const auto r = reverse_order(p);
    CHECK(r(0, 0) == p(3, 3));
    CHECK(r(3, 1) == p(0, 2));
    CHECK(reverse_order(r) == p);
    Matrix<double> q(3, 1);
    q(0, 0) = 1;
    q(1, 0) = 2;
    q(2, 0) = 3;
    const auto rq = reverse_rows(q);
    CHECK(rq(0, 0) == 3.0);
    CHECK(rq(2, 0) == 1.0);
}

TEST_CASE("sym_eig at working precision")
{
    Rng rng(35);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 1 + rng.next() % 40;
        const auto a = random_symmetric(n, rng);
        const auto ep = sym_eig(a);
        CHECK(std::is_sorted(ep.lambda.rbegin(), ep.lambda.rend()));
        CHECK(frob_diff(reconstruct(ep.q, ep.lambda), a.full()) <= 100.0 * n * u * frobenius(a));
    }
}

TEST_CASE("householder_qr")
{
    Rng rng(36);
    const Matrix<double> a = random_matrix(9, 6, rng);
    const auto qr = householder_qr(a);
    CHECK(qr.q.rows() == 9);
    CHECK(qr.q.cols() == 6);
    for (double r : qr.r_diag)
        CHECK(r >= 0.0);
    CHECK(testsupport::orth_frob(qr.q) <= 10.0 * 9 * u);
    // Q^T A is upper triangular with the reported diagonal
    const Matrix<double> r = matmul_tn(qr.q, a);
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(std::fabs(r(j, j) - qr.r_diag[j]) <= 100 * u * frobenius(a));
        for (std::size_t i = j + 1; i < 6; ++i)
            CHECK(std::fabs(r(i, j)) <= 100 * u * frobenius(a));
    }
    CHECK_THROWS_AS(householder_qr(random_matrix(3, 4, rng)), DomainError);
}

TEST_CASE("orthogonalizers leave the identity alone")
{
    const auto id = Matrix<double>::identity(7);
    CHECK(hhqr_orth(id) == id);
    CHECK(mgs_orth(id) == id);
    const auto ns = newton_schulz(id);
    CHECK(ns.q == id);
    CHECK(ns.iterations <= 1);
}

TEST_CASE("orthogonalizers on a small perturbation of the identity")
{
    Rng rng(37);
    const std::size_t n = 10;
    Matrix<double> g = random_matrix(n, n, rng);
    const double gn = norm2(g);
    Matrix<double> ql = Matrix<double>::identity(n);
    for (std::size_t k = 0; k < g.values().size(); ++k)
        ql.values()[k] += 1e-8 * g.values()[k] / gn;
    for (auto* f : {&hhqr_orth, &mgs_orth, &newton_schulz_orth}) {
        const Matrix<double> q = f(ql);
        CHECK(norm2(identity_minus(q)) <= 2e-8);
        CHECK(sym_norm2(gram_residual(q)) <= 10.0 * n * u);
    }
}

TEST_CASE("Newton-Schulz maps 0.9 I to I")
{
    Matrix<double> x = Matrix<double>::identity(5);
    for (double& v : x.values())
        v *= 0.9;
    const auto r = newton_schulz(x);
    CHECK(norm2(identity_minus(r.q)) <= 5 * 5 * u);
    CHECK(r.residual <= 5 * u);
}

TEST_CASE("orthogonalizing a binary32 eigenbasis")
{
    for (std::uint64_t seed : {4u, 5u, 6u}) {
        const auto a = testsupport::random_spd(60, seed, 1e6, 3);
        const Matrix<double> ql = sym_eig_low(a).q;
        const double n = 60.0;
        for (auto* f : {&hhqr_orth, &mgs_orth, &newton_schulz_orth}) {
            const Matrix<double> q = f(ql);
            CHECK(sym_norm2(gram_residual(q)) <= 10.0 * n * u);
            Matrix<double> d = q;
            for (std::size_t k = 0; k < d.values().size(); ++k)
                d.values()[k] -= ql.values()[k];
            CHECK(norm2(d) <= 10.0 * n * ul);
        }
        CHECK(newton_schulz(ql).iterations <= 3);
    }
}

TEST_CASE("rank-deficient input is rejected")
{
    Matrix<double> q = Matrix<double>::identity(4);
    q(3, 3) = 0.0;
    CHECK_THROWS_AS(hhqr_orth(q), InvalidPreconditionerError);
    CHECK_THROWS_AS(mgs_orth(q), InvalidPreconditionerError);
    CHECK_THROWS_AS(newton_schulz(q), NonConvergenceError);
    CHECK_THROWS_AS(hhqr_orth(Matrix<double>(3, 2)), DomainError);
}

TEST_CASE("norms")
{
    Matrix<double> d(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -5.0;
    CHECK(sym_norm2(SymMatrix<double>::from_lower(d)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(norm2(d) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(orthogonality_error(Matrix<double>::identity(6)) == 0.0);
}
