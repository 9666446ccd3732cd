#pragma once

// Seeded test matrices: randsvd-style SPD matrices with a prescribed spectrum
// and a few classical ill-conditioned specials.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mpjacobi/matrix.hpp"

namespace mpj {

/// std::mt19937_64 with explicit uniform and normal transforms, so the
/// stream does not depend on the standard library's distributions.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

    /// Standard normal (Box-Muller, both values used).
    double normal();

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer over a base seed and grid coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct RandSvdSpec {
    std::size_t n = 0;
    double kappa = 1.0;
    int mode = 3;
    std::uint64_t seed = 1;
};

/// Eigenvalues (descending, largest 1) for the given spec.
std::vector<double> randsvd_spectrum(const RandSvdSpec& spec);

/// Haar-distributed orthogonal matrix: Q factor of a Gaussian matrix with
/// diag(R) > 0.
Matrix<double> haar_orthogonal(std::size_t n, Rng& rng);

/// A = Q Lambda Q^T, each entry accumulated in double-double and rounded once.
SymMatrix<double> randsvd_spd(const RandSvdSpec& spec);

SymMatrix<double> hilbert(std::size_t n);

/// Closed-form inverse Hilbert matrix, entries correctly rounded up to a
/// double-double product error. n <= 30.
SymMatrix<double> invhilbert(std::size_t n);

/// p_ij = C(i+j-2, i-1); entries exact for n <= 29, larger n rejected.
SymMatrix<double> pascal(std::size_t n);

/// L^T L for the (n+1) x n Lauchli matrix [ones; mu I].
SymMatrix<double> lauchli_gram(std::size_t n, double mu);

} // namespace mpj
