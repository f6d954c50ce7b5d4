#pragma once

#include <cstdint>
#include <random>

#include "paving_lab/matrix.hpp"

namespace paving_lab {

using Rng = std::mt19937_64;

/// Entries with independent standard complex Gaussian real/imaginary parts.
Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng);
Matrix random_hermitian(std::size_t n, Rng& rng);
Matrix random_unitary(std::size_t n, Rng& rng);

/// Uniformly oriented rank-k orthogonal projection (k may be 0 < k <= n).
Matrix random_projection(std::size_t n, std::size_t k, Rng& rng);

/// U diag(+-1) U^H with random signs.
Matrix random_reflection(std::size_t n, Rng& rng);

/// Hermitian with operator norm exactly `norm` (up to rounding).
Matrix random_hermitian_contraction(std::size_t n, double norm, Rng& rng);

}  // namespace paving_lab
