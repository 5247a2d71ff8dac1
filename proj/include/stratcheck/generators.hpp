#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stratcheck/random.hpp"
#include "stratcheck/subspace.hpp"

namespace stratcheck {

/// Seeded random subspaces. Each generator checks its defining relation on
/// the result and redraws (up to 16 times) when a draw is degenerate; after
/// that it throws RankDeficiency.

/// Span of k Gaussian vectors in R^n. Requires k <= n.
Subspace random_subspace(std::size_t n, std::size_t k, Rng& rng);
Subspace random_subspace(std::size_t n, std::size_t k, std::uint64_t seed);

/// P of dim k inside Q of dim l. Requires k <= l <= n.
std::pair<Subspace, Subspace> random_nested(std::size_t n, std::size_t k, std::size_t l, Rng& rng);

/// P of dim k orthogonal to Q of dim l. Requires k + l <= n.
std::pair<Subspace, Subspace> random_orthogonal(std::size_t n, std::size_t k, std::size_t l, Rng& rng);

/// P, Q of dims k, l in general position: dim(P n Q) = max(0, k + l - n).
std::pair<Subspace, Subspace> random_transverse(std::size_t n, std::size_t k, std::size_t l, Rng& rng);

/// P, Q of dims k, l sharing exactly an m-dimensional subspace.
/// Requires m <= min(k, l) and k + l - m <= n.
std::pair<Subspace, Subspace> random_with_intersection(std::size_t n, std::size_t k, std::size_t l, std::size_t m,
                                                       Rng& rng);

/// Columns of an n -> m linear map with spectral norm exactly `norm`
/// (before rounding). Requires n, m >= 1 and norm >= 0.
std::vector<Vector> random_linear_map(std::size_t n, std::size_t m, double norm, Rng& rng);

}  // namespace stratcheck
