#include "stratcheck/generators.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "stratcheck/error.hpp"
#include "stratcheck/grassmann.hpp"
#include "stratcheck/jacobi_svd.hpp"

namespace stratcheck {

namespace {

constexpr int kMaxDraws = 16;
// A draw is rejected when a sine that should be bounded away from zero is
// smaller than this.
constexpr double kSeparation = 1e-3;

template <class Draw>
auto redraw(const char* what, Draw&& draw) {
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        if (auto out = draw()) return *out;
    }
    throw RankDeficiency(std::string(what) + ": degenerate draw " + std::to_string(kMaxDraws) + " times");
}

Subspace span_of(std::size_t n, const std::vector<Vector>& a, const std::vector<Vector>& b) {
    std::vector<Vector> all = a;
    all.insert(all.end(), b.begin(), b.end());
    return orthonormalize(n, all);
}

// Number of principal sines of p against q at or below 1e-10, and whether the
// rest are all at least kSeparation.
std::pair<std::size_t, bool> sine_profile(const Subspace& p, const Subspace& q) {
    if (p.is_zero()) return {0, true};
    std::size_t zeros = 0;
    bool separated = true;
    for (double s : principal_sines(p, q)) {
        if (s <= 1e-10) {
            ++zeros;
        } else if (s < kSeparation) {
            separated = false;
        }
    }
    return {zeros, separated};
}

}  // namespace

Subspace random_subspace(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw InvalidArgument("random_subspace: k must not exceed n");
    return redraw("random_subspace", [&]() -> std::optional<Subspace> {
        std::vector<Vector> vs;
        for (std::size_t i = 0; i < k; ++i) vs.push_back(rng.normal_vector(n));
        Subspace s = orthonormalize(n, vs, 1e-6);
        if (s.dim() != k) return std::nullopt;
        return s;
    });
}

Subspace random_subspace(std::size_t n, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    return random_subspace(n, k, rng);
}

std::pair<Subspace, Subspace> random_nested(std::size_t n, std::size_t k, std::size_t l, Rng& rng) {
    if (k > l || l > n) throw InvalidArgument("random_nested: requires k <= l <= n");
    return redraw("random_nested", [&]() -> std::optional<std::pair<Subspace, Subspace>> {
        Subspace q = random_subspace(n, l, rng);
        std::vector<Vector> vs;
        for (std::size_t i = 0; i < k; ++i) {
            Vector v(n, 0.0);
            for (const Vector& b : q.basis()) axpy(rng.normal(), b, v);
            vs.push_back(std::move(v));
        }
        Subspace p = orthonormalize(n, vs, 1e-6);
        if (p.dim() != k || dist_d(p, q) > 1e-12) return std::nullopt;
        return std::pair{std::move(p), std::move(q)};
    });
}

std::pair<Subspace, Subspace> random_orthogonal(std::size_t n, std::size_t k, std::size_t l, Rng& rng) {
    if (k + l > n) throw InvalidArgument("random_orthogonal: requires k + l <= n");
    return redraw("random_orthogonal", [&]() -> std::optional<std::pair<Subspace, Subspace>> {
        const Subspace all = random_subspace(n, k + l, rng);
        const auto& b = all.basis();
        std::vector<Vector> pb(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<Vector> qb(b.begin() + static_cast<std::ptrdiff_t>(k), b.end());
        Subspace p = Subspace::from_orthonormal(n, pb, 1e-9);
        Subspace q = Subspace::from_orthonormal(n, qb, 1e-9);
        if (k > 0 && l > 0 && std::abs(dist_delta(p, q) - 1.0) > 1e-12) return std::nullopt;
        return std::pair{std::move(p), std::move(q)};
    });
}

std::pair<Subspace, Subspace> random_transverse(std::size_t n, std::size_t k, std::size_t l, Rng& rng) {
    if (k > n || l > n) throw InvalidArgument("random_transverse: dimensions exceed n");
    const std::size_t expected = k + l > n ? k + l - n : 0;
    return redraw("random_transverse", [&]() -> std::optional<std::pair<Subspace, Subspace>> {
        Subspace p = random_subspace(n, k, rng);
        Subspace q = random_subspace(n, l, rng);
        const auto [zeros, separated] = sine_profile(p, q);
        if (zeros != expected || !separated || intersect(p, q).dim() != expected) return std::nullopt;
        return std::pair{std::move(p), std::move(q)};
    });
}

std::pair<Subspace, Subspace> random_with_intersection(std::size_t n, std::size_t k, std::size_t l, std::size_t m,
                                                       Rng& rng) {
    if (m > std::min(k, l) || k + l - m > n) {
        throw InvalidArgument("random_with_intersection: requires m <= min(k, l) and k + l - m <= n");
    }
    return redraw("random_with_intersection", [&]() -> std::optional<std::pair<Subspace, Subspace>> {
        const Subspace common = random_subspace(n, m, rng);
        const Subspace rest = orthogonal_complement(common);
        auto extend = [&](std::size_t extra) {
            std::vector<Vector> vs;
            for (std::size_t i = 0; i < extra; ++i) {
                Vector v(n, 0.0);
                for (const Vector& b : rest.basis()) axpy(rng.normal(), b, v);
                vs.push_back(std::move(v));
            }
            return span_of(n, common.basis(), vs);
        };
        Subspace p = extend(k - m);
        Subspace q = extend(l - m);
        if (p.dim() != k || q.dim() != l) return std::nullopt;
        const auto [zeros, separated] = sine_profile(p, q);
        if (zeros != m || !separated || intersect(p, q).dim() != m) return std::nullopt;
        return std::pair{std::move(p), std::move(q)};
    });
}

std::vector<Vector> random_linear_map(std::size_t n, std::size_t m, double target, Rng& rng) {
    if (n == 0 || m == 0 || !(target >= 0.0)) throw InvalidArgument("random_linear_map: bad shape or norm");
    return redraw("random_linear_map", [&]() -> std::optional<std::vector<Vector>> {
        std::vector<Vector> cols;
        for (std::size_t j = 0; j < n; ++j) cols.push_back(rng.normal_vector(m));
        const double s = spectral_norm(cols);
        if (s < 1e-6) return std::nullopt;
        for (Vector& c : cols) {
            for (double& x : c) x *= target / s;
        }
        return cols;
    });
}

}  // namespace stratcheck
