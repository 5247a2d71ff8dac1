#include "stratcheck/jacobi_svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stratcheck {

JacobiSvd jacobi_svd(std::vector<Vector> columns, std::size_t max_sweeps) {
    const std::size_t k = columns.size();
    JacobiSvd out;
    if (k == 0) return out;
    const std::size_t m = columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != m) throw DimensionMismatch("jacobi_svd: ragged columns");
    }

    std::vector<Vector> v(k, Vector(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) v[i][i] = 1.0;

    constexpr double kEps = 1e-15;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    alpha += columns[i][r] * columns[i][r];
                    beta += columns[j][r] * columns[j][r];
                    gamma += columns[i][r] * columns[j][r];
                }
                if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const double a = columns[i][r];
                    const double b = columns[j][r];
                    columns[i][r] = c * a - s * b;
                    columns[j][r] = s * a + c * b;
                }
                for (std::size_t r = 0; r < k; ++r) {
                    const double a = v[i][r];
                    const double b = v[j][r];
                    v[i][r] = c * a - s * b;
                    v[j][r] = s * a + c * b;
                }
            }
        }
        out.sweeps = sweep + 1;
        if (!rotated) break;
    }

    std::vector<double> sv(k);
    for (std::size_t i = 0; i < k; ++i) sv[i] = norm(columns[i]);
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sv[a] < sv[b]; });
    out.singular_values.reserve(k);
    out.right_vectors.reserve(k);
    for (std::size_t idx : order) {
        out.singular_values.push_back(sv[idx]);
        out.right_vectors.push_back(std::move(v[idx]));
    }
    return out;
}

double spectral_norm(const std::vector<Vector>& columns) {
    if (columns.empty()) return 0.0;
    return jacobi_svd(columns).singular_values.back();
}

}  // namespace stratcheck
