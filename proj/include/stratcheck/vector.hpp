#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stratcheck/error.hpp"

namespace stratcheck {

/// Dense real vector. Dimensions in this library are small (n <= 16 typical).
using Vector = std::vector<double>;

inline void require_same_dim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("vector dimensions differ: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) {
    // Scaled to stay finite for very large or very small entries.
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : a) {
        const double y = x / scale;
        s += y * y;
    }
    return scale * std::sqrt(s);
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_dim(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector operator-(const Vector& a, const Vector& b) {
    require_same_dim(a, b);
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vector operator+(const Vector& a, const Vector& b) {
    require_same_dim(a, b);
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vector operator*(double s, const Vector& a) {
    Vector r(a);
    for (double& x : r) x *= s;
    return r;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return norm(d);
}

/// Returns a / |a|; throws InvalidArgument for the zero vector.
inline Vector normalized(const Vector& a) {
    const double n = norm(a);
    if (n == 0.0) throw InvalidArgument("cannot normalize the zero vector");
    return (1.0 / n) * a;
}

inline Vector unit_vector(std::size_t n, std::size_t i) {
    Vector e(n, 0.0);
    e.at(i) = 1.0;
    return e;
}

}  // namespace stratcheck
