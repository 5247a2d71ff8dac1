#include "stratcheck/grassmann.hpp"

#include <algorithm>
#include <cmath>

namespace stratcheck {

namespace {

void require_same_ambient(const Subspace& a, const Subspace& b, const char* what) {
    if (a.ambient_dim() != b.ambient_dim()) {
        throw DimensionMismatch(std::string(what) + ": ambient dimensions differ");
    }
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

ProjectiveLine::ProjectiveLine(const Vector& direction) : direction_(normalized(direction)) {
    for (double x : direction_) {
        if (x != 0.0) {
            if (x < 0.0) {
                for (double& y : direction_) y = -y;
            }
            break;
        }
    }
}

Subspace ProjectiveLine::as_subspace() const {
    return Subspace::from_orthonormal(direction_.size(), {direction_}, 1e-8);
}

double dist_vec(std::span<const double> v, const Subspace& w) {
    if (v.size() != w.ambient_dim()) throw DimensionMismatch("dist_vec: dimension mismatch");
    if (std::abs(norm(v) - 1.0) > 1e-8) throw InvalidArgument("dist_vec: v must be a unit vector");
    if (w.is_zero()) return 1.0;
    return clamp_unit(norm(reject(v, w)));
}

double dist_d(const Subspace& p, const Subspace& q) {
    require_same_ambient(p, q, "dist_d");
    if (p.is_zero()) return 0.0;
    return clamp_unit(principal_sines(p, q).back());
}

double dist_D(const Subspace& p, const Subspace& q) {
    return std::max(dist_d(p, q), dist_d(q, p));
}

double dist_delta(const Subspace& v, const Subspace& w) {
    require_same_ambient(v, w, "dist_delta");
    if (v.is_zero()) return 1.0;
    return clamp_unit(principal_sines(v, w).front());
}

double dist_projective(const ProjectiveLine& a, const ProjectiveLine& b) {
    if (a.ambient_dim() != b.ambient_dim()) {
        throw DimensionMismatch("dist_projective: dimension mismatch");
    }
    const Vector& u = a.direction();
    const Vector& w = b.direction();
    return std::min(norm(u - w), norm(u + w));
}

Subspace intersect(const Subspace& s, const Subspace& k, double tol) {
    require_same_ambient(s, k, "intersect");
    const std::size_t n = s.ambient_dim();
    if (s.is_zero() || k.is_zero()) return Subspace(n);
    // Eigenvalues of pi_S pi_K on S are cos^2 = 1 - sin^2 of the principal angles.
    const SineDecomposition dec = sine_decomposition(s, k);
    const std::size_t cap = std::min(s.dim(), k.dim());
    std::vector<Vector> picked;
    for (std::size_t j = 0; j < dec.sines.size() && picked.size() < cap; ++j) {
        if (dec.sines[j] * dec.sines[j] <= tol) picked.push_back(dec.directions[j]);
    }
    return orthonormalize(n, picked, 1e-8);
}

Subspace residual_part(const Subspace& s, const Subspace& k, double sine_tol) {
    require_same_ambient(s, k, "residual_part");
    const std::size_t n = s.ambient_dim();
    if (s.is_zero()) return Subspace(n);
    const SineDecomposition dec = sine_decomposition(s, k);
    std::vector<Vector> picked;
    for (std::size_t j = 0; j < dec.sines.size(); ++j) {
        if (dec.sines[j] > sine_tol) picked.push_back(dec.directions[j]);
    }
    return orthonormalize(n, picked, 1e-8);
}

double lambda_angle(const Subspace& s, const Subspace& k, double tol) {
    require_same_ambient(s, k, "lambda_angle");
    if (dist_d(s, k) <= tol || dist_d(k, s) <= tol) return 0.0;
    const Subspace s_perp = residual_part(s, k, tol);
    const Subspace k_perp = residual_part(k, s, tol);
    return dist_delta(s_perp, k_perp);
}

double projection_lipschitz_bound(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("projection_lipschitz_bound: alpha must lie in (0, 1]");
    }
    return 2.0 * std::sqrt(2.0) / (alpha * alpha);
}

BoundPair intersection_distance_bound(std::span<const double> v, const Subspace& s,
                                      const Subspace& k, double tol) {
    require_same_ambient(s, k, "intersection_distance_bound");
    const double lambda = lambda_angle(s, k, tol);
    if (lambda <= 0.0) {
        throw InvalidArgument("intersection_distance_bound: lambda(S,K) = 0, configuration is not transverse");
    }
    const Subspace sk = intersect(s, k, tol * tol);
    BoundPair out;
    out.lhs = dist_vec(v, sk);
    out.rhs = (dist_vec(v, s) + dist_vec(v, k)) / lambda;
    return out;
}

double vertical_separation_bound(double lipschitz) {
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
        throw InvalidArgument("vertical_separation_bound: L must be finite and >= 0");
    }
    return 1.0 / std::sqrt(1.0 + lipschitz * lipschitz);
}

}  // namespace stratcheck
