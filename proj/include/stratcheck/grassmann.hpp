#pragma once

#include <span>

#include "stratcheck/subspace.hpp"

namespace stratcheck {

/// Default threshold for deciding containment S in K by d(S,K) <= tol.
inline constexpr double kContainmentTolerance = 1e-8;
/// Default threshold on 1 - eigenvalue of pi_S pi_K when extracting S n K.
inline constexpr double kIntersectionTolerance = 1e-8;

/// A point of projective space: a line through the origin, represented by a
/// unit direction whose first nonzero coordinate is positive.
class ProjectiveLine {
public:
    /// Throws InvalidArgument for the zero vector.
    explicit ProjectiveLine(const Vector& direction);

    const Vector& direction() const noexcept { return direction_; }
    std::size_t ambient_dim() const noexcept { return direction_.size(); }
    Subspace as_subspace() const;

private:
    Vector direction_;
};

/// Sine distance from a unit vector to W; 1 when W = {0}.
/// Throws InvalidArgument when | |v| - 1 | > 1e-8.
double dist_vec(std::span<const double> v, const Subspace& w);

/// One-sided deviation d(P,Q): sup over unit p in P of dist_vec(p, Q); 0 for P = {0}.
double dist_d(const Subspace& p, const Subspace& q);

/// max(d(P,Q), d(Q,P)). Dimensions are not compared; callers that need the
/// disjoint-union convention (distance 1 between different dimensions)
/// compare dim() themselves.
double dist_D(const Subspace& p, const Subspace& q);

/// delta(V,W): inf over unit v in V of dist_vec(v, W); 1 for V = {0}.
double dist_delta(const Subspace& v, const Subspace& w);

/// min(|u - w|, |u + w|) for the unit representatives.
double dist_projective(const ProjectiveLine& a, const ProjectiveLine& b);

/// S n K as the span of eigenvectors of pi_S o pi_K whose eigenvalue lies
/// within `tol` of 1. The returned basis lies exactly in S.
Subspace intersect(const Subspace& s, const Subspace& k, double tol = kIntersectionTolerance);

/// Component of S orthogonal to its near-intersection with K: the span of
/// principal directions of S against K whose sine exceeds `sine_tol`.
Subspace residual_part(const Subspace& s, const Subspace& k, double sine_tol);

/// lambda(S,K), the sine of the minimal angle between S and K measured
/// orthogonally to S n K. Zero when either space is contained in the other
/// (decided by one-sided d <= tol). The intersection used for the orthogonal
/// parts is taken with the same sine threshold `tol`.
double lambda_angle(const Subspace& s, const Subspace& k, double tol = kContainmentTolerance);

/// 2 sqrt(2) / alpha^2, the Lipschitz constant of projectivized orthogonal
/// projection on directions at sine-distance >= alpha from V^perp.
/// Throws InvalidArgument unless 0 < alpha <= 1.
double projection_lipschitz_bound(double alpha);

struct BoundPair {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack() const noexcept { return rhs - lhs; }
};

/// lhs = d(v, S n K); rhs = (d(v,S) + d(v,K)) / lambda(S,K).
/// Throws InvalidArgument when lambda(S,K) == 0.
BoundPair intersection_distance_bound(std::span<const double> v, const Subspace& s,
                                      const Subspace& k, double tol = kContainmentTolerance);

/// 1 / sqrt(1 + L^2): lower bound of delta(T graph f, {0} x R^m) for an
/// L-Lipschitz map. Throws InvalidArgument for negative L.
double vertical_separation_bound(double lipschitz);

}  // namespace stratcheck
