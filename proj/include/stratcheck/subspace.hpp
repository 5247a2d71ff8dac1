#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stratcheck/vector.hpp"

namespace stratcheck {

/// Default rank tolerance used when orthonormalizing spanning sets.
inline constexpr double kOrthoTolerance = 1e-10;

/// A linear subspace of R^n held as an orthonormal basis.
///
/// The zero subspace {0} is a valid value (dim() == 0). Instances are
/// immutable once built.
class Subspace {
public:
    /// {0} in R^n.
    explicit Subspace(std::size_t ambient_dim);

    /// Wraps an already orthonormal basis. Throws InvalidArgument if the basis
    /// is not orthonormal to `tol`, DimensionMismatch on ragged input.
    static Subspace from_orthonormal(std::size_t ambient_dim, std::vector<Vector> basis,
                                     double tol = 1e-9);

    /// R^n itself.
    static Subspace whole(std::size_t ambient_dim);

    /// span(e_i : i in indices).
    static Subspace coordinate(std::size_t ambient_dim, std::span<const std::size_t> indices);

    std::size_t ambient_dim() const noexcept { return ambient_dim_; }
    std::size_t dim() const noexcept { return basis_.size(); }
    bool is_zero() const noexcept { return basis_.empty(); }
    const std::vector<Vector>& basis() const noexcept { return basis_; }

    /// max |<b_i,b_j> - delta_ij|
    double orthonormality_residual() const;

private:
    Subspace(std::size_t ambient_dim, std::vector<Vector> basis);

    std::size_t ambient_dim_;
    std::vector<Vector> basis_;

    friend Subspace orthonormalize(std::size_t, std::span<const Vector>, double);
};

/// Span of `vectors` via modified Gram-Schmidt with one re-orthogonalization
/// pass. A vector whose residual against the running basis has norm <= tol is
/// dropped. All vectors must have length `ambient_dim`.
Subspace orthonormalize(std::size_t ambient_dim, std::span<const Vector> vectors,
                        double tol = kOrthoTolerance);

/// Convenience overload; ambient dimension taken from the first vector.
/// Throws InvalidArgument on an empty list.
Subspace orthonormalize(std::span<const Vector> vectors, double tol = kOrthoTolerance);

/// Orthogonal projection of v onto W.
Vector project(std::span<const double> v, const Subspace& w);

/// v - project(v, W), computed with a second correction pass.
Vector reject(std::span<const double> v, const Subspace& w);

/// W^perp.
Subspace orthogonal_complement(const Subspace& w);

/// Result of decomposing P against Q: the singular values of
/// p -> p - pi_Q(p) restricted to P, ascending, with the matching unit
/// vectors of P (expressed in the ambient space).
struct SineDecomposition {
    std::vector<double> sines;
    std::vector<Vector> directions;
};

/// Principal-sine decomposition of P against Q. Values are clamped to [0,1].
/// Throws InvalidArgument when dim P == 0.
SineDecomposition sine_decomposition(const Subspace& p, const Subspace& q);

/// Ascending principal sines of P against Q; max equals d(P,Q) and min equals
/// delta(P,Q). Throws InvalidArgument when dim P == 0.
std::vector<double> principal_sines(const Subspace& p, const Subspace& q);

/// Rotates the basis of `s` by an orthogonal k x k matrix (row-major, k*k
/// entries). The span is unchanged; used to test basis invariance.
Subspace rotate_basis(const Subspace& s, std::span<const double> rotation);

}  // namespace stratcheck
