#include "stratcheck/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "stratcheck/jacobi_svd.hpp"

namespace stratcheck {

Subspace::Subspace(std::size_t ambient_dim) : ambient_dim_(ambient_dim) {
    if (ambient_dim == 0) throw InvalidArgument("ambient dimension must be >= 1");
}

Subspace::Subspace(std::size_t ambient_dim, std::vector<Vector> basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
    if (ambient_dim == 0) throw InvalidArgument("ambient dimension must be >= 1");
}

Subspace Subspace::from_orthonormal(std::size_t ambient_dim, std::vector<Vector> basis,
                                    double tol) {
    for (const auto& b : basis) {
        if (b.size() != ambient_dim) throw DimensionMismatch("basis vector has wrong length");
    }
    if (basis.size() > ambient_dim) throw InvalidArgument("more basis vectors than dimensions");
    Subspace s(ambient_dim, std::move(basis));
    if (s.orthonormality_residual() > tol) throw InvalidArgument("basis is not orthonormal");
    return s;
}

Subspace Subspace::whole(std::size_t ambient_dim) {
    std::vector<Vector> basis;
    for (std::size_t i = 0; i < ambient_dim; ++i) basis.push_back(unit_vector(ambient_dim, i));
    return Subspace(ambient_dim, std::move(basis));
}

Subspace Subspace::coordinate(std::size_t ambient_dim, std::span<const std::size_t> indices) {
    std::vector<Vector> basis;
    for (std::size_t i : indices) {
        if (i >= ambient_dim) throw InvalidArgument("coordinate index out of range");
        basis.push_back(unit_vector(ambient_dim, i));
    }
    return orthonormalize(ambient_dim, basis);
}

double Subspace::orthonormality_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        for (std::size_t j = i; j < basis_.size(); ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot(basis_[i], basis_[j]) - target));
        }
    }
    return worst;
}

Subspace orthonormalize(std::size_t ambient_dim, std::span<const Vector> vectors, double tol) {
    std::vector<Vector> basis;
    for (const auto& v : vectors) {
        if (v.size() != ambient_dim) throw DimensionMismatch("orthonormalize: vector length mismatch");
        for (double x : v) {
            if (!std::isfinite(x)) throw InvalidArgument("orthonormalize: non-finite entry");
        }
        Vector r = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) axpy(-dot(r, b), b, r);
        }
        const double len = norm(r);
        if (len <= tol || basis.size() == ambient_dim) continue;
        for (double& x : r) x /= len;
        basis.push_back(std::move(r));
    }
    return Subspace(ambient_dim, std::move(basis));
}

Subspace orthonormalize(std::span<const Vector> vectors, double tol) {
    if (vectors.empty()) throw InvalidArgument("orthonormalize: empty list without ambient dimension");
    return orthonormalize(vectors.front().size(), vectors, tol);
}

Vector project(std::span<const double> v, const Subspace& w) {
    if (v.size() != w.ambient_dim()) throw DimensionMismatch("project: dimension mismatch");
    Vector out(v.size(), 0.0);
    for (const auto& b : w.basis()) axpy(dot(v, b), b, out);
    return out;
}

Vector reject(std::span<const double> v, const Subspace& w) {
    if (v.size() != w.ambient_dim()) throw DimensionMismatch("reject: dimension mismatch");
    Vector r(v.begin(), v.end());
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : w.basis()) axpy(-dot(r, b), b, r);
    }
    return r;
}

Subspace orthogonal_complement(const Subspace& w) {
    const std::size_t n = w.ambient_dim();
    std::vector<Vector> candidates = w.basis();
    for (std::size_t i = 0; i < n; ++i) candidates.push_back(unit_vector(n, i));
    // Vectors of W come first, so the complement is everything after them.
    const Subspace full = orthonormalize(n, candidates, 1e-8);
    std::vector<Vector> rest(full.basis().begin() + static_cast<std::ptrdiff_t>(w.dim()),
                             full.basis().end());
    return Subspace::from_orthonormal(n, std::move(rest));
}

SineDecomposition sine_decomposition(const Subspace& p, const Subspace& q) {
    if (p.ambient_dim() != q.ambient_dim()) {
        throw DimensionMismatch("sine_decomposition: ambient dimensions differ");
    }
    if (p.dim() == 0) throw InvalidArgument("sine_decomposition: P is the zero subspace");

    std::vector<Vector> residuals;
    residuals.reserve(p.dim());
    for (const auto& b : p.basis()) residuals.push_back(reject(b, q));

    JacobiSvd svd = jacobi_svd(std::move(residuals));
    SineDecomposition out;
    out.sines.reserve(p.dim());
    out.directions.reserve(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) {
        out.sines.push_back(std::clamp(svd.singular_values[j], 0.0, 1.0));
        Vector dir(p.ambient_dim(), 0.0);
        for (std::size_t i = 0; i < p.dim(); ++i) axpy(svd.right_vectors[j][i], p.basis()[i], dir);
        out.directions.push_back(std::move(dir));
    }
    return out;
}

std::vector<double> principal_sines(const Subspace& p, const Subspace& q) {
    return sine_decomposition(p, q).sines;
}

Subspace rotate_basis(const Subspace& s, std::span<const double> rotation) {
    const std::size_t k = s.dim();
    if (rotation.size() != k * k) throw DimensionMismatch("rotate_basis: rotation must be k x k");
    std::vector<Vector> basis;
    for (std::size_t r = 0; r < k; ++r) {
        Vector b(s.ambient_dim(), 0.0);
        for (std::size_t c = 0; c < k; ++c) axpy(rotation[r * k + c], s.basis()[c], b);
        basis.push_back(std::move(b));
    }
    return Subspace::from_orthonormal(s.ambient_dim(), std::move(basis), 1e-8);
}

}  // namespace stratcheck
