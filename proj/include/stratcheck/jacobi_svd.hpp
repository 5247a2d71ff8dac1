#pragma once

#include <cstddef>
#include <vector>

#include "stratcheck/vector.hpp"

namespace stratcheck {

/// Thin SVD of a small dense matrix given by its columns, computed by
/// one-sided (Hestenes) Jacobi rotations.
///
/// `singular_values[j]` pairs with the unit right singular vector
/// `right_vectors[j]` (length = number of columns). Values are sorted
/// ascending.
struct JacobiSvd {
    std::vector<double> singular_values;
    std::vector<Vector> right_vectors;
    std::size_t sweeps = 0;
};

/// `columns` must all share one length. At most `max_sweeps` full sweeps are
/// performed; convergence is reached when every column pair is orthogonal to
/// a relative 1e-15.
JacobiSvd jacobi_svd(std::vector<Vector> columns, std::size_t max_sweeps = 64);

/// Largest singular value (spectral norm) of the matrix with these columns.
double spectral_norm(const std::vector<Vector>& columns);

}  // namespace stratcheck
