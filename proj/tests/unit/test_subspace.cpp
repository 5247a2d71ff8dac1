#include <cmath>

#include "doctest.h"
#include "stratcheck/error.hpp"
#include "stratcheck/generators.hpp"
#include "stratcheck/jacobi_svd.hpp"
#include "stratcheck/subspace.hpp"

using namespace stratcheck;

TEST_CASE("orthonormalize drops dependent vectors") {
    const std::vector<Vector> vs = {{1, 0, 0}, {2, 0, 0}, {1, 1, 0}, {0, 0, 0}};
    const Subspace s = orthonormalize(3, vs);
    CHECK(s.dim() == 2);
    CHECK(s.orthonormality_residual() < 1e-15);
    CHECK(orthonormalize(3, std::vector<Vector>{}).is_zero());
    CHECK_THROWS_AS(orthonormalize(3, std::vector<Vector>{{1, 0}}), DimensionMismatch);
    CHECK_THROWS_AS(orthonormalize(2, std::vector<Vector>{{NAN, 0}}), InvalidArgument);
}

TEST_CASE("from_orthonormal validates the basis") {
    CHECK_NOTHROW(Subspace::from_orthonormal(2, {{1, 0}}));
    CHECK_THROWS_AS(Subspace::from_orthonormal(2, {{1, 1}}), InvalidArgument);
    CHECK_THROWS_AS(Subspace::from_orthonormal(2, {{1, 0, 0}}), DimensionMismatch);
    CHECK_THROWS_AS(Subspace(0), InvalidArgument);
}

TEST_CASE("project and reject split a vector") {
    const std::size_t idx[] = {0, 2};
    const Subspace w = Subspace::coordinate(3, idx);
    const Vector v = {3, -4, 5};
    CHECK(project(v, w) == Vector{3, 0, 5});
    CHECK(reject(v, w) == Vector{0, -4, 0});
    CHECK(reject(v, Subspace(3)) == v);
}

TEST_CASE("orthogonal complement has the complementary dimension") {
    Rng rng(11);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (std::size_t k = 0; k <= n; ++k) {
            const Subspace s = random_subspace(n, k, rng);
            const Subspace c = orthogonal_complement(s);
            CHECK(c.dim() == n - k);
            for (const auto& a : s.basis()) {
                for (const auto& b : c.basis()) CHECK(std::abs(dot(a, b)) < 1e-12);
            }
        }
    }
}

TEST_CASE("principal sines match a frozen reference") {
    // Reference values from an independent LAPACK-based subspace-angle routine.
    const Subspace p = orthonormalize(4, std::vector<Vector>{{1, 2, 0, 1}, {0, 1, 1, -1}});
    const Subspace q = orthonormalize(4, std::vector<Vector>{{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 1, -2}});
    const auto s = principal_sines(p, q);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(0.56879645899452103).epsilon(1e-12));

    const Subspace p2 = orthonormalize(4, std::vector<Vector>{{1, 0, 0, 0}, {0, 1, 0, 0}});
    const Subspace q2 = orthonormalize(4, std::vector<Vector>{{1, 1, 1, 0}, {0, 1, -1, 1}});
    const auto s2 = principal_sines(p2, q2);
    CHECK(s2[0] == doctest::Approx(0.35682208977309005).epsilon(1e-12));
    CHECK(s2[1] == doctest::Approx(0.93417235896271578).epsilon(1e-12));
    CHECK_THROWS_AS(principal_sines(Subspace(4), q2), InvalidArgument);
}

TEST_CASE("sine decomposition directions lie in P with the stated sines") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Subspace p = random_subspace(5, 3, rng);
        const Subspace q = random_subspace(5, 2, rng);
        const auto dec = sine_decomposition(p, q);
        for (std::size_t j = 0; j < dec.sines.size(); ++j) {
            const Vector& u = dec.directions[j];
            CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(norm(reject(u, p)) < 1e-12);
            CHECK(norm(reject(u, q)) == doctest::Approx(dec.sines[j]).epsilon(1e-10));
        }
    }
}

TEST_CASE("rotating the basis leaves the sines unchanged") {
    Rng rng(3);
    const Subspace p = random_subspace(4, 2, rng);
    const Subspace q = random_subspace(4, 3, rng);
    const double c = std::cos(0.7), s = std::sin(0.7);
    const double rot[] = {c, -s, s, c};
    const Subspace pr = rotate_basis(p, rot);
    const auto a = principal_sines(p, q);
    const auto b = principal_sines(pr, q);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    const double bad[] = {1, 0, 0};
    CHECK_THROWS_AS(rotate_basis(p, bad), DimensionMismatch);
}

TEST_CASE("jacobi svd against frozen singular values") {
    const JacobiSvd svd = jacobi_svd({{3, 1, 0}, {1, 2, 1}});
    REQUIRE(svd.singular_values.size() == 2);
    CHECK(svd.singular_values[0] == doctest::Approx(1.6170452043358268).epsilon(1e-13));
    CHECK(svd.singular_values[1] == doctest::Approx(3.6585741494651307).epsilon(1e-13));
    CHECK(spectral_norm({{3, 1, 0}, {1, 2, 1}}) == doctest::Approx(3.6585741494651307).epsilon(1e-13));
    CHECK_THROWS_AS(jacobi_svd({{1, 2}, {1}}), DimensionMismatch);
}

TEST_CASE("jacobi svd right vectors diagonalize A^T A") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Vector> cols;
        const std::size_t m = 2 + rng.index(5), k = 1 + rng.index(4);
        for (std::size_t j = 0; j < k; ++j) cols.push_back(rng.normal_vector(m));
        const JacobiSvd svd = jacobi_svd(cols);
        for (std::size_t j = 0; j < svd.singular_values.size(); ++j) {
            Vector av(m, 0.0);
            for (std::size_t c = 0; c < k; ++c) axpy(svd.right_vectors[j][c], cols[c], av);
            CHECK(norm(av) == doctest::Approx(svd.singular_values[j]).epsilon(1e-10));
            if (j > 0) CHECK(svd.singular_values[j - 1] <= svd.singular_values[j]);
        }
    }
}
