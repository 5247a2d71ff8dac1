#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace stratcheck {

/// Labels for where an expected value comes from.
inline constexpr const char* kPublished = "published-example";
inline constexpr const char* kByConstruction = "by-construction";
inline constexpr const char* kIndependent = "independent-derivation";

struct ExpectedValue {
    std::string quantity;
    double value = 0.0;
    std::string provenance;
    std::string derivation;
};

/// A ready-made scenario document with the values it is expected to
/// reproduce. The expectations are also written into the document's
/// metadata and, where a check can assert them, into its "expect" block.
struct Fixture {
    std::string name;
    std::string summary;
    nlohmann::json scenario;
    std::vector<ExpectedValue> expected;
};

inline constexpr std::uint64_t kFixtureSeed = 1;

/// Cusp region under y -> sqrt(y): weakly Lipschitz at the cusp point
/// although the derivative blows up there.
Fixture fixture_cusp_sqrt();
/// Flat C1 function on the upper half-plane, weakly Lipschitz along the
/// boundary with ratios of order y^3, not Lipschitz at the origin.
Fixture fixture_flat_c1();
/// Surface y = t sqrt(x) over the t-axis; Verdier fails at the origin.
Fixture fixture_verdier_fail();
/// Surface y = t x over the t-axis; Verdier holds, and so does the
/// projection suite for a linear map.
Fixture fixture_verdier_linear();
/// Open half-plane over its boundary line; Whitney (B) holds.
Fixture fixture_half_plane();
/// |p|^(1/4) over the half-plane; weakly Lipschitz fails at the origin.
Fixture fixture_wl_fail();
/// Radial map p -> |p| p over the half-plane; weakly bi-Lipschitz fails.
Fixture fixture_wbl_fail();
/// Two families in R^4 meeting transversally, one a product with a line.
Fixture fixture_lift_transversal();

std::vector<std::string> fixture_names();
/// Throws InvalidArgument for an unknown name.
Fixture fixture(const std::string& name);

}  // namespace stratcheck
