#include "stratcheck/fixtures.hpp"

#include <cmath>

#include "stratcheck/error.hpp"

namespace stratcheck {

using nlohmann::json;

namespace {

// Explicit arrays: a braced list of two strings would otherwise become an object.
json list(std::initializer_list<nlohmann::detail::json_ref<json>> items) { return json::array(items); }

json stratum(const std::string& name, std::vector<std::string> params, json domain, std::vector<std::string> chart) {
    return {{"name", name}, {"params", params}, {"domain", domain}, {"chart", chart}};
}

json schedule(int shells = 8, int samples = 64) {
    return {{"r0", 0.5}, {"rho", 0.5}, {"shells", shells}, {"samples", samples}, {"seed", kFixtureSeed}};
}

json expected_json(const std::vector<ExpectedValue>& ev) {
    json out = json::array();
    for (const auto& e : ev) {
        out.push_back({{"quantity", e.quantity}, {"value", e.value}, {"provenance", e.provenance},
                       {"derivation", e.derivation}});
    }
    return out;
}

Fixture finish(std::string name, std::string summary, json doc, std::vector<ExpectedValue> ev) {
    doc["version"] = 1;
    doc["name"] = name;
    doc["description"] = summary;
    doc["metadata"] = {{"fixture", name}, {"pinned_seed", kFixtureSeed}, {"expected", expected_json(ev)}};
    return {std::move(name), std::move(summary), std::move(doc), std::move(ev)};
}

// Upper half-plane over the x-axis, the shared base of several fixtures.
json half_plane_strata() {
    return json::array({stratum("upper", {"u", "v"}, {{-1, 1}, {0, 1}}, {"u", "v"}),
                        stratum("axis", {"u"}, {{-1, 1}}, {"u", "0"})});
}

}  // namespace

Fixture fixture_cusp_sqrt() {
    json doc;
    doc["ambient"] = list({"x", "y"});
    doc["strata"] = json::array({
        // s in (1/2, 1) sweeps the region between y = x^2/2 and y = x^2.
        stratum("cusp", {"u", "s"}, {{0, 1}, {0.5, 1}}, {"u", "s*u^2"}),
        stratum("lower_edge", {"u"}, {{0, 1}}, {"u", "u^2/2"}),
        stratum("tip", {}, json::array(), {"0", "0"}),
    });
    doc["frontier"] = list({list({"lower_edge", "cusp"}), list({"tip", "cusp"}), list({"tip", "lower_edge"})});
    doc["maps"] = {{"f", {{"exprs", list({"x", "sqrt(y)"})}}}};
    doc["defaults"] = {{"schedule", schedule()}};
    const double sqrt2 = std::sqrt(2.0);
    doc["checks"] = json::array({
        {{"id", "wl_tip"},
         {"kind", "WL"},
         {"map", "f"},
         {"pair", list({"tip", "cusp"})},
         {"base_point", {0, 0}},
         {"provenance", kPublished},
         {"expect", {{"verdict", "holds"}, {"max_sup", sqrt2 + 0.05}}}},
        {{"id", "projection_whitney_b"},
         {"kind", "Projection"},
         {"map", "f"},
         {"condition", "WhitneyB"},
         {"pair", list({"tip", "cusp"})},
         {"base_point", {0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"implication_satisfied", true}}}},
        {{"id", "dfdy_1e-2"},
         {"kind", "Derivative"},
         {"map", "f"},
         {"component", 1},
         {"wrt", "y"},
         {"point", list({0.1, 1e-2})},
         {"expected", 5.0},
         {"provenance", kIndependent}},
        {{"id", "dfdy_1e-4"},
         {"kind", "Derivative"},
         {"map", "f"},
         {"component", 1},
         {"wrt", "y"},
         {"point", list({0.01, 1e-4})},
         {"expected", 50.0},
         {"provenance", kIndependent}},
        {{"id", "dfdy_1e-6"},
         {"kind", "Derivative"},
         {"map", "f"},
         {"component", 1},
         {"wrt", "y"},
         {"point", list({0.001, 1e-6})},
         {"expected", 500.0},
         {"rel_tol", 1e-9},
         {"provenance", kIndependent}},
        {{"id", "frontier"}, {"kind", "Frontier"}, {"provenance", kByConstruction}, {"expect", {{"ok", true}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"wl_tip: sup of |f(p) - f(0)| / |p| on every shell", sqrt2, kPublished,
         "|f(x,y)| / |(x,y)| = sqrt((x^2 + y) / (x^2 + y^2)) <= sqrt(2 x^2 / x^2) when y < x^2"},
        {"ratio at (x, x^2), x = 0.1", std::sqrt((0.01 + 0.01) / (0.01 + 1e-4)), kPublished,
         "sqrt((x^2 + x^2) / (x^2 + x^4))"},
        {"df2/dy at y = 1e-6", 500.0, kIndependent, "1 / (2 sqrt(y)); grows without bound as y -> 0"},
    };
    return finish("cusp_sqrt", "cusp region x^2/2 < y < x^2 under f = (x, sqrt(y))", std::move(doc), std::move(ev));
}

Fixture fixture_flat_c1() {
    json doc;
    doc["ambient"] = list({"x", "y"});
    doc["strata"] = json::array({
        // x = s^9 concentrates samples near x = 0, where the support
        // x^2 < y^9 of f lives; the linear term keeps the chart immersive.
        stratum("upper", {"s", "t"}, {{-1, 1}, {0, 1}}, {"s^9 + 1e-12*s", "t"}),
        stratum("axis", {"u"}, {{-1, 1}}, {"u", "0"}),
    });
    doc["frontier"] = list({list({"axis", "upper"})});
    doc["maps"] = {{"f", {{"exprs", list({"if(x^2 < y^9, (x^2/y^7 - y^2)^2, 0)"})}}}};
    doc["defaults"] = {{"schedule", schedule()}};
    const double c = 8.0 / (3.0 * std::sqrt(3.0));
    doc["checks"] = json::array({
        {{"id", "wl_axis"},
         {"kind", "WL"},
         {"map", "f"},
         {"pair", list({"axis", "upper"})},
         {"base_point", {0, 0}},
         {"provenance", kPublished},
         {"expect", {{"verdict", "holds"}, {"slope_min", 2.7}, {"slope_max", 3.3}}}},
        {{"id", "dfdx_y0.04"},
         {"kind", "Derivative"},
         {"map", "f"},
         {"component", 0},
         {"wrt", "x"},
         {"point", list({"0.04^4.5/sqrt(3)", 0.04})},
         {"expected", "8/(3*sqrt(3))/sqrt(0.04)"},
         {"abs", true},
         {"rel_tol", 1e-6},
         {"provenance", kPublished}},
        {{"id", "dfdx_y0.01"},
         {"kind", "Derivative"},
         {"map", "f"},
         {"component", 0},
         {"wrt", "x"},
         {"point", list({"0.01^4.5/sqrt(3)", 0.01})},
         {"expected", "8/(3*sqrt(3))/sqrt(0.01)"},
         {"abs", true},
         {"rel_tol", 1e-6},
         {"provenance", kPublished}},
        {{"id", "frontier"}, {"kind", "Frontier"}, {"provenance", kByConstruction}, {"expect", {{"ok", true}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"wl_axis: log-log slope of shell sups", 3.0, kPublished,
         "|f(x,y) - f(x',0)| / |(x,y) - (x',0)| <= y^4 / y = y^3"},
        {"|df/dx| at (y^4.5/sqrt(3), y), y = 0.04", c / 0.2, kPublished, "(8 / (3 sqrt(3))) / sqrt(y)"},
        {"|df/dx| at (y^4.5/sqrt(3), y), y = 0.01", c / 0.1, kPublished, "(8 / (3 sqrt(3))) / sqrt(y)"},
    };
    return finish("flat_c1", "flat C1 function on the upper half-plane, zero off x^2 < y^9", std::move(doc),
                  std::move(ev));
}

Fixture fixture_verdier_fail() {
    json doc;
    doc["ambient"] = list({"x", "t", "y"});
    doc["strata"] = json::array({
        stratum("sheet", {"u", "v"}, {{0, 1}, {-1, 1}}, {"u", "v", "v*sqrt(u)"}),
        stratum("edge", {"v"}, {{-1, 1}}, {"0", "v", "0"}),
    });
    doc["frontier"] = list({list({"edge", "sheet"})});
    doc["defaults"] = {{"schedule", schedule()}};
    doc["checks"] = json::array({
        {{"id", "verdier_origin"},
         {"kind", "Verdier"},
         {"pair", list({"edge", "sheet"})},
         {"base_point", {0, 0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"verdict", "fails"}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"verdier_origin: d(T_x edge, T_y sheet) / |x - y| grows as r -> 0", -0.5, kIndependent,
         "normal of the sheet is (-v/(2 sqrt u), -sqrt u, 1); the t-axis makes sine sqrt(u) / |n| with it, "
         "which is of order sqrt(r) at distance r, so the ratio grows at least like r^(-1/2)"},
    };
    return finish("verdier_fail", "surface y = t sqrt(x) over the t-axis in R^3", std::move(doc), std::move(ev));
}

Fixture fixture_verdier_linear() {
    json doc;
    doc["ambient"] = list({"x", "t", "y"});
    doc["strata"] = json::array({
        stratum("sheet", {"u", "v"}, {{0, 1}, {-1, 1}}, {"u", "v", "v*u"}),
        stratum("edge", {"v"}, {{-1, 1}}, {"0", "v", "0"}),
    });
    doc["frontier"] = list({list({"edge", "sheet"})});
    doc["maps"] = {{"g", {{"exprs", list({"x + 2*t - y"})}}}};
    doc["defaults"] = {{"schedule", schedule()}};
    doc["checks"] = json::array({
        {{"id", "verdier_origin"},
         {"kind", "Verdier"},
         {"pair", list({"edge", "sheet"})},
         {"base_point", {0, 0, 0}},
         {"provenance", kByConstruction},
         {"expect", {{"verdict", "holds"}}}},
        {{"id", "projection_verdier"},
         {"kind", "Projection"},
         {"map", "g"},
         {"condition", "Verdier"},
         {"pair", list({"edge", "sheet"})},
         {"base_point", {0, 0, 0}},
         {"provenance", kByConstruction},
         {"expect", {{"implication_satisfied", true}, {"graph_verdict", "holds"}}}},
        {{"id", "frontier"}, {"kind", "Frontier"}, {"provenance", kByConstruction}, {"expect", {{"ok", true}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"verdier_origin: ratio bound", 1.0, kByConstruction,
         "normal (-v, -u, 1); sine to the t-axis is u / |n| <= u <= |x - y|"},
    };
    return finish("verdier_linear", "surface y = t x over the t-axis in R^3", std::move(doc), std::move(ev));
}

Fixture fixture_half_plane() {
    json doc;
    doc["ambient"] = list({"x", "y"});
    doc["strata"] = half_plane_strata();
    doc["frontier"] = list({list({"axis", "upper"})});
    doc["defaults"] = {{"schedule", schedule()}};
    doc["checks"] = json::array({
        {{"id", "whitney_b_origin"},
         {"kind", "WhitneyB"},
         {"pair", list({"axis", "upper"})},
         {"base_point", {0, 0}},
         {"provenance", kByConstruction},
         {"expect", {{"verdict", "holds"}, {"max_sup", 1e-12}}}},
        {{"id", "verdier_origin"},
         {"kind", "Verdier"},
         {"pair", list({"axis", "upper"})},
         {"base_point", {0, 0}},
         {"provenance", kByConstruction},
         {"expect", {{"verdict", "holds"}}}},
        {{"id", "frontier"}, {"kind", "Frontier"}, {"provenance", kByConstruction}, {"expect", {{"ok", true}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"whitney_b_origin: secant defect", 0.0, kByConstruction, "every tangent plane of the open half-plane is R^2"},
    };
    return finish("half_plane", "open upper half-plane over the x-axis", std::move(doc), std::move(ev));
}

Fixture fixture_wl_fail() {
    json doc;
    doc["ambient"] = list({"x", "y"});
    doc["strata"] = json::array({
        stratum("upper", {"u", "v"}, {{-1, 1}, {0, 1}}, {"u", "v"}),
        stratum("left_axis", {"u"}, {{-1, 0}}, {"u", "0"}),
        stratum("right_axis", {"u"}, {{0, 1}}, {"u", "0"}),
        stratum("origin", {}, json::array(), {"0", "0"}),
    });
    doc["frontier"] = list({list({"left_axis", "upper"}), list({"right_axis", "upper"}), list({"origin", "upper"}),
                            list({"origin", "left_axis"}), list({"origin", "right_axis"})});
    doc["maps"] = {{"f", {{"exprs", list({"(x^2 + y^2)^(1/8)"})}, {"per_stratum", {{"origin", list({"0"})}}}}}};
    doc["defaults"] = {{"schedule", schedule()}};
    doc["checks"] = json::array({
        {{"id", "wl_origin"},
         {"kind", "WL"},
         {"map", "f"},
         {"pair", list({"origin", "upper"})},
         {"base_point", {0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"verdict", "fails"}}}},
        {{"id", "frontier"}, {"kind", "Frontier"}, {"provenance", kByConstruction}, {"expect", {{"ok", true}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"wl_origin: log-log slope of shell sups", -0.75, kIndependent,
         "|f(p) - f(0)| / |p| = |p|^(1/4) / |p| = |p|^(-3/4)"},
    };
    return finish("wl_fail", "|p|^(1/4) on the upper half-plane, split axis and origin", std::move(doc),
                  std::move(ev));
}

Fixture fixture_wbl_fail() {
    json doc;
    doc["ambient"] = list({"x", "y"});
    doc["strata"] = half_plane_strata();
    doc["frontier"] = list({list({"axis", "upper"})});
    doc["maps"] = {{"f", {{"exprs", list({"x*sqrt(x^2 + y^2)", "y*sqrt(x^2 + y^2)"})}}}};
    doc["defaults"] = {{"schedule", schedule()}};
    doc["checks"] = json::array({
        {{"id", "wl_origin"},
         {"kind", "WL"},
         {"map", "f"},
         {"pair", list({"axis", "upper"})},
         {"base_point", {0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"verdict", "holds"}}}},
        {{"id", "wbl_origin"},
         {"kind", "WBL"},
         {"map", "f"},
         {"pair", list({"axis", "upper"})},
         {"base_point", {0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"verdict", "fails"}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"wbl_origin: log-log slope of shell infs", 1.0, kIndependent,
         "|f(p) - f(q)| <= 3 max(|p|, |q|) |p - q|, so the quotient is O(r) on shells of radius r"},
    };
    return finish("wbl_fail", "radial map p -> |p| p on the upper half-plane", std::move(doc), std::move(ev));
}

Fixture fixture_lift_transversal() {
    json doc;
    doc["ambient"] = list({"p", "q", "c", "w"});
    doc["strata"] = json::array({
        stratum("sheet1", {"a", "b", "c"}, {{-1, 1}, {-1, 1}, {0, 1}}, {"a", "b", "c", "a + b*c"}),
        stratum("edge1", {"a", "b"}, {{-1, 1}, {-1, 1}}, {"a", "b", "0", "a"}),
        // Product of the parabola q = p^2 (with c) and the w-line.
        stratum("sheet2", {"a", "c", "w"}, {{-1, 1}, {0, 1}, {-2, 2}}, {"a", "a^2", "c", "w"}),
        stratum("edge2", {"a", "w"}, {{-1, 1}, {-2, 2}}, {"a", "a^2", "0", "w"}),
        stratum("sheet12", {"a", "c"}, {{-1, 1}, {0, 1}}, {"a", "a^2", "c", "a + a^2*c"}),
        stratum("edge12", {"a"}, {{-1, 1}}, {"a", "a^2", "0", "a"}),
    });
    doc["frontier"] = list({list({"edge1", "sheet1"}), list({"edge2", "sheet2"}), list({"edge12", "sheet12"})});
    doc["defaults"] = {{"schedule", schedule(6, 48)}};
    const json names = {{"lambda1", "sheet1"}, {"gamma1", "edge1"},     {"lambda2", "sheet2"},
                        {"gamma2", "edge2"},   {"lambda12", "sheet12"}, {"gamma12", "edge12"}};
    doc["checks"] = json::array({
        {{"id", "transversal_whitney_b"},
         {"kind", "Transversal"},
         {"condition", "WhitneyB"},
         {"strata", names},
         {"base_point", {0, 0, 0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"bound_satisfied", true}}}},
        {{"id", "transversal_verdier"},
         {"kind", "Transversal"},
         {"condition", "Verdier"},
         {"strata", names},
         {"base_point", {0, 0, 0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"bound_satisfied", true}}}},
        {{"id", "whitney_b_sheet12"},
         {"kind", "WhitneyB"},
         {"pair", list({"edge12", "sheet12"})},
         {"base_point", {0, 0, 0, 0}},
         {"provenance", kIndependent},
         {"expect", {{"verdict", "holds"}}}},
    });
    std::vector<ExpectedValue> ev = {
        {"transversal: intersection defect <= (defect1 + defect2) / inf lambda", 0.0, kIndependent,
         "sheet1 and sheet2 meet transversally along sheet12; the bound is checked sample by sample"},
    };
    return finish("lift_transversal", "transversal families in R^4, one a product with a line", std::move(doc),
                  std::move(ev));
}

std::vector<std::string> fixture_names() {
    return {"cusp_sqrt", "flat_c1", "verdier_fail", "verdier_linear", "half_plane", "wl_fail", "wbl_fail",
            "lift_transversal"};
}

Fixture fixture(const std::string& name) {
    if (name == "cusp_sqrt") return fixture_cusp_sqrt();
    if (name == "flat_c1") return fixture_flat_c1();
    if (name == "verdier_fail") return fixture_verdier_fail();
    if (name == "verdier_linear") return fixture_verdier_linear();
    if (name == "half_plane") return fixture_half_plane();
    if (name == "wl_fail") return fixture_wl_fail();
    if (name == "wbl_fail") return fixture_wbl_fail();
    if (name == "lift_transversal") return fixture_lift_transversal();
    throw InvalidArgument("unknown fixture '" + name + "'");
}

}  // namespace stratcheck
