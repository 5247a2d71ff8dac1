#include <cmath>
#include <functional>

#include "doctest.h"
#include "stratcheck/error.hpp"
#include "stratcheck/generators.hpp"
#include "stratcheck/regularity.hpp"

using namespace stratcheck;

namespace {

// Shells with outer radii 0.5 * 0.5^k and the given sup / inf per shell.
std::vector<ShellStat> shells_from(const std::function<double(double)>& sup,
                                   const std::function<double(double)>& inf = nullptr, std::size_t count = 8) {
    std::vector<ShellStat> out;
    for (std::size_t k = 0; k < count; ++k) {
        ShellStat s;
        s.r_outer = 0.5 * std::pow(0.5, static_cast<double>(k));
        s.r_inner = s.r_outer / 2;
        s.pair_count = 10;
        s.sup = sup(s.r_outer);
        s.inf = inf ? inf(s.r_outer) : s.sup / 2;
        out.push_back(s);
    }
    return out;
}

Stratification half_plane() {
    return Stratification({Stratum::parse("upper", {"u", "v"}, {{-1, 1}, {0, 1}}, {"u", "v"}),
                           Stratum::parse("axis", {"u"}, {{-1, 1}}, {"u", "0"})},
                          {{"axis", "upper"}});
}

SampleSchedule at_origin(std::size_t dim, std::size_t samples = 32) {
    SampleSchedule s;
    s.base_point = Vector(dim, 0.0);
    s.samples = samples;
    return s;
}

}  // namespace

TEST_CASE("log-log slope fit") {
    const auto s = shells_from([](double r) { return 3 * r * r; });
    CHECK(*fit_log_slope(s) == doctest::Approx(2.0));
    CHECK(*fit_log_slope(s, true) == doctest::Approx(2.0));
    const auto z = shells_from([](double) { return 0.0; });
    CHECK_FALSE(fit_log_slope(z, false, 1e-12).has_value());
}

TEST_CASE("verdict rules on synthetic shells") {
    using V = Verdict;
    CHECK(wl_verdict(shells_from([](double) { return 1.4; })).verdict == V::Holds);
    CHECK(wl_verdict(shells_from([](double r) { return r * r * r; })).verdict == V::Holds);
    CHECK(wl_verdict(shells_from([](double r) { return std::pow(r, -0.75); })).verdict == V::Fails);
    CHECK(wl_verdict(shells_from([](double r) { return std::pow(r, -0.4); })).verdict == V::Inconclusive);

    CHECK(verdier_verdict(shells_from([](double r) { return 1.0 / r; })).verdict == V::Fails);
    CHECK(verdier_verdict(shells_from([](double) { return 0.9; })).verdict == V::Holds);
    CHECK(verdier_verdict(shells_from([](double) { return 1.0; }, nullptr, 2)).verdict == V::Inconclusive);

    CHECK(whitney_b_verdict(shells_from([](double r) { return r; })).verdict == V::Holds);
    CHECK(whitney_b_verdict(shells_from([](double) { return 0.0; })).verdict == V::Holds);
    CHECK(whitney_b_verdict(shells_from([](double) { return 0.3; })).verdict == V::Fails);
    CHECK(whitney_b_verdict(shells_from([](double) { return 0.1; })).verdict == V::Inconclusive);

    auto wbl = [](std::function<double(double)> inf) {
        return wbl_verdict(shells_from([](double) { return 1.0; }, std::move(inf))).verdict;
    };
    CHECK(wbl([](double) { return 0.5; }) == V::Holds);
    CHECK(wbl([](double r) { return r; }) == V::Fails);
    CHECK(wbl([](double) { return 0.0; }) == V::Fails);
    CHECK(wbl([](double r) { return 1e-4 + 0 * r; }) == V::Inconclusive);
}

TEST_CASE("empty shells are ignored by the rules") {
    auto s = shells_from([](double) { return 1.0; });
    for (std::size_t k = 2; k < s.size(); ++k) s[k].pair_count = 0;
    const Classification c = verdier_verdict(s);
    CHECK(c.verdict == Verdict::Inconclusive);
    CHECK(c.reason.find("non-empty") != std::string::npos);
}

TEST_CASE("secant-vertical identity") {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const Vector x = rng.normal_vector(5), y = rng.normal_vector(5);
        const SecantVertical s = secant_vertical_identity(x, y, 3);
        CHECK(s.residual <= 1e-12);
        CHECK_FALSE(s.vertical);
    }
    const SecantVertical v = secant_vertical_identity(Vector{0, 0, 1}, Vector{0, 0, 3}, 2);
    CHECK(v.vertical);
    CHECK(v.d_val == doctest::Approx(0.0));
    CHECK_THROWS_AS(secant_vertical_identity(Vector{1, 2}, Vector{1, 2}, 1), InvalidArgument);
}

TEST_CASE("weakly Lipschitz ratios of a Lipschitz map stay below its constant") {
    const Stratification x = half_plane();
    const StratifiedMap f = StratifiedMap::from_ambient(x, {"x", "y"}, {"2*x - y", "sin(y)"});
    const RegularityVerdict v = check_wl(f, "axis", "upper", at_origin(2));
    CHECK(v.verdict == Verdict::Holds);
    for (const auto& s : v.shells) CHECK(s.sup <= std::sqrt(5.0) + 1e-12 + 1.0);
    CHECK(v.total_pairs > 0);
    CHECK_FALSE(v.high_skip_rate);
}

TEST_CASE("stats pair shell samples and record witnesses") {
    const Stratification x = half_plane();
    const StratifiedMap f = StratifiedMap::from_ambient(x, {"x", "y"}, {"x"});
    const auto stats = wl_ratio_stats(f, "axis", "upper", at_origin(2, 8));
    REQUIRE(stats.size() == 8);
    for (const auto& s : stats) {
        CHECK(s.pair_count == 64);
        REQUIRE(s.argmax.has_value());
        CHECK(s.argmax->value == s.sup);
        CHECK(s.inf <= s.sup);
        CHECK(s.sup <= 1.0 + 1e-12);
    }
}

TEST_CASE("whitney (B) and verdier on a flat pair") {
    const Stratification x = half_plane();
    const RegularityVerdict b = check_whitney_b(x, "axis", "upper", at_origin(2));
    CHECK(b.verdict == Verdict::Holds);
    const RegularityVerdict d = check_verdier(x, "axis", "upper", at_origin(2));
    CHECK(d.verdict == Verdict::Holds);
}

TEST_CASE("unknown strata and unreachable base points throw") {
    const Stratification x = half_plane();
    const StratifiedMap f = StratifiedMap::from_ambient(x, {"x", "y"}, {"x"});
    CHECK_THROWS_AS(check_wl(f, "nope", "upper", at_origin(2)), InvalidArgument);
    SampleSchedule far = at_origin(2);
    far.base_point = {0, 5};
    CHECK_THROWS_AS(check_wl(f, "axis", "upper", far), UnreachableBasePoint);
}

TEST_CASE("projection suite on a linear map") {
    const Stratification x = half_plane();
    const StratifiedMap f = StratifiedMap::from_ambient(x, {"x", "y"}, {"x + y"});
    const ProjectionReport r = theorem_suite_projection(f, Condition::WhitneyB, "axis", "upper", at_origin(2));
    CHECK(r.implication_satisfied);
    CHECK(r.graph.verdict == Verdict::Holds);
    CHECK(r.base.verdict == Verdict::Holds);
    CHECK(r.precondition.condition == Condition::WL);
    CHECK_THROWS_AS(theorem_suite_projection(f, Condition::WL, "axis", "upper", at_origin(2)), InvalidArgument);
}

TEST_CASE("condition names") {
    for (Condition c : {Condition::WL, Condition::WBL, Condition::WhitneyB, Condition::Verdier}) {
        CHECK(parse_condition(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_condition("whitney"), InvalidArgument);
    CHECK(to_string(Verdict::Inconclusive) == "inconclusive");
}
