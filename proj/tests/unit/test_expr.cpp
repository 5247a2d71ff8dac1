#include <cmath>
#include <string>

#include "doctest.h"
#include "stratcheck/expr.hpp"
#include "stratcheck/random.hpp"

using namespace stratcheck;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

double eval(const std::string& src, std::vector<double> pt, const std::vector<std::string>& vars = kXY) {
    return parse(src, vars).eval(pt);
}

std::size_t parse_offset(const std::string& src) {
    try {
        parse(src, kXY);
    } catch (const ParseError& e) {
        return e.offset();
    }
    FAIL("expected a parse error for '" << src << "'");
    return 0;
}

// Random smooth expression over x, y that is finite for x, y in [0.5, 2].
std::string random_smooth(Rng& rng, int depth) {
    if (depth == 0 || rng.uniform() < 0.2) {
        switch (rng.index(3)) {
            case 0: return "x";
            case 1: return "y";
            default: {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.3g", rng.uniform(0.1, 3.0));
                return buf;
            }
        }
    }
    const std::string a = random_smooth(rng, depth - 1);
    const std::string b = random_smooth(rng, depth - 1);
    switch (rng.index(9)) {
        case 0: return "(" + a + " + " + b + ")";
        case 1: return "(" + a + " - " + b + ")";
        case 2: return "(" + a + " * " + b + ")";
        case 3: return "(" + a + " / (1 + " + b + "^2))";
        case 4: return "sin(" + a + ")";
        case 5: return "cos(" + a + ")";
        case 6: return "exp(-(" + a + ")^2)";
        case 7: return "sqrt(1 + (" + a + ")^2)";
        default: return "log(2 + sin(" + b + "))";
    }
}

}  // namespace

TEST_CASE("precedence and associativity") {
    CHECK(eval("1 + 2 * 3", {0, 0}) == 7.0);
    CHECK(eval("2 ^ 3 ^ 2", {0, 0}) == 512.0);
    CHECK(eval("-2 ^ 2", {0, 0}) == -4.0);
    CHECK(eval("2 ^ -1", {0, 0}) == 0.5);
    CHECK(eval("(1 - 2) - 3", {0, 0}) == -4.0);
    CHECK(eval("8 / 4 / 2", {0, 0}) == 1.0);
    CHECK(eval("x * y - x / y", {3, 2}) == doctest::Approx(4.5));
}

TEST_CASE("functions") {
    CHECK(eval("sqrt(x)", {9, 0}) == 3.0);
    CHECK(eval("abs(x - y)", {1, 4}) == 3.0);
    CHECK(eval("min(x, y) + max(x, y)", {1, 4}) == 5.0);
    CHECK(eval("exp(log(x))", {2.5, 0}) == doctest::Approx(2.5));
    CHECK(eval("sin(x)^2 + cos(x)^2", {0.7, 0}) == doctest::Approx(1.0));
    CHECK(eval("if(x < y, 1, 2)", {1, 2}) == 1.0);
    CHECK(eval("if(x >= y, 1, 2)", {1, 2}) == 2.0);
    CHECK(eval("if(x \xE2\x89\xA4 y, 1, 2)", {2, 2}) == 1.0);
    CHECK(eval("if(x \xE2\x89\xA5 y, 1, 2)", {1, 2}) == 2.0);
    CHECK(eval("x^2.5", {4, 0}) == doctest::Approx(32.0));
    CHECK(eval("x^3", {-2, 0}) == -8.0);
}

TEST_CASE("only the taken branch of if is evaluated") {
    CHECK(eval("if(y > 0, log(y), 0)", {0, 0}) == 0.0);
    CHECK(eval("if(x^2 < y^9, (x^2/y^7 - y^2)^2, 0)", {0.5, 0}) == 0.0);
}

TEST_CASE("the flat function vanishes off its support") {
    const Expr f = parse("if(x^2 < y^9, (x^2/y^7 - y^2)^2, 0)", kXY);
    for (double y : {0.1, 0.3, 0.9}) {
        const double edge = std::sqrt(std::pow(y, 9));
        CHECK(f.eval(std::vector<double>{edge * 1.01, y}) == 0.0);
        CHECK(f.eval(std::vector<double>{-edge * 2, y}) == 0.0);
        CHECK(f.eval(std::vector<double>{edge * 0.5, y}) > 0.0);
    }
}

TEST_CASE("flat function on its support against a hand-coded closure") {
    const Expr f = parse("if(x^2 < y^9, (x^2/y^7 - y^2)^2, 0)", kXY);
    auto closure = [](double x, double y) {
        const double t = x * x / std::pow(y, 7) - y * y;
        return t * t;
    };
    const double y = 0.01, x = std::pow(y, 4.5) / std::sqrt(3.0);
    const double want = closure(x, y);
    CHECK(std::abs(f.eval(std::vector<double>{x, y}) - want) <= 1e-12 * want);

    // Frozen: 8 / (3 sqrt(3)) / sqrt(0.04) = 7.69800358919501.
    const DualResult d = f.eval_dual(std::vector<double>{std::pow(0.04, 4.5) / std::sqrt(3.0), 0.04});
    CHECK(std::abs(std::abs(d.dual.partials[0]) - 7.69800358919501) <= 1e-6 * 7.69800358919501);
    // |x^2 - y^9| is about 2e-13 here, inside the default switch margin.
    CHECK(d.near_switch);
}

TEST_CASE("parse errors carry offsets") {
    CHECK(parse_offset("1 +") == 3);
    CHECK(parse_offset("x + * y") == 4);
    CHECK(parse_offset("foo(x)") == 0);
    CHECK(parse_offset("sqrt(x, y)") == 0);
    CHECK(parse_offset("if(x, 1, 2)") == 4);
    CHECK(parse_offset("x + z") == 4);
    CHECK(parse_offset("(x") == 2);
    CHECK(parse_offset("x $ y") == 2);
    CHECK(parse_offset("") == 0);
    CHECK(parse_offset("1e400") == 0);
    CHECK_THROWS_AS(parse("x", {"x", "x"}), InvalidArgument);
    CHECK_THROWS_AS(parse("1", {"sqrt"}), InvalidArgument);
}

TEST_CASE("evaluation errors name the subexpression") {
    const Expr e = parse("1 + sqrt(x - 2)", kXY);
    try {
        e.eval(std::vector<double>{1, 0});
        FAIL("expected EvalError");
    } catch (const EvalError& err) {
        CHECK(err.subexpression() == "sqrt((x - 2))");
        CHECK(err.offset() == 4);
    }
    CHECK_THROWS_AS(eval("log(y)", {1, 0}), EvalError);
    CHECK_THROWS_AS(eval("x / y", {1, 0}), EvalError);
    CHECK_THROWS_AS(eval("y ^ -1", {1, 0}), EvalError);
    CHECK_THROWS_AS(eval("(-x) ^ 0.5", {1, 0}), EvalError);
    CHECK_THROWS_AS(eval("exp(1000)", {1, 0}), EvalError);
    CHECK_THROWS_AS(eval("x", {1}), DimensionMismatch);
}

TEST_CASE("dual numbers give exact first partials") {
    const Expr e = parse("x^2 * y + sin(x * y)", kXY);
    const DualResult r = e.eval_dual(std::vector<double>{1.5, -0.5});
    CHECK(r.dual.value == doctest::Approx(-1.125 + std::sin(-0.75)));
    CHECK(r.dual.partials[0] == doctest::Approx(2 * 1.5 * -0.5 + -0.5 * std::cos(-0.75)));
    CHECK(r.dual.partials[1] == doctest::Approx(2.25 + 1.5 * std::cos(-0.75)));
    CHECK_FALSE(r.near_switch);

    const DualResult s = parse("sqrt(y)", kXY).eval_dual(std::vector<double>{0.0, 1e-6});
    CHECK(s.dual.partials[1] == doctest::Approx(500.0).epsilon(1e-12));
    CHECK_THROWS_AS(parse("sqrt(y)", kXY).eval_dual(std::vector<double>{0.0, 0.0}), EvalError);
}

TEST_CASE("switch flag near the seam of a conditional") {
    const Expr e = parse("abs(x - y)", kXY);
    CHECK(e.eval_dual(std::vector<double>{1.0, 1.0}).near_switch);
    const DualResult far = e.eval_dual(std::vector<double>{2.0, 1.0});
    CHECK_FALSE(far.near_switch);
    CHECK(far.switch_margin == doctest::Approx(1.0));
    CHECK(e.eval_dual(std::vector<double>{1.0, 1.0 + 1e-3}, 1e-2).near_switch);
}

TEST_CASE("dual and plain evaluation agree bit for bit") {
    Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        const std::string src = random_smooth(rng, 4);
        const Expr e = parse(src, kXY);
        const std::vector<double> pt = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        CHECK(e.eval(pt) == e.eval_dual(pt).dual.value);
    }
}

TEST_CASE("dual partials match central differences") {
    Rng rng(78);
    for (int i = 0; i < 1000; ++i) {
        const std::string src = random_smooth(rng, 4);
        const Expr e = parse(src, kXY);
        const std::vector<double> pt = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        const DualResult d = e.eval_dual(pt);
        for (std::size_t j = 0; j < 2; ++j) {
            const double h = 1e-6;
            std::vector<double> a = pt, b = pt;
            a[j] += h;
            b[j] -= h;
            const double fd = (e.eval(a) - e.eval(b)) / (2 * h);
            CHECK_MESSAGE(std::abs(fd - d.dual.partials[j]) <= 1e-5 * (1 + std::abs(fd)), src);
        }
    }
}

TEST_CASE("printing round-trips") {
    Rng rng(79);
    for (int i = 0; i < 300; ++i) {
        const Expr e = parse(random_smooth(rng, 5), kXY);
        const Expr back = parse(e.to_string(), kXY);
        CHECK(structurally_equal(e, back));
        CHECK(back.to_string() == e.to_string());
    }
    const Expr c = constant_expr(-0.1, kXY);
    CHECK(c.to_string() == "(-0.1)");
    CHECK(parse(c.to_string(), kXY).eval(std::vector<double>{0, 0}) == -0.1);
}

TEST_CASE("substitution composes with a chart") {
    const Expr f = parse("x * sqrt(y)", kXY);
    const std::vector<std::string> uv = {"u", "v"};
    const Expr g = substitute(f, uv, {{"x", parse("u + v", uv)}, {"y", parse("v^2", uv)}});
    CHECK(g.variables() == uv);
    CHECK(g.eval(std::vector<double>{1.0, 3.0}) == doctest::Approx(12.0));
    CHECK_THROWS(substitute(f, uv, {{"x", parse("u", uv)}}));
    // Chain rule through an outer parametrization.
    const std::vector<Dual> in = {Dual::variable(2.0, 0, 1), Dual::constant(4.0, 1)};
    CHECK(f.eval_dual(std::span<const Dual>(in)).dual.partials[0] == doctest::Approx(2.0));
}
