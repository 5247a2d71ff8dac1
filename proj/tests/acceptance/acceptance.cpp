// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "stratcheck/fixtures.hpp"
#include "stratcheck/generators.hpp"
#include "stratcheck/grassmann.hpp"
#include "stratcheck/regularity.hpp"
#include "stratcheck/scenario.hpp"

using namespace stratcheck;
using nlohmann::json;

namespace {

struct Tally {
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // largest violation seen, criterion specific
    std::string first;

    void check(bool ok, const std::string& what) {
        ++cases;
        if (!ok && failures++ == 0) first = what;
    }
    void track(double v) { worst = std::max(worst, v); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failed_criteria = 0;

void report(int id, const char* title, const Tally& t, double runtime, double limit, const std::string& extra = "") {
    const bool fast = limit <= 0.0 || runtime < limit;
    const bool ok = t.failures == 0 && t.cases > 0 && fast;
    if (!ok) ++failed_criteria;
    std::printf("%s  %2d  %-34s cases=%zu failures=%zu worst=%.3g time=%.2fs", ok ? "PASS" : "FAIL", id, title, t.cases,
                t.failures, t.worst, runtime);
    if (limit > 0.0) std::printf(" (limit %.0fs)", limit);
    if (!extra.empty()) std::printf(" %s", extra.c_str());
    if (!t.first.empty()) std::printf(" first: %s", t.first.c_str());
    if (!fast) std::printf(" too slow");
    std::printf("\n");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Subspace line_of(const Vector& v) { return orthonormalize(std::vector<Vector>{v}); }

Vector random_unit_in(const Subspace& s, Rng& rng) {
    Vector v(s.ambient_dim(), 0.0);
    for (const Vector& b : s.basis()) axpy(rng.normal(), b, v);
    return normalized(v);
}

const json* find_check(const json& report, const std::string& id) {
    for (const auto& c : report["checks"]) {
        if (c["id"] == id) return &c;
    }
    return nullptr;
}

RunResult run_fixture(const std::string& name) { return run_scenario(load_scenario(fixture(name).scenario)); }

// -- 1 --------------------------------------------------------------------

void metric_axioms() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(101);
    const double tol = 1e-9;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = 2 + rng.index(7);
        auto dim = [&] { return rng.index(n + 1); };
        const Subspace p = random_subspace(n, dim(), rng);
        const Subspace q = random_subspace(n, dim(), rng);
        const Subspace r = random_subspace(n, dim(), rng);
        const double pq = dist_d(p, q), qr = dist_d(q, r), pr = dist_d(p, r);
        const std::string tag = "triple " + std::to_string(i);

        // range
        t.check(pq >= -tol && pq <= 1.0 + tol, tag + ": range");
        // zero iff contained
        const bool contained = p.dim() == 0 || intersect(p, q).dim() == p.dim();
        t.check((pq <= tol) == contained, tag + ": containment");
        const auto [small, big] = random_nested(n, rng.index(n + 1), n, rng);
        t.check(dist_d(small, big) <= tol, tag + ": nested");
        // one iff P meets Q^perp
        const bool meets = p.dim() > 0 && intersect(p, orthogonal_complement(q)).dim() > 0;
        t.check((pq >= 1.0 - tol) == meets, tag + ": meets complement");
        // triangle
        t.track(pr - pq - qr);
        t.check(pr <= pq + qr + tol, tag + ": triangle");
        // symmetry on equal dimensions and identity
        if (p.dim() == q.dim()) t.check(std::abs(pq - dist_d(q, p)) <= tol, tag + ": symmetry");
        t.check(dist_d(p, p) <= tol, tag + ": identity");
        if (p.dim() == q.dim() && p.dim() > 0 && pq <= tol) t.check(intersect(p, q).dim() == p.dim(), tag + ": separation");
        // line formulas
        const Vector v = rng.unit_vector(n);
        const double dv = dist_d(line_of(v), q);
        const Vector pv = project(v, q);
        const double res = norm(reject(v, q));
        t.check(std::abs(dv - res) <= tol, tag + ": line residual");
        t.check(std::abs(dv - dist_vec(v, q)) <= tol, tag + ": line dist_vec");
        if (norm(pv) > 1e-6) {
            const Vector u = normalized(pv);
            const double sine = norm(v - dot(u, v) * u);
            t.check(std::abs(dv - sine) <= tol, tag + ": line sine");
            t.check(std::abs(dv - dist_d(line_of(v), line_of(u))) <= tol, tag + ": line to projection");
        }
        // sandwich on lines
        const Vector w = rng.unit_vector(n);
        const double dt = dist_projective(ProjectiveLine(v), ProjectiveLine(w));
        const double dl = dist_d(line_of(v), line_of(w));
        t.check(dt / std::sqrt(2.0) <= dl + tol && dl <= dt + tol, tag + ": sandwich");
        // monotonicity in both arguments
        const std::size_t outer = n - rng.index(2);
        const auto [p1, p2] = random_nested(n, rng.index(outer + 1), outer, rng);
        t.check(dist_d(p1, q) <= dist_d(p2, q) + tol, tag + ": monotone in P");
        t.check(dist_d(q, p2) <= dist_d(q, p1) + tol, tag + ": antitone in Q");
    }
    report(1, "metric axioms", t, seconds_since(t0), 10.0);
}

// -- 2 --------------------------------------------------------------------

void oracle_equivalence() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(202);
    // Grid size grows like mesh^-(k-1); the comparison uses each grid's own
    // resolution, so coarser meshes on the larger spheres stay sound.
    auto mesh_for = [](std::size_t k) { return k <= 2 ? 0.02 : (k == 3 ? 0.04 : 0.1); };
    std::size_t configs = 0;
    for (std::size_t n = 2; n <= 4; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t l = 1; l <= n; ++l) {
                ++configs;
                for (int i = 0; i < 100; ++i) {
                    const Subspace p = random_subspace(n, k, rng);
                    const Subspace q = random_subspace(n, l, rng);
                    const std::string tag = "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                            " l=" + std::to_string(l) + " #" + std::to_string(i);
                    const oracle::GridExtrema g = oracle::deviation(p.basis(), q.basis(), mesh_for(k));
                    const double ed = std::abs(dist_d(p, q) - g.max), ee = std::abs(dist_delta(p, q) - g.min);
                    t.track(std::max(ed - g.resolution, ee - g.resolution));
                    t.check(ed <= g.resolution + 1e-9, tag + ": d");
                    t.check(ee <= g.resolution + 1e-9, tag + ": delta");
                    const oracle::LambdaValue lv = oracle::lambda(p.basis(), q.basis(), mesh_for(std::max(k, l)));
                    const double el = std::abs(lambda_angle(p, q) - lv.value);
                    t.track(el - lv.resolution);
                    t.check(el <= lv.resolution + 1e-9, tag + ": lambda");
                }
            }
        }
    }
    report(2, "oracle equivalence", t, seconds_since(t0), 60.0, std::to_string(configs) + " configurations");
}

// -- 3 --------------------------------------------------------------------

void projective_sandwich() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(303);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = 2 + rng.index(7);
        const Vector v = rng.unit_vector(n);
        // A third of the pairs are close, where the ratio approaches its bounds.
        Vector w = rng.unit_vector(n);
        if (i % 3 == 0) w = normalized(v + (1e-3 * rng.uniform()) * w);
        if (i % 3 == 1 && i % 2 == 0) w = normalized(-1.0 * v + 1e-2 * w);
        const double dt = dist_projective(ProjectiveLine(v), ProjectiveLine(w));
        const double dl = dist_d(line_of(v), line_of(w));
        t.track(std::max(dt / std::sqrt(2.0) - dl, dl - dt));
        t.check(dt / std::sqrt(2.0) <= dl + 1e-9 && dl <= dt + 1e-9, "pair " + std::to_string(i));
    }
    report(3, "projective sandwich", t, seconds_since(t0), 0.0);
}

// -- 4 --------------------------------------------------------------------

void continuity_bound() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(404);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = 2 + rng.index(7);
        auto dim = [&] { return rng.index(n + 1); };
        const Subspace p1 = random_subspace(n, dim(), rng), q1 = random_subspace(n, dim(), rng);
        // Half of the second pairs share dimensions with the first.
        const bool same = i % 2 == 0;
        const Subspace p2 = random_subspace(n, same ? p1.dim() : dim(), rng);
        const Subspace q2 = random_subspace(n, same ? q1.dim() : dim(), rng);
        const double lhs = std::abs(dist_d(p1, q1) - dist_d(p2, q2));
        const double rhs = dist_D(p1, p2) + dist_D(q1, q2);
        t.track(lhs - rhs);
        t.check(lhs <= rhs + 1e-9, "quadruple " + std::to_string(i));
    }
    report(4, "continuity bound", t, seconds_since(t0), 0.0);
}

// -- 5 --------------------------------------------------------------------

// Unit vector u with d(Ru, V^perp) = |pi_V u| = c, c in [alpha, 1].
Vector constrained_direction(const Subspace& v, const Subspace& vperp, double c, Rng& rng) {
    const Vector a = random_unit_in(v, rng);
    if (vperp.is_zero()) return a;
    const Vector b = random_unit_in(vperp, rng);
    return c * a + std::sqrt(std::max(0.0, 1.0 - c * c)) * b;
}

void projection_lipschitz() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(505);
    double max_ratio_share = 0.0;
    for (double alpha : {0.25, 0.5, 1.0}) {
        const double bound = projection_lipschitz_bound(alpha);
        for (int i = 0; i < 10000; ++i) {
            const std::size_t n = 2 + rng.index(7);
            const Subspace v = random_subspace(n, 1 + rng.index(n - 1), rng);
            const Subspace vperp = orthogonal_complement(v);
            const double cu = alpha + (1.0 - alpha) * rng.uniform();
            const Vector u = constrained_direction(v, vperp, cu, rng);
            Vector w;
            if (i % 2 == 0) {
                w = constrained_direction(v, vperp, alpha + (1.0 - alpha) * rng.uniform(), rng);
            } else {
                // Small perturbation of u kept inside B_alpha.
                for (int tries = 0; tries < 100; ++tries) {
                    w = normalized(u + (std::pow(10.0, -1 - 4 * rng.uniform())) * rng.unit_vector(n));
                    if (norm(project(w, v)) >= alpha) break;
                }
            }
            if (norm(project(w, v)) < alpha) continue;
            const double den = dist_d(line_of(u), line_of(w));
            if (den < 1e-12) continue;
            const double num = dist_d(line_of(project(u, v)), line_of(project(w, v)));
            const double ratio = num / den;
            max_ratio_share = std::max(max_ratio_share, ratio / bound);
            t.track(ratio - bound);
            t.check(ratio <= bound + 1e-9, fmt("alpha=%.2f ratio=%.6g", alpha, ratio));
        }
    }
    report(5, "projection Lipschitz constant", t, seconds_since(t0), 0.0,
           fmt("max ratio/bound=%.4f", max_ratio_share));
}

// -- 6 --------------------------------------------------------------------

void intersection_bound() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(606);
    std::size_t drawn = 0;
    while (t.cases < 10000) {
        ++drawn;
        const std::size_t n = 2 + rng.index(7);
        const std::size_t k = 1 + rng.index(n), l = 1 + rng.index(n);
        const std::size_t lo = k + l > n ? k + l - n : 0;
        const std::size_t hi = std::min(k, l);
        const std::size_t m = lo + rng.index(hi - lo + 1);
        const auto [s, kk] = random_with_intersection(n, k, l, m, rng);
        if (lambda_angle(s, kk) <= 0.1) continue;
        Vector v = rng.unit_vector(n);
        // Some v close to S n K or to S, where the bound is tight.
        if (t.cases % 4 == 1 && m > 0) v = normalized(random_unit_in(intersect(s, kk), rng) + 1e-3 * v);
        if (t.cases % 4 == 2) v = normalized(random_unit_in(s, rng) + 1e-2 * v);
        const BoundPair b = intersection_distance_bound(v, s, kk);
        t.track(-b.slack());
        t.check(b.slack() >= -1e-9, "case " + std::to_string(t.cases));
    }
    report(6, "intersection distance bound", t, seconds_since(t0), 0.0,
           "drawn=" + std::to_string(drawn) + " lambda>0.1");
}

// -- 7 --------------------------------------------------------------------

void vertical_separation() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(707);
    for (double lip : {0.5, 1.0, 2.0}) {
        const double bound = vertical_separation_bound(lip);
        for (int i = 0; i < 100; ++i) {
            const std::size_t n = 1 + rng.index(5), m = 1 + rng.index(4);
            // Every fifth map has norm exactly L; the rest are below it.
            const double norm_a = i % 5 == 0 ? lip : lip * rng.uniform();
            const std::vector<Vector> a = random_linear_map(n, m, norm_a, rng);
            std::vector<std::size_t> fibre;
            for (std::size_t j = n; j < n + m; ++j) fibre.push_back(j);
            const Subspace vertical = Subspace::coordinate(n + m, fibre);
            for (int s = 0; s < 10; ++s) {
                // Tangent space of the stratum, then of the graph over it.
                const Subspace tl = random_subspace(n, 1 + rng.index(n), rng);
                std::vector<Vector> cols;
                for (const Vector& e : tl.basis()) {
                    Vector g(n + m, 0.0);
                    for (std::size_t j = 0; j < n; ++j) {
                        g[j] = e[j];
                        for (std::size_t r = 0; r < m; ++r) g[n + r] += a[j][r] * e[j];
                    }
                    cols.push_back(std::move(g));
                }
                const double sep = dist_delta(orthonormalize(n + m, cols), vertical);
                t.track(bound - sep);
                t.check(sep >= bound - 1e-9, fmt("L=%.1f separation=%.6g", lip, sep));
            }
        }
    }
    report(7, "graph tangents separated", t, seconds_since(t0), 0.0);
}

// -- 8 --------------------------------------------------------------------

void cusp_sqrt_reproduction() {
    const auto t0 = Clock::now();
    Tally t;
    const RunResult r = run_fixture("cusp_sqrt");
    const json* wl = find_check(r.report, "wl_tip");
    t.check(wl && (*wl)["result"]["verdict"] == "holds", "wl verdict");
    if (wl) {
        for (const auto& s : (*wl)["result"]["shells"]) {
            if (s["sup"].is_null()) continue;
            const double sup = s["sup"];
            t.track(sup);
            t.check(sup <= std::sqrt(2.0) + 0.05, fmt("shell sup %.6g", sup));
        }
    }
    bool found = false;
    for (const auto& c : r.report["checks"]) {
        if (c["kind"] != "Derivative") continue;
        const json& res = c["result"];
        if (res["point"][1] != 1e-6) continue;
        found = true;
        const double value = std::abs(res["partial"].get<double>());
        t.check(std::abs(value - 500.0) / 500.0 <= 1e-9, fmt("df/dy at 1e-6 = %.12g", value));
    }
    t.check(found, "derivative at y = 1e-6 present");
    report(8, "cusp under sqrt", t, seconds_since(t0), 5.0);
}

// -- 9 --------------------------------------------------------------------

void flat_c1_reproduction() {
    const auto t0 = Clock::now();
    Tally t;
    const RunResult r = run_fixture("flat_c1");
    const json* wl = find_check(r.report, "wl_axis");
    t.check(wl && (*wl)["result"]["verdict"] == "holds", "wl verdict");
    double slope = 0.0;
    if (wl && !(*wl)["result"]["slope"].is_null()) slope = (*wl)["result"]["slope"];
    t.check(std::abs(slope - 3.0) <= 0.3, fmt("slope %.4f", slope));
    std::size_t found = 0;
    for (const auto& c : r.report["checks"]) {
        if (c["kind"] != "Derivative") continue;
        const json& res = c["result"];
        const double y = res["point"][1];
        const double x = res["point"][0];
        t.check(std::abs(x - std::pow(y, 4.5) / std::sqrt(3.0)) <= 1e-15, fmt("point x at y=%.3g", y));
        const double expected = 8.0 / (3.0 * std::sqrt(3.0)) / std::sqrt(y);
        const double value = std::abs(res["partial"].get<double>());
        t.track(std::abs(value - expected) / expected);
        t.check(std::abs(value - expected) / expected <= 1e-6, fmt("df/dx at y=%.3g = %.12g", y, value));
        if (y == 0.04 || y == 0.01) ++found;
    }
    t.check(found == 2, "derivatives at y in {0.04, 0.01} present");
    report(9, "flat C1 function", t, seconds_since(t0), 0.0, fmt("slope=%.4f", slope));
}

// -- 10 -------------------------------------------------------------------

void secant_identity() {
    const auto t0 = Clock::now();
    Tally t;
    Rng rng(1010);
    for (int i = 0; i < 100000; ++i) {
        const std::size_t n = 1 + rng.index(4), m = 1 + rng.index(4);
        const Vector x = rng.normal_vector(n + m);
        Vector y = rng.normal_vector(n + m);
        const double scale = std::pow(10.0, -8 * rng.uniform());
        switch (i % 4) {
            case 0: break;
            case 1:  // nearly vertical
                for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + scale * (y[j] - x[j]);
                break;
            case 2:  // nearly horizontal
                for (std::size_t j = n; j < n + m; ++j) y[j] = x[j] + scale * (y[j] - x[j]);
                break;
            case 3:  // close points
                for (std::size_t j = 0; j < n + m; ++j) y[j] = x[j] + scale * (y[j] - x[j]);
                break;
        }
        if (x == y) continue;
        const SecantVertical s = secant_vertical_identity(x, y, n);
        t.track(s.residual);
        t.check(s.residual <= 1e-12, fmt("residual %.3g", s.residual));
    }
    report(10, "secant to vertical identity", t, seconds_since(t0), 0.0);
}

// -- 11 -------------------------------------------------------------------

std::string verdict_of(const RunResult& r, const std::string& kind) {
    for (const auto& c : r.report["checks"]) {
        if (c["kind"] == kind && c["result"].contains("verdict")) return c["result"]["verdict"];
    }
    return "<missing>";
}

void discrimination() {
    const auto t0 = Clock::now();
    Tally t;
    const std::string fail = verdict_of(run_fixture("verdier_fail"), "Verdier");
    const std::string linear = verdict_of(run_fixture("verdier_linear"), "Verdier");
    const std::string half = verdict_of(run_fixture("half_plane"), "WhitneyB");
    t.check(fail == "fails", "verdier_fail: " + fail);
    t.check(linear == "holds", "verdier_linear: " + linear);
    t.check(half == "holds", "half_plane: " + half);
    report(11, "counterexample discrimination", t, seconds_since(t0), 0.0,
           "verdier_fail=" + fail + " verdier_linear=" + linear + " half_plane=" + half);
}

// -- 12 -------------------------------------------------------------------

void theorem_suites() {
    const auto t0 = Clock::now();
    Tally t;
    auto projection = [&](const std::string& name, const std::string& condition) {
        const RunResult r = run_fixture(name);
        bool found = false;
        for (const auto& c : r.report["checks"]) {
            if (c["kind"] != "Projection" || c["result"]["condition"] != condition) continue;
            found = true;
            t.check(c["result"]["implication_satisfied"] == true, name + ": implication");
        }
        t.check(found, name + ": projection check present");
    };
    projection("cusp_sqrt", "WhitneyB");
    projection("verdier_linear", "Verdier");

    const RunResult r = run_fixture("lift_transversal");
    std::size_t transversal = 0;
    double inf_lambda = 0.0;
    for (const auto& c : r.report["checks"]) {
        if (c["kind"] != "Transversal") continue;
        ++transversal;
        const json& res = c["result"];
        inf_lambda = res["inf_lambda"];
        t.check(res["bound_satisfied"] == true, "transversal bound");
        t.check(std::abs(res["constant"].get<double>() * inf_lambda - 1.0) <= 1e-12, "C = 1/inf lambda");
        t.check(inf_lambda > 0.0, "inf lambda positive");
    }
    t.check(transversal == 2, "two transversal checks present");
    report(12, "theorem suites", t, seconds_since(t0), 0.0, fmt("inf_lambda=%.4f", inf_lambda));
}

// -- 13 -------------------------------------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism(const std::string& cli, const std::string& scenarios, const std::string& work) {
    const auto t0 = Clock::now();
    Tally t;
    for (const std::string& name : fixture_names()) {
        for (const std::string flags : {"", " --seed 7 --shells 5"}) {
            std::string reports[2];
            for (int run = 0; run < 2; ++run) {
                const std::string out = work + "/" + name + "_" + std::to_string(run) + ".json";
                const std::string cmd =
                    "\"" + cli + "\" check -q" + flags + " --report \"" + out + "\" \"" + scenarios + "/" + name + ".json\"";
                const int rc = std::system(cmd.c_str());
                t.check(rc != -1, name + ": could not run");
                reports[run] = slurp(out);
            }
            t.check(!reports[0].empty(), name + ": empty report");
            t.check(reports[0] == reports[1], name + flags + ": reports differ");
        }
    }
    report(13, "byte-identical reports", t, seconds_since(t0), 0.0);
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = STRATCHECK_CLI, scenarios = STRATCHECK_SCENARIOS, work = STRATCHECK_WORKDIR;
    if (argc > 1) cli = argv[1];
    const std::vector<std::function<void()>> criteria = {
        metric_axioms,    oracle_equivalence,   projective_sandwich, continuity_bound, projection_lipschitz,
        intersection_bound, vertical_separation, cusp_sqrt_reproduction, flat_c1_reproduction, secant_identity,
        discrimination,   theorem_suites,       [&] { determinism(cli, scenarios, work); },
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            ++failed_criteria;
            std::printf("FAIL  %2zu  raised: %s\n", i + 1, e.what());
        }
    }
    std::printf("%s: %d of %zu criteria failed\n", failed_criteria ? "FAIL" : "PASS", failed_criteria, criteria.size());
    return failed_criteria ? 1 : 0;
}
