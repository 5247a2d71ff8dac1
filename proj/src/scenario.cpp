#include "stratcheck/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stratcheck/random.hpp"

namespace stratcheck {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Field access with JSON-pointer diagnostics

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ScenarioError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError(child(path, key), "missing required field");
    return *it;
}

const json* optional_field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ScenarioError(path, "expected an object");
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ScenarioError(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ScenarioError(path, "expected true or false");
    return j.get<bool>();
}

/// A number, or a string holding a constant expression such as "sqrt(2)/2".
double as_number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            return parse(j.get<std::string>(), {}).eval(std::span<const double>{});
        } catch (const Error& e) {
            throw ScenarioError(path, std::string("bad constant expression: ") + e.what());
        }
    }
    throw ScenarioError(path, "expected a number or a constant expression string");
}

std::uint64_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ScenarioError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::vector<std::string> as_string_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ScenarioError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], child(path, i)));
    return out;
}

Vector as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
    Vector out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], child(path, i)));
    return out;
}

std::pair<std::string, std::string> as_pair(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ScenarioError(path, "expected [gamma, lambda]");
    return {as_string(j[0], child(path, 0)), as_string(j[1], child(path, 1))};
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ScenarioError(child(path, it.key()), "unknown field");
    }
}

// ---------------------------------------------------------------------------
// Schedules and thresholds

void apply_schedule(const json& j, const std::string& path, SampleSchedule& s) {
    if (!j.is_object()) throw ScenarioError(path, "expected an object");
    reject_unknown(j, {"r0", "rho", "shells", "samples", "seed", "attempt_factor"}, path);
    if (auto* v = optional_field(j, "r0", path)) s.r0 = as_number(*v, child(path, "r0"));
    if (auto* v = optional_field(j, "rho", path)) s.rho = as_number(*v, child(path, "rho"));
    if (auto* v = optional_field(j, "shells", path)) s.shells = as_count(*v, child(path, "shells"));
    if (auto* v = optional_field(j, "samples", path)) s.samples = as_count(*v, child(path, "samples"));
    if (auto* v = optional_field(j, "seed", path)) s.seed = as_count(*v, child(path, "seed"));
    if (auto* v = optional_field(j, "attempt_factor", path)) s.attempt_factor = as_count(*v, child(path, "attempt_factor"));
}

void apply_thresholds(const json& j, const std::string& path, Thresholds& t) {
    if (!j.is_object()) throw ScenarioError(path, "expected an object");
    const std::pair<const char*, double Thresholds::*> fields[] = {
        {"eps_growth", &Thresholds::eps_growth},     {"fail_slope", &Thresholds::fail_slope},
        {"growth_factor", &Thresholds::growth_factor}, {"eps_b", &Thresholds::eps_b},
        {"eps_fail", &Thresholds::eps_fail},         {"b_slope", &Thresholds::b_slope},
        {"zero_floor", &Thresholds::zero_floor},     {"wbl_floor", &Thresholds::wbl_floor},
        {"wbl_slope", &Thresholds::wbl_slope},       {"degenerate_gap", &Thresholds::degenerate_gap},
        {"skip_flag_rate", &Thresholds::skip_flag_rate},
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool found = false;
        for (const auto& [name, member] : fields) {
            if (it.key() == name) {
                t.*member = as_number(it.value(), child(path, it.key()));
                found = true;
            }
        }
        if (!found) throw ScenarioError(child(path, it.key()), "unknown threshold");
    }
}

json schedule_json(const SampleSchedule& s) {
    return {{"base_point", s.base_point}, {"r0", s.r0},           {"rho", s.rho},
            {"shells", s.shells},         {"samples", s.samples}, {"seed", s.seed},
            {"attempt_factor", s.attempt_factor}};
}

json thresholds_json(const Thresholds& t) {
    return {{"eps_growth", t.eps_growth}, {"fail_slope", t.fail_slope},       {"growth_factor", t.growth_factor},
            {"eps_b", t.eps_b},           {"eps_fail", t.eps_fail},           {"b_slope", t.b_slope},
            {"zero_floor", t.zero_floor}, {"wbl_floor", t.wbl_floor},         {"wbl_slope", t.wbl_slope},
            {"degenerate_gap", t.degenerate_gap}, {"skip_flag_rate", t.skip_flag_rate}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json witness_json(const std::optional<Witness>& w) {
    if (!w) return nullptr;
    return {{"x", w->x}, {"y", w->y}, {"value", w->value}};
}

// ---------------------------------------------------------------------------
// Prepared checks

enum class Kind { WL, WBL, WhitneyB, Verdier, Projection, Transversal, Derivative, Frontier };

Kind parse_kind(const std::string& s, const std::string& path) {
    static const std::pair<const char*, Kind> kinds[] = {
        {"WL", Kind::WL},           {"WBL", Kind::WBL},
        {"WhitneyB", Kind::WhitneyB}, {"Verdier", Kind::Verdier},
        {"Projection", Kind::Projection}, {"Transversal", Kind::Transversal},
        {"Derivative", Kind::Derivative}, {"Frontier", Kind::Frontier},
    };
    for (const auto& [name, k] : kinds) {
        if (s == name) return k;
    }
    throw ScenarioError(path, "unknown check kind '" + s + "'");
}

struct Prepared {
    Kind kind = Kind::WL;
    std::string map;
    std::string gamma, lambda;
    std::string stratification = "base";
    Condition condition = Condition::WhitneyB;
    TransversalNames names;
    SampleSchedule sched;
    Thresholds thr;
    // Derivative
    std::size_t component = 0;
    std::size_t wrt = 0;
    Vector point;
    double expected = 0.0;
    double rel_tol = 1e-9;
    bool use_abs = false;
    // Frontier and Transversal
    FrontierOptions frontier;
    double slack_tol = 1e-9;
};

const NamedMap& lookup_map(const Scenario& sc, const std::string& name, const std::string& path) {
    auto it = sc.maps.find(name);
    if (it == sc.maps.end()) throw ScenarioError(path, "unknown map '" + name + "'");
    return it->second;
}

void require_stratum(const Stratification& x, const std::string& name, const std::string& path) {
    if (!x.find(name)) throw ScenarioError(path, "unknown stratum '" + name + "'");
}

Prepared prepare(const Scenario& sc, const CheckSpec& spec, const Overrides& ov) {
    const json& b = spec.body;
    const std::string& path = spec.path;
    Prepared p;
    p.kind = parse_kind(spec.kind, child(path, "kind"));
    const Stratification& base = *sc.strata;

    const json& defaults = sc.doc.contains("defaults") ? sc.doc["defaults"] : json::object();
    if (auto* d = optional_field(defaults, "schedule", "/defaults")) apply_schedule(*d, "/defaults/schedule", p.sched);
    if (auto* d = optional_field(defaults, "thresholds", "/defaults")) {
        apply_thresholds(*d, "/defaults/thresholds", p.thr);
    }
    if (auto* v = optional_field(b, "schedule", path)) apply_schedule(*v, child(path, "schedule"), p.sched);
    if (auto* v = optional_field(b, "thresholds", path)) apply_thresholds(*v, child(path, "thresholds"), p.thr);
    if (ov.shells) p.sched.shells = *ov.shells;
    if (ov.samples) p.sched.samples = *ov.samples;
    if (ov.seed) p.sched.seed = *ov.seed;
    if (ov.r0) p.sched.r0 = *ov.r0;
    if (ov.rho) p.sched.rho = *ov.rho;
    if (ov.eps_b) p.thr.eps_b = *ov.eps_b;

    auto needs_schedule = [&] {
        p.sched.base_point = as_vector(require(b, "base_point", path), child(path, "base_point"));
        try {
            p.sched.validate();
        } catch (const InvalidArgument& e) {
            throw ScenarioError(child(path, "schedule"), e.what());
        }
    };
    auto needs_pair = [&](const Stratification& x) {
        std::tie(p.gamma, p.lambda) = as_pair(require(b, "pair", path), child(path, "pair"));
        require_stratum(x, p.gamma, child(path, "pair/0"));
        require_stratum(x, p.lambda, child(path, "pair/1"));
    };
    auto needs_map = [&] {
        p.map = as_string(require(b, "map", path), child(path, "map"));
        return &lookup_map(sc, p.map, child(path, "map"));
    };

    switch (p.kind) {
        case Kind::WL:
        case Kind::WBL: {
            reject_unknown(b, {"id", "kind", "map", "pair", "base_point", "schedule", "thresholds", "expect",
                               "provenance", "note"},
                           path);
            needs_map();
            needs_pair(base);
            needs_schedule();
            if (p.sched.base_point.size() != base.ambient_dim()) {
                throw ScenarioError(child(path, "base_point"), "wrong dimension");
            }
            break;
        }
        case Kind::WhitneyB:
        case Kind::Verdier: {
            reject_unknown(b, {"id", "kind", "map", "pair", "base_point", "schedule", "thresholds", "expect",
                               "provenance", "note", "stratification"},
                           path);
            if (auto* v = optional_field(b, "stratification", path)) {
                p.stratification = as_string(*v, child(path, "stratification"));
                if (p.stratification != "base" && p.stratification != "graph" && p.stratification != "image") {
                    throw ScenarioError(child(path, "stratification"), "expected base, graph or image");
                }
            }
            std::size_t expected_dim = base.ambient_dim();
            if (p.stratification != "base") {
                const NamedMap* m = needs_map();
                expected_dim = p.stratification == "graph" ? base.ambient_dim() + m->map.target_dim()
                                                           : m->map.target_dim();
            }
            needs_pair(base);
            needs_schedule();
            const bool graph_shorthand = p.stratification == "graph" && p.sched.base_point.size() == base.ambient_dim();
            if (p.sched.base_point.size() != expected_dim && !graph_shorthand) {
                throw ScenarioError(child(path, "base_point"), "wrong dimension");
            }
            break;
        }
        case Kind::Projection: {
            reject_unknown(b, {"id", "kind", "map", "pair", "base_point", "schedule", "thresholds", "expect",
                               "provenance", "note", "condition"},
                           path);
            needs_map();
            needs_pair(base);
            needs_schedule();
            const std::string c = as_string(require(b, "condition", path), child(path, "condition"));
            if (c != "WhitneyB" && c != "Verdier") throw ScenarioError(child(path, "condition"), "expected WhitneyB or Verdier");
            p.condition = parse_condition(c);
            break;
        }
        case Kind::Transversal: {
            reject_unknown(b, {"id", "kind", "strata", "base_point", "schedule", "thresholds", "expect", "provenance",
                               "note", "condition", "slack_tol"},
                           path);
            const std::string c = as_string(require(b, "condition", path), child(path, "condition"));
            if (c != "WhitneyB" && c != "Verdier") throw ScenarioError(child(path, "condition"), "expected WhitneyB or Verdier");
            p.condition = parse_condition(c);
            const json& s = require(b, "strata", path);
            const std::string sp = child(path, "strata");
            reject_unknown(s, {"lambda1", "gamma1", "lambda2", "gamma2", "lambda12", "gamma12"}, sp);
            const std::pair<const char*, std::string TransversalNames::*> roles[] = {
                {"lambda1", &TransversalNames::lambda1},   {"gamma1", &TransversalNames::gamma1},
                {"lambda2", &TransversalNames::lambda2},   {"gamma2", &TransversalNames::gamma2},
                {"lambda12", &TransversalNames::lambda12}, {"gamma12", &TransversalNames::gamma12},
            };
            for (const auto& [role, member] : roles) {
                p.names.*member = as_string(require(s, role, sp), child(sp, role));
                require_stratum(base, p.names.*member, child(sp, role));
            }
            if (auto* v = optional_field(b, "slack_tol", path)) p.slack_tol = as_number(*v, child(path, "slack_tol"));
            if (ov.tol) p.slack_tol = *ov.tol;
            needs_schedule();
            break;
        }
        case Kind::Derivative: {
            reject_unknown(b, {"id", "kind", "map", "component", "wrt", "point", "expected", "rel_tol", "abs",
                               "provenance", "note"},
                           path);
            const NamedMap* m = needs_map();
            p.component = as_count(require(b, "component", path), child(path, "component"));
            if (p.component >= m->ambient.size()) throw ScenarioError(child(path, "component"), "out of range");
            const std::string wrt = as_string(require(b, "wrt", path), child(path, "wrt"));
            auto it = std::find(sc.ambient.begin(), sc.ambient.end(), wrt);
            if (it == sc.ambient.end()) throw ScenarioError(child(path, "wrt"), "unknown ambient coordinate '" + wrt + "'");
            p.wrt = static_cast<std::size_t>(it - sc.ambient.begin());
            p.point = as_vector(require(b, "point", path), child(path, "point"));
            if (p.point.size() != sc.ambient.size()) throw ScenarioError(child(path, "point"), "wrong dimension");
            p.expected = as_number(require(b, "expected", path), child(path, "expected"));
            if (auto* v = optional_field(b, "rel_tol", path)) p.rel_tol = as_number(*v, child(path, "rel_tol"));
            if (auto* v = optional_field(b, "abs", path)) p.use_abs = as_bool(*v, child(path, "abs"));
            if (ov.tol) p.rel_tol = *ov.tol;
            break;
        }
        case Kind::Frontier: {
            reject_unknown(b, {"id", "kind", "samples", "closure_tol", "overlap_tol", "seed", "expect", "provenance",
                               "note"},
                           path);
            if (auto* v = optional_field(b, "samples", path)) p.frontier.samples = as_count(*v, child(path, "samples"));
            if (auto* v = optional_field(b, "closure_tol", path)) {
                p.frontier.closure_tol = as_number(*v, child(path, "closure_tol"));
            }
            if (auto* v = optional_field(b, "overlap_tol", path)) {
                p.frontier.overlap_tol = as_number(*v, child(path, "overlap_tol"));
            }
            if (auto* v = optional_field(b, "seed", path)) p.frontier.seed = as_count(*v, child(path, "seed"));
            if (ov.seed) p.frontier.seed = *ov.seed;
            if (ov.tol) p.frontier.closure_tol = *ov.tol;
            break;
        }
    }
    if (auto* e = optional_field(b, "expect", path); e && !e->is_object()) {
        throw ScenarioError(child(path, "expect"), "expected an object");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Expectations

struct ExpectationResult {
    bool met = true;
    json failures = json::array();
};

void expect_verdict(const json& e, const std::string& key, Verdict got, ExpectationResult& r) {
    if (!e.contains(key)) return;
    const std::string want = e[key].get<std::string>();
    if (want != to_string(got)) {
        r.met = false;
        r.failures.push_back(key + ": expected " + want + ", got " + std::string(to_string(got)));
    }
}

void expect_bool(const json& e, const std::string& key, bool got, ExpectationResult& r) {
    if (!e.contains(key)) return;
    if (e[key].get<bool>() != got) {
        r.met = false;
        r.failures.push_back(key + ": expected " + (got ? "false" : "true"));
    }
}

void expect_regularity(const json& e, const RegularityVerdict& v, ExpectationResult& r) {
    expect_verdict(e, "verdict", v.verdict, r);
    if (e.contains("max_sup")) {
        const double cap = e["max_sup"].get<double>();
        for (const auto& s : v.shells) {
            if (!s.empty() && s.sup > cap) {
                r.met = false;
                r.failures.push_back("max_sup: shell r=" + std::to_string(s.r_outer) + " has sup " +
                                     std::to_string(s.sup) + " > " + std::to_string(cap));
                break;
            }
        }
    }
    if (e.contains("min_inf")) {
        const double floor = e["min_inf"].get<double>();
        for (const auto& s : v.shells) {
            if (!s.empty() && s.inf < floor) {
                r.met = false;
                r.failures.push_back("min_inf: shell r=" + std::to_string(s.r_outer) + " has inf " +
                                     std::to_string(s.inf) + " < " + std::to_string(floor));
                break;
            }
        }
    }
    for (const char* key : {"slope_min", "slope_max"}) {
        if (!e.contains(key)) continue;
        const double bound = e[key].get<double>();
        const bool is_min = std::string(key) == "slope_min";
        if (!v.slope || (is_min ? *v.slope < bound : *v.slope > bound)) {
            r.met = false;
            r.failures.push_back(std::string(key) + ": slope " + (v.slope ? std::to_string(*v.slope) : "undefined") +
                                 " violates " + std::to_string(bound));
        }
    }
    if (e.contains("min_nonempty_shells")) {
        std::size_t n = 0;
        for (const auto& s : v.shells) n += s.empty() ? 0 : 1;
        if (n < e["min_nonempty_shells"].get<std::size_t>()) {
            r.met = false;
            r.failures.push_back("min_nonempty_shells: only " + std::to_string(n));
        }
    }
}

void validate_expect(const json& e, std::initializer_list<const char*> allowed, const std::string& path) {
    reject_unknown(e, allowed, path);
    for (auto it = e.begin(); it != e.end(); ++it) {
        const std::string p = child(path, it.key());
        const std::string& k = it.key();
        if (k == "verdict" || k == "graph_verdict" || k == "base_verdict") {
            const std::string v = as_string(it.value(), p);
            if (v != "holds" && v != "fails" && v != "inconclusive") throw ScenarioError(p, "expected holds, fails or inconclusive");
        } else if (k == "implication_satisfied" || k == "bound_satisfied" || k == "ok") {
            as_bool(it.value(), p);
        } else if (k == "min_nonempty_shells") {
            as_count(it.value(), p);
        } else if (!it.value().is_number()) {
            throw ScenarioError(p, "expected a number");
        }
    }
}

// ---------------------------------------------------------------------------
// Running

struct Ran {
    bool negative = false;  // the check refutes something
    json detail;
};

Ran run_prepared(const Scenario& sc, const Prepared& p, const json& expect, ExpectationResult& er) {
    const Stratification& base = *sc.strata;
    Ran out;
    switch (p.kind) {
        case Kind::WL:
        case Kind::WBL: {
            const StratifiedMap& f = sc.maps.at(p.map).map;
            RegularityVerdict v = p.kind == Kind::WL ? check_wl(f, p.gamma, p.lambda, p.sched, p.thr)
                                                     : check_wbl(f, p.gamma, p.lambda, p.sched, p.thr);
            out.negative = v.verdict == Verdict::Fails;
            expect_regularity(expect, v, er);
            out.detail = to_json(v);
            break;
        }
        case Kind::WhitneyB:
        case Kind::Verdier: {
            std::optional<Stratification> derived;
            SampleSchedule sched = p.sched;
            if (p.stratification == "graph") {
                const StratifiedMap& f = sc.maps.at(p.map).map;
                derived.emplace(graph_stratification(f));
                if (sched.base_point.size() == base.ambient_dim()) {
                    const std::size_t gi = base.index_of(p.gamma);
                    const Vector fa = f.value(gi, nearest_param(base.strata()[gi], sched.base_point).param);
                    sched.base_point.insert(sched.base_point.end(), fa.begin(), fa.end());
                }
            } else if (p.stratification == "image") {
                derived.emplace(image_stratification(sc.maps.at(p.map).map));
            }
            const Stratification& x = derived ? *derived : base;
            RegularityVerdict v = p.kind == Kind::WhitneyB ? check_whitney_b(x, p.gamma, p.lambda, sched, p.thr)
                                                           : check_verdier(x, p.gamma, p.lambda, sched, p.thr);
            out.negative = v.verdict == Verdict::Fails;
            expect_regularity(expect, v, er);
            out.detail = to_json(v);
            out.detail["stratification"] = p.stratification;
            break;
        }
        case Kind::Projection: {
            ProjectionReport r =
                theorem_suite_projection(sc.maps.at(p.map).map, p.condition, p.gamma, p.lambda, p.sched, p.thr);
            out.negative = !r.implication_satisfied;
            expect_bool(expect, "implication_satisfied", r.implication_satisfied, er);
            expect_verdict(expect, "graph_verdict", r.graph.verdict, er);
            expect_verdict(expect, "base_verdict", r.base.verdict, er);
            out.detail = to_json(r);
            break;
        }
        case Kind::Transversal: {
            TransversalReport r = theorem_suite_transversal(base, p.names, p.condition, p.sched, p.slack_tol);
            out.negative = !r.bound_satisfied;
            expect_bool(expect, "bound_satisfied", r.bound_satisfied, er);
            out.detail = to_json(r);
            break;
        }
        case Kind::Derivative: {
            const Expr& e = sc.maps.at(p.map).ambient[p.component];
            const DualResult d = e.eval_dual(p.point);
            const double partial = d.dual.partials[p.wrt];
            const double got = p.use_abs ? std::abs(partial) : partial;
            const double err = std::abs(got - p.expected);
            const double rel = p.expected != 0.0 ? err / std::abs(p.expected) : err;
            const bool ok = rel <= p.rel_tol;
            out.negative = !ok;
            out.detail = {{"map", p.map},
                          {"component", p.component},
                          {"wrt", sc.ambient[p.wrt]},
                          {"point", p.point},
                          {"value", d.dual.value},
                          {"partial", partial},
                          {"compared", got},
                          {"expected", p.expected},
                          {"relative_error", rel},
                          {"rel_tol", p.rel_tol},
                          {"near_switch", d.near_switch},
                          {"switch_margin", std::isfinite(d.switch_margin) ? json(d.switch_margin) : json(nullptr)},
                          {"matches", ok}};
            break;
        }
        case Kind::Frontier: {
            FrontierReport r = frontier_check(base, p.frontier);
            out.negative = !r.ok();
            expect_bool(expect, "ok", r.ok(), er);
            out.detail = to_json(r);
            break;
        }
    }
    return out;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Loading

Scenario load_scenario(const json& doc) {
    Scenario sc;
    sc.doc = doc;
    if (!doc.is_object()) throw ScenarioError("", "scenario must be an object");
    reject_unknown(doc, {"version", "name", "description", "ambient", "strata", "frontier", "maps", "defaults",
                         "checks", "metadata"},
                   "");
    const json& ver = require(doc, "version", "");
    if (!ver.is_number_integer() || ver.get<int>() != kScenarioVersion) {
        throw ScenarioError("/version", "unsupported version (expected " + std::to_string(kScenarioVersion) + ")");
    }
    sc.name = doc.contains("name") ? as_string(doc["name"], "/name") : "unnamed";
    sc.ambient = as_string_list(require(doc, "ambient", ""), "/ambient");
    if (sc.ambient.empty()) throw ScenarioError("/ambient", "at least one coordinate is required");
    try {
        parse("0", sc.ambient);
    } catch (const InvalidArgument& e) {
        throw ScenarioError("/ambient", e.what());
    }

    const json& strata = require(doc, "strata", "");
    if (!strata.is_array() || strata.empty()) throw ScenarioError("/strata", "expected a non-empty array");
    std::vector<Stratum> list;
    for (std::size_t i = 0; i < strata.size(); ++i) {
        const std::string sp = child("/strata", i);
        const json& s = strata[i];
        reject_unknown(s, {"name", "params", "domain", "chart", "note"}, sp);
        std::string name = as_string(require(s, "name", sp), child(sp, "name"));
        std::vector<std::string> params =
            s.contains("params") ? as_string_list(s["params"], child(sp, "params")) : std::vector<std::string>{};
        std::vector<Interval> domain;
        if (s.contains("domain")) {
            const json& d = s["domain"];
            if (!d.is_array()) throw ScenarioError(child(sp, "domain"), "expected an array of [lo, hi]");
            for (std::size_t k = 0; k < d.size(); ++k) {
                const std::string dp = child(child(sp, "domain"), k);
                if (!d[k].is_array() || d[k].size() != 2) throw ScenarioError(dp, "expected [lo, hi]");
                domain.push_back({as_number(d[k][0], child(dp, 0)), as_number(d[k][1], child(dp, 1))});
            }
        }
        const std::vector<std::string> chart = as_string_list(require(s, "chart", sp), child(sp, "chart"));
        if (chart.size() != sc.ambient.size()) {
            throw ScenarioError(child(sp, "chart"), "chart needs one expression per ambient coordinate");
        }
        std::vector<Expr> exprs;
        for (std::size_t k = 0; k < chart.size(); ++k) {
            try {
                exprs.push_back(parse(chart[k], params));
            } catch (const Error& e) {
                throw ScenarioError(child(child(sp, "chart"), k), e.what());
            }
        }
        try {
            list.emplace_back(std::move(name), std::move(params), std::move(domain), std::move(exprs));
        } catch (const Error& e) {
            throw ScenarioError(sp, e.what());
        }
    }
    std::vector<FrontierPair> frontier;
    if (doc.contains("frontier")) {
        const json& fr = doc["frontier"];
        if (!fr.is_array()) throw ScenarioError("/frontier", "expected an array of [gamma, lambda]");
        for (std::size_t i = 0; i < fr.size(); ++i) {
            auto [g, l] = as_pair(fr[i], child("/frontier", i));
            frontier.push_back({g, l});
        }
    }
    try {
        sc.strata.emplace(std::move(list), std::move(frontier));
    } catch (const Error& e) {
        throw ScenarioError("/frontier", e.what());
    }

    if (doc.contains("maps")) {
        const json& maps = doc["maps"];
        if (!maps.is_object()) throw ScenarioError("/maps", "expected an object of named maps");
        for (auto it = maps.begin(); it != maps.end(); ++it) {
            const std::string mp = child("/maps", it.key());
            const json& m = it.value();
            reject_unknown(m, {"exprs", "per_stratum", "note"}, mp);
            const std::vector<std::string> sources = as_string_list(require(m, "exprs", mp), child(mp, "exprs"));
            if (sources.empty()) throw ScenarioError(child(mp, "exprs"), "at least one component is required");
            std::vector<Expr> ambient_exprs;
            for (std::size_t k = 0; k < sources.size(); ++k) {
                try {
                    ambient_exprs.push_back(parse(sources[k], sc.ambient));
                } catch (const Error& e) {
                    throw ScenarioError(child(child(mp, "exprs"), k), e.what());
                }
            }
            std::map<std::string, std::vector<std::string>> overrides;
            if (m.contains("per_stratum")) {
                const json& ps = m["per_stratum"];
                if (!ps.is_object()) throw ScenarioError(child(mp, "per_stratum"), "expected an object");
                for (auto jt = ps.begin(); jt != ps.end(); ++jt) {
                    const std::string pp = child(child(mp, "per_stratum"), jt.key());
                    if (!sc.strata->find(jt.key())) throw ScenarioError(pp, "unknown stratum");
                    overrides[jt.key()] = as_string_list(jt.value(), pp);
                }
            }
            try {
                sc.maps.emplace(it.key(), NamedMap{sources, std::move(ambient_exprs),
                                                   StratifiedMap::from_ambient(*sc.strata, sc.ambient, sources, overrides)});
            } catch (const Error& e) {
                throw ScenarioError(mp, e.what());
            }
        }
    }

    if (doc.contains("defaults")) {
        const json& d = doc["defaults"];
        if (!d.is_object()) throw ScenarioError("/defaults", "expected an object");
        reject_unknown(d, {"schedule", "thresholds"}, "/defaults");
    }

    const json& checks = require(doc, "checks", "");
    if (!checks.is_array()) throw ScenarioError("/checks", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        CheckSpec spec;
        spec.path = child("/checks", i);
        spec.body = checks[i];
        spec.kind = as_string(require(spec.body, "kind", spec.path), child(spec.path, "kind"));
        spec.id = spec.body.contains("id") ? as_string(spec.body["id"], child(spec.path, "id"))
                                           : spec.kind + "-" + std::to_string(i);
        if (!ids.insert(spec.id).second) throw ScenarioError(child(spec.path, "id"), "duplicate check id");
        if (spec.body.contains("provenance")) as_string(spec.body["provenance"], child(spec.path, "provenance"));
        sc.checks.push_back(std::move(spec));
    }
    sc.hash = fnv1a(doc.dump());
    for (const auto& spec : sc.checks) {
        const Prepared p = prepare(sc, spec, {});
        if (spec.body.contains("expect")) {
            const std::string ep = child(spec.path, "expect");
            switch (p.kind) {
                case Kind::WL:
                case Kind::WBL:
                case Kind::WhitneyB:
                case Kind::Verdier:
                    validate_expect(spec.body["expect"],
                                    {"verdict", "max_sup", "min_inf", "slope_min", "slope_max", "min_nonempty_shells"}, ep);
                    break;
                case Kind::Projection:
                    validate_expect(spec.body["expect"], {"implication_satisfied", "graph_verdict", "base_verdict"}, ep);
                    break;
                case Kind::Transversal: validate_expect(spec.body["expect"], {"bound_satisfied"}, ep); break;
                case Kind::Frontier: validate_expect(spec.body["expect"], {"ok"}, ep); break;
                case Kind::Derivative: break;
            }
        }
    }
    return sc;
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ScenarioError("", std::string("not a valid scenario document: ") + e.what());
    }
    return load_scenario(doc);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string_view to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Error: return "error";
    }
    return "?";
}

RunResult run_scenario(const Scenario& sc, const Overrides& ov) {
    RunResult result;
    json checks = json::array();
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& spec : sc.checks) {
        CheckOutcome oc;
        oc.id = spec.id;
        oc.kind = spec.kind;
        json entry = {{"id", spec.id}, {"kind", spec.kind}};
        if (spec.body.contains("provenance")) entry["provenance"] = spec.body["provenance"];
        const json expect = spec.body.contains("expect") ? spec.body["expect"] : json::object();
        try {
            const Prepared p = prepare(sc, spec, ov);
            ExpectationResult er;
            Ran ran = run_prepared(sc, p, expect, er);
            oc.status = (ran.negative || !er.met) ? CheckStatus::Fail : CheckStatus::Pass;
            oc.detail = std::move(ran.detail);
            if (p.kind != Kind::Derivative && p.kind != Kind::Frontier) {
                oc.detail["schedule"] = schedule_json(p.sched);
                oc.detail["thresholds"] = thresholds_json(p.thr);
            }
            if (!expect.empty()) {
                entry["expectation"] = {{"expect", expect}, {"met", er.met}, {"failures", er.failures}};
            }
        } catch (const std::exception& e) {
            oc.status = CheckStatus::Error;
            oc.detail = {{"error", e.what()}};
        }
        entry["status"] = to_string(oc.status);
        entry["result"] = oc.detail;
        checks.push_back(std::move(entry));
        ++counts[static_cast<int>(oc.status)];
        result.outcomes.push_back(std::move(oc));
    }
    result.exit_code = counts[2] > 0 ? 2 : (counts[1] > 0 ? 1 : 0);

    json overrides = json::object();
    if (ov.shells) overrides["shells"] = *ov.shells;
    if (ov.samples) overrides["samples"] = *ov.samples;
    if (ov.seed) overrides["seed"] = *ov.seed;
    if (ov.r0) overrides["r0"] = *ov.r0;
    if (ov.rho) overrides["rho"] = *ov.rho;
    if (ov.eps_b) overrides["eps_b"] = *ov.eps_b;
    if (ov.tol) overrides["tol"] = *ov.tol;

    result.report = {{"tool", "stratcheck"},
                     {"tool_version", kToolVersion},
                     {"scenario", sc.name},
                     {"scenario_hash", hex64(sc.hash)},
                     {"overrides", overrides},
                     {"checks", checks},
                     {"summary", {{"pass", counts[0]}, {"fail", counts[1]}, {"error", counts[2]}}},
                     {"exit_code", result.exit_code}};
    return result;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const ShellStat& s) {
    return {{"r_outer", s.r_outer},
            {"r_inner", s.r_inner},
            {"gamma_count", s.gamma_count},
            {"lambda_count", s.lambda_count},
            {"pair_count", s.pair_count},
            {"skipped_pairs", s.skipped_pairs},
            {"empty", s.empty()},
            {"sup", s.empty() ? json(nullptr) : json(s.sup)},
            {"inf", s.empty() ? json(nullptr) : json(s.inf)},
            {"argmax", witness_json(s.argmax)},
            {"argmin", witness_json(s.argmin)}};
}

json to_json(const RegularityVerdict& v) {
    json shells = json::array();
    for (const auto& s : v.shells) shells.push_back(to_json(s));
    return {{"condition", to_string(v.condition)},
            {"gamma", v.gamma},
            {"lambda", v.lambda},
            {"base_point", v.base_point},
            {"verdict", to_string(v.verdict)},
            {"slope", optional_number(v.slope)},
            {"reason", v.reason},
            {"witness", witness_json(v.witness)},
            {"skipped_pairs", v.skipped_pairs},
            {"total_pairs", v.total_pairs},
            {"high_skip_rate", v.high_skip_rate},
            {"shells", shells}};
}

json to_json(const ProjectionReport& r) {
    return {{"condition", to_string(r.condition)},
            {"implication_satisfied", r.implication_satisfied},
            {"note", r.note},
            {"precondition", to_json(r.precondition)},
            {"graph", to_json(r.graph)},
            {"base", to_json(r.base)}};
}

json to_json(const TransversalReport& r) {
    json shells = json::array();
    for (const auto& s : r.shells) {
        shells.push_back({{"r_outer", s.r_outer},
                          {"r_inner", s.r_inner},
                          {"pair_count", s.pair_count},
                          {"max_lhs", s.max_lhs},
                          {"max_rhs", s.max_rhs},
                          {"min_slack", s.min_slack}});
    }
    return {{"condition", to_string(r.condition)},
            {"strata",
             {{"lambda1", r.names.lambda1},
              {"gamma1", r.names.gamma1},
              {"lambda2", r.names.lambda2},
              {"gamma2", r.names.gamma2},
              {"lambda12", r.names.lambda12},
              {"gamma12", r.names.gamma12}}},
            {"base_point", r.base_point},
            {"inf_lambda", r.inf_lambda},
            {"constant", r.constant},
            {"intersection_dim", r.intersection_dim},
            {"pair_count", r.pair_count},
            {"min_slack", r.min_slack},
            {"max_tangent_residual", r.max_tangent_residual},
            {"tightest", witness_json(r.tightest)},
            {"bound_satisfied", r.bound_satisfied},
            {"shells", shells}};
}

json to_json(const FrontierReport& r) {
    json issues = json::array();
    for (const auto& i : r.issues) {
        issues.push_back({{"kind", i.kind}, {"gamma", i.gamma}, {"lambda", i.lambda}, {"detail", i.detail}});
    }
    return {{"ok", r.ok()}, {"issues", issues}, {"warnings", r.warnings}};
}

}  // namespace stratcheck
