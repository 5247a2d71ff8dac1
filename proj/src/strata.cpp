#include "stratcheck/strata.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "stratcheck/random.hpp"

namespace stratcheck {

namespace {

constexpr std::size_t kPilotDraws = 512;
constexpr std::size_t kPilotMinHits = 4;
constexpr double kBoxMargin = 1e-12;

std::string format_point(std::span<const double> p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", p[i]);
        s += buf;
    }
    return s + ")";
}

double clamp_inside(double x, const Interval& iv) {
    const double m = kBoxMargin * iv.width();
    return std::clamp(x, iv.lo + m, iv.hi - m);
}

Vector uniform_in(Rng& rng, const std::vector<Interval>& box) {
    Vector p(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) p[i] = rng.uniform(box[i].lo, box[i].hi);
    return p;
}

// Distance from the chart image at p to target, or infinity when the chart
// cannot be evaluated there.
double distance_at(const Stratum& s, std::span<const double> p, std::span<const double> target) {
    try {
        return distance(s.point(p), target);
    } catch (const EvalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

// Solves the small symmetric positive definite system A x = b in place by
// Gaussian elimination with partial pivoting. Returns false when singular.
bool solve_small(std::vector<double> a, Vector& b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        }
        if (a[piv * n + c] == 0.0) return false;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * b[k];
        b[c] = s / a[c * n + c];
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stratum

Stratum::Stratum(std::string name, std::vector<std::string> params, std::vector<Interval> domain,
                 std::vector<Expr> chart)
    : name_(std::move(name)), params_(std::move(params)), domain_(std::move(domain)), chart_(std::move(chart)) {
    if (name_.empty()) throw InvalidArgument("stratum name must not be empty");
    if (domain_.size() != params_.size()) {
        throw InvalidArgument("stratum '" + name_ + "': domain has " + std::to_string(domain_.size()) +
                              " intervals for " + std::to_string(params_.size()) + " parameters");
    }
    for (const auto& iv : domain_) {
        if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi)) {
            throw InvalidArgument("stratum '" + name_ + "': domain intervals need finite lo < hi");
        }
    }
    if (chart_.empty()) throw InvalidArgument("stratum '" + name_ + "': chart has no coordinates");
    for (const auto& e : chart_) {
        if (e.empty() || e.variables() != params_) {
            throw InvalidArgument("stratum '" + name_ + "': chart expressions must be over the parameters");
        }
    }
}

Stratum Stratum::parse(std::string name, std::vector<std::string> params, std::vector<Interval> domain,
                       const std::vector<std::string>& chart) {
    std::vector<Expr> exprs;
    exprs.reserve(chart.size());
    for (const auto& src : chart) exprs.push_back(stratcheck::parse(src, params));
    return Stratum(std::move(name), std::move(params), std::move(domain), std::move(exprs));
}

bool Stratum::in_domain(std::span<const double> p) const {
    if (p.size() != domain_.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!domain_[i].contains(p[i])) return false;
    }
    return true;
}

Vector Stratum::center() const {
    Vector c(domain_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (domain_[i].lo + domain_[i].hi);
    return c;
}

Vector Stratum::point(std::span<const double> p) const {
    if (p.size() != param_dim()) throw DimensionMismatch("stratum '" + name_ + "': wrong parameter count");
    Vector x(chart_.size());
    for (std::size_t i = 0; i < chart_.size(); ++i) x[i] = chart_[i].eval(p);
    return x;
}

std::pair<Vector, std::vector<Vector>> Stratum::point_and_jacobian(std::span<const double> p) const {
    if (p.size() != param_dim()) throw DimensionMismatch("stratum '" + name_ + "': wrong parameter count");
    const std::size_t n = ambient_dim();
    const std::size_t d = param_dim();
    Vector x(n);
    std::vector<Vector> cols(d, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const DualResult r = chart_[i].eval_dual(p);
        x[i] = r.dual.value;
        for (std::size_t j = 0; j < d; ++j) cols[j][i] = r.dual.partials[j];
    }
    return {std::move(x), std::move(cols)};
}

std::vector<Vector> Stratum::jacobian(std::span<const double> p) const { return point_and_jacobian(p).second; }

Subspace Stratum::tangent_at(std::span<const double> p, double rank_tol) const {
    const std::size_t n = ambient_dim();
    if (param_dim() == 0) return Subspace(n);
    std::vector<Vector> cols = jacobian(p);
    for (auto& c : cols) {
        const double len = norm(c);
        if (len == 0.0) {
            throw RankDeficiency("stratum '" + name_ + "': zero Jacobian column at " + format_point(p));
        }
        for (double& v : c) v /= len;
    }
    Subspace t = orthonormalize(n, cols, rank_tol);
    if (t.dim() < param_dim()) {
        throw RankDeficiency("stratum '" + name_ + "': Jacobian rank " + std::to_string(t.dim()) + " < " +
                             std::to_string(param_dim()) + " at " + format_point(p));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Stratification

Stratification::Stratification(std::vector<Stratum> strata, std::vector<FrontierPair> frontier)
    : strata_(std::move(strata)), frontier_(std::move(frontier)) {
    if (strata_.empty()) throw InvalidArgument("stratification has no strata");
    ambient_dim_ = strata_.front().ambient_dim();
    std::set<std::string> names;
    for (const auto& s : strata_) {
        if (s.ambient_dim() != ambient_dim_) {
            throw InvalidArgument("stratum '" + s.name() + "' has ambient dimension " +
                                  std::to_string(s.ambient_dim()) + ", expected " + std::to_string(ambient_dim_));
        }
        if (!names.insert(s.name()).second) throw InvalidArgument("duplicate stratum name '" + s.name() + "'");
    }
    for (const auto& fp : frontier_) {
        if (!names.count(fp.gamma)) throw InvalidArgument("frontier names unknown stratum '" + fp.gamma + "'");
        if (!names.count(fp.lambda)) throw InvalidArgument("frontier names unknown stratum '" + fp.lambda + "'");
    }
}

std::optional<std::size_t> Stratification::find(const std::string& name) const {
    for (std::size_t i = 0; i < strata_.size(); ++i) {
        if (strata_[i].name() == name) return i;
    }
    return std::nullopt;
}

std::size_t Stratification::index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw InvalidArgument("unknown stratum '" + name + "'");
}

bool Stratification::declares(const std::string& gamma, const std::string& lambda) const {
    return std::any_of(frontier_.begin(), frontier_.end(),
                       [&](const FrontierPair& fp) { return fp.gamma == gamma && fp.lambda == lambda; });
}

// ---------------------------------------------------------------------------
// Maps

StratifiedMap::StratifiedMap(Stratification base, std::size_t target_dim, std::vector<std::vector<Expr>> per_stratum)
    : base_(std::move(base)), target_dim_(target_dim), per_stratum_(std::move(per_stratum)) {
    if (target_dim_ == 0) throw InvalidArgument("map target dimension must be >= 1");
    if (per_stratum_.size() != base_.strata().size()) {
        throw InvalidArgument("map needs one expression list per stratum");
    }
    for (std::size_t i = 0; i < per_stratum_.size(); ++i) {
        const Stratum& s = base_.strata()[i];
        if (per_stratum_[i].size() != target_dim_) {
            throw InvalidArgument("map on stratum '" + s.name() + "' has " + std::to_string(per_stratum_[i].size()) +
                                  " components, expected " + std::to_string(target_dim_));
        }
        for (const auto& e : per_stratum_[i]) {
            if (e.empty() || e.variables() != s.params()) {
                throw InvalidArgument("map on stratum '" + s.name() + "' must be over its parameters");
            }
        }
    }
}

StratifiedMap StratifiedMap::from_ambient(Stratification base, const std::vector<std::string>& ambient_names,
                                          const std::vector<std::string>& exprs,
                                          const std::map<std::string, std::vector<std::string>>& overrides) {
    if (ambient_names.size() != base.ambient_dim()) {
        throw InvalidArgument("map: " + std::to_string(ambient_names.size()) + " ambient names for dimension " +
                              std::to_string(base.ambient_dim()));
    }
    for (const auto& [name, list] : overrides) {
        base.index_of(name);
        if (list.size() != exprs.size()) {
            throw InvalidArgument("map override for '" + name + "' has the wrong number of components");
        }
    }
    std::vector<std::vector<Expr>> per;
    for (const auto& s : base.strata()) {
        std::map<std::string, Expr> bindings;
        for (std::size_t i = 0; i < ambient_names.size(); ++i) bindings.emplace(ambient_names[i], s.chart()[i]);
        auto it = overrides.find(s.name());
        const auto& sources = it != overrides.end() ? it->second : exprs;
        std::vector<Expr> comps;
        for (const auto& src : sources) comps.push_back(substitute(parse(src, ambient_names), s.params(), bindings));
        per.push_back(std::move(comps));
    }
    const std::size_t m = exprs.size();
    return StratifiedMap(std::move(base), m, std::move(per));
}

Vector StratifiedMap::value(std::size_t stratum, std::span<const double> p) const {
    const auto& comps = per_stratum_.at(stratum);
    Vector y(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) y[i] = comps[i].eval(p);
    return y;
}

StratifiedMap compose(const StratifiedMap& f, const std::vector<Expr>& g) {
    if (g.empty()) throw InvalidArgument("compose: outer map has no components");
    const auto& names = g.front().variables();
    if (names.size() != f.target_dim()) throw DimensionMismatch("compose: outer map arity differs from target dim");
    for (const auto& e : g) {
        if (e.variables() != names) throw InvalidArgument("compose: outer components must share variables");
    }
    std::vector<std::vector<Expr>> per;
    for (std::size_t i = 0; i < f.base().strata().size(); ++i) {
        const Stratum& s = f.base().strata()[i];
        std::map<std::string, Expr> bindings;
        for (std::size_t j = 0; j < names.size(); ++j) bindings.emplace(names[j], f.components(i)[j]);
        std::vector<Expr> comps;
        for (const auto& e : g) comps.push_back(substitute(e, s.params(), bindings));
        per.push_back(std::move(comps));
    }
    return StratifiedMap(f.base(), g.size(), std::move(per));
}

StratifiedMap pair(const StratifiedMap& f, const StratifiedMap& g) {
    const auto& a = f.base().strata();
    const auto& b = g.base().strata();
    if (a.size() != b.size()) throw InvalidArgument("pair: maps have different stratifications");
    std::vector<std::vector<Expr>> per;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name() != b[i].name() || a[i].params() != b[i].params()) {
            throw InvalidArgument("pair: maps have different stratifications");
        }
        std::vector<Expr> comps = f.components(i);
        comps.insert(comps.end(), g.components(i).begin(), g.components(i).end());
        per.push_back(std::move(comps));
    }
    return StratifiedMap(f.base(), f.target_dim() + g.target_dim(), std::move(per));
}

Stratification graph_stratification(const StratifiedMap& f) {
    std::vector<Stratum> strata;
    for (std::size_t i = 0; i < f.base().strata().size(); ++i) {
        const Stratum& s = f.base().strata()[i];
        std::vector<Expr> chart = s.chart();
        chart.insert(chart.end(), f.components(i).begin(), f.components(i).end());
        strata.emplace_back(s.name(), s.params(), s.domain(), std::move(chart));
    }
    return Stratification(std::move(strata), f.base().frontier());
}

Stratification image_stratification(const StratifiedMap& f, std::size_t probes, std::uint64_t seed) {
    std::vector<Stratum> strata;
    for (std::size_t i = 0; i < f.base().strata().size(); ++i) {
        const Stratum& s = f.base().strata()[i];
        Stratum img(s.name(), s.params(), s.domain(), f.components(i));
        if (img.param_dim() > 0) {
            Rng rng(mix_seed(seed, fnv1a(s.name())));
            for (std::size_t k = 0; k <= probes; ++k) {
                const Vector p = k == 0 ? s.center() : uniform_in(rng, s.domain());
                try {
                    img.tangent_at(p);
                } catch (const RankDeficiency& e) {
                    throw RankDeficiency(std::string("image is not immersive: ") + e.what());
                } catch (const EvalError&) {
                    // Probe outside the evaluable part of the box; immersion is judged elsewhere.
                }
            }
        }
        strata.push_back(std::move(img));
    }
    return Stratification(std::move(strata), f.base().frontier());
}

// ---------------------------------------------------------------------------
// Nearest point search

NearestResult nearest_param(const Stratum& s, std::span<const double> target, std::size_t grid_budget) {
    if (target.size() != s.ambient_dim()) throw DimensionMismatch("nearest_param: target dimension mismatch");
    const std::size_t d = s.param_dim();
    if (d == 0) return {Vector{}, distance(s.point(Vector{}), target)};

    const auto& box = s.domain();
    std::size_t g = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(grid_budget), 1.0 / d) + 1e-9));
    g = std::max<std::size_t>(g, 2);

    Vector best(d);
    double best_dist = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(d, 0);
    Vector p(d);
    for (;;) {
        for (std::size_t j = 0; j < d; ++j) {
            p[j] = box[j].lo + (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(g) * box[j].width();
        }
        const double dist = distance_at(s, p, target);
        if (dist < best_dist) {
            best_dist = dist;
            best = p;
        }
        std::size_t j = 0;
        while (j < d && ++idx[j] == g) idx[j++] = 0;
        if (j == d) break;
    }
    if (!std::isfinite(best_dist)) {
        throw EvalError("chart of '" + s.name() + "' is not evaluable on any grid point", s.name(), 0);
    }

    Vector step(d);
    for (std::size_t j = 0; j < d; ++j) step[j] = box[j].width() / static_cast<double>(g);
    for (int iter = 0; iter < 200000; ++iter) {
        bool improved = false;
        for (std::size_t j = 0; j < d; ++j) {
            for (double sign : {-1.0, 1.0}) {
                Vector q = best;
                q[j] = clamp_inside(best[j] + sign * step[j], box[j]);
                if (q[j] == best[j]) continue;
                const double dist = distance_at(s, q, target);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = std::move(q);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            bool tiny = true;
            for (std::size_t j = 0; j < d; ++j) {
                step[j] *= 0.5;
                if (step[j] > 1e-14 * box[j].width()) tiny = false;
            }
            if (tiny || best_dist == 0.0) break;
        }
    }
    return {best, best_dist};
}

Vector locate(const Stratum& s, std::span<const double> target, double tol) {
    const std::size_t d = s.param_dim();
    NearestResult start = nearest_param(s, target, 256);
    Vector p = start.param;
    double res = start.distance;
    const double scale = 1.0 + norm(target);
    for (int iter = 0; iter < 100 && d > 0 && res > 1e-15 * scale; ++iter) {
        auto [x, cols] = s.point_and_jacobian(p);
        Vector r = x - Vector(target.begin(), target.end());
        std::vector<double> a(d * d, 0.0);
        Vector g(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) a[i * d + j] = dot(cols[i], cols[j]);
            g[i] = -dot(cols[i], r);
        }
        double trace = 0.0;
        for (std::size_t i = 0; i < d; ++i) trace += a[i * d + i];
        for (std::size_t i = 0; i < d; ++i) a[i * d + i] += 1e-14 * trace;
        if (!solve_small(a, g)) break;
        Vector q(d);
        for (std::size_t j = 0; j < d; ++j) q[j] = clamp_inside(p[j] + g[j], s.domain()[j]);
        const double next = distance_at(s, q, target);
        if (!(next < res)) break;
        p = std::move(q);
        res = next;
    }
    if (res > tol * scale) {
        throw InvalidArgument("locate: point " + format_point(target) + " is not on stratum '" + s.name() +
                              "' (residual " + std::to_string(res) + ")");
    }
    return p;
}

// ---------------------------------------------------------------------------
// Sampling

void SampleSchedule::validate() const {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw InvalidArgument("schedule: r0 must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("schedule: rho must lie in (0, 1)");
    if (shells < 2) throw InvalidArgument("schedule: at least 2 shells are required");
    if (samples < 1) throw InvalidArgument("schedule: at least 1 sample per shell is required");
    if (attempt_factor < 1) throw InvalidArgument("schedule: attempt factor must be >= 1");
}

double SampleSchedule::outer_radius(std::size_t k) const { return r0 * std::pow(rho, static_cast<double>(k)); }

ShellSamples sample_near(const Stratum& s, const SampleSchedule& sched) {
    sched.validate();
    const Vector& a = sched.base_point;
    if (a.size() != s.ambient_dim()) throw DimensionMismatch("sample_near: base point dimension mismatch");

    ShellSamples out;
    NearestResult anchor = nearest_param(s, a);
    out.anchor_param = anchor.param;
    out.anchor_distance = anchor.distance;
    if (anchor.distance > sched.r0) {
        throw UnreachableBasePoint("stratum '" + s.name() + "' stays at distance " + std::to_string(anchor.distance) +
                                   " > r0 = " + std::to_string(sched.r0) + " from " + format_point(a));
    }

    out.shells.resize(sched.shells);
    for (std::size_t k = 0; k < sched.shells; ++k) {
        out.shells[k].r_outer = sched.outer_radius(k);
        out.shells[k].r_inner = sched.inner_radius(k);
    }

    if (s.param_dim() == 0) {
        const Vector x = s.point(Vector{});
        const double dist = distance(x, a);
        for (auto& sh : out.shells) {
            sh.attempts = 1;
            if (sh.r_inner < dist && dist <= sh.r_outer) sh.samples.push_back({Vector{}, x});
        }
        return out;
    }

    const std::size_t d = s.param_dim();
    const std::uint64_t name_hash = fnv1a(s.name());

    // Pilot: shrink a proposal box through a sequence of ball radii so that
    // thin preimages of small balls are still hit.
    Rng pilot(mix_seed(sched.seed, name_hash, 0x70696C6F74ULL));
    std::vector<Interval> box = s.domain();
    std::vector<double> radii;
    {
        double far = 0.0;
        for (std::size_t i = 0; i < kPilotDraws; ++i) {
            const double dist = distance_at(s, uniform_in(pilot, box), a);
            if (std::isfinite(dist)) far = std::max(far, dist);
        }
        for (double r = far; r > sched.r0; r *= 0.5) radii.push_back(r);
    }
    const std::size_t first_shell_level = radii.size();
    for (std::size_t k = 0; k < sched.shells; ++k) radii.push_back(sched.outer_radius(k));

    std::vector<std::vector<Interval>> shell_boxes;
    for (std::size_t level = 0; level < radii.size(); ++level) {
        const double r = radii[level];
        std::vector<Vector> hits;
        for (std::size_t i = 0; i < kPilotDraws; ++i) {
            Vector p = uniform_in(pilot, box);
            if (distance_at(s, p, a) <= r) hits.push_back(std::move(p));
        }
        if (hits.size() >= kPilotMinHits) {
            hits.push_back(anchor.param);
            std::vector<Interval> next(d);
            for (std::size_t j = 0; j < d; ++j) {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (const auto& h : hits) {
                    lo = std::min(lo, h[j]);
                    hi = std::max(hi, h[j]);
                }
                const double ext = 0.25 * (hi - lo) + 1e-9 * s.domain()[j].width();
                next[j] = {std::max(s.domain()[j].lo, lo - ext), std::min(s.domain()[j].hi, hi + ext)};
            }
            box = std::move(next);
        }
        if (level >= first_shell_level) shell_boxes.push_back(box);
    }

    const std::size_t cap = sched.attempt_factor * sched.samples;
    for (std::size_t k = 0; k < sched.shells; ++k) {
        Shell& sh = out.shells[k];
        Rng rng(mix_seed(sched.seed, name_hash, k + 1));
        const auto& kbox = shell_boxes[k];
        while (sh.samples.size() < sched.samples && sh.attempts < cap) {
            ++sh.attempts;
            Vector p = uniform_in(rng, kbox);
            Vector x;
            try {
                x = s.point(p);
            } catch (const EvalError&) {
                continue;
            }
            const double dist = distance(x, a);
            if (sh.r_inner < dist && dist <= sh.r_outer) sh.samples.push_back({std::move(p), std::move(x)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Frontier audit

FrontierReport frontier_check(const Stratification& x, const FrontierOptions& opts) {
    FrontierReport rep;
    const auto& strata = x.strata();

    for (const auto& fp : x.frontier()) {
        const Stratum& g = x.at(fp.gamma);
        const Stratum& l = x.at(fp.lambda);
        if (g.param_dim() >= l.param_dim()) {
            rep.issues.push_back({"dimension", fp.gamma, fp.lambda,
                                  "dim " + fp.gamma + " = " + std::to_string(g.param_dim()) + " is not below dim " +
                                      fp.lambda + " = " + std::to_string(l.param_dim())});
        }
    }

    {
        // Depth-first search for a cycle in gamma -> lambda edges.
        const std::size_t n = strata.size();
        std::vector<std::vector<std::size_t>> edges(n);
        for (const auto& fp : x.frontier()) edges[x.index_of(fp.gamma)].push_back(x.index_of(fp.lambda));
        std::vector<int> state(n, 0);
        std::vector<std::size_t> stack;
        std::function<bool(std::size_t)> visit = [&](std::size_t v) {
            state[v] = 1;
            stack.push_back(v);
            for (std::size_t w : edges[v]) {
                if (state[w] == 1) {
                    std::string path;
                    auto it = std::find(stack.begin(), stack.end(), w);
                    for (; it != stack.end(); ++it) path += strata[*it].name() + " -> ";
                    rep.issues.push_back({"cycle", strata[w].name(), strata[v].name(), path + strata[w].name()});
                    return true;
                }
                if (state[w] == 0 && visit(w)) return true;
            }
            stack.pop_back();
            state[v] = 2;
            return false;
        };
        for (std::size_t v = 0; v < n; ++v) {
            if (state[v] == 0 && visit(v)) break;
        }
    }

    auto draw = [&](const Stratum& s, std::uint64_t salt) {
        std::vector<Vector> pts;
        if (s.param_dim() == 0) {
            pts.push_back(s.point(Vector{}));
            return pts;
        }
        Rng rng(mix_seed(opts.seed, fnv1a(s.name()), salt));
        for (std::size_t i = 0; i < opts.samples * 4 && pts.size() < opts.samples; ++i) {
            try {
                pts.push_back(s.point(uniform_in(rng, s.domain())));
            } catch (const EvalError&) {
            }
        }
        return pts;
    };

    for (const auto& fp : x.frontier()) {
        const Stratum& g = x.at(fp.gamma);
        const Stratum& l = x.at(fp.lambda);
        double worst = 0.0;
        Vector worst_pt;
        for (const auto& p : draw(g, 0xC105E)) {
            const double dist = nearest_param(l, p, 1024).distance;
            if (dist > worst) {
                worst = dist;
                worst_pt = p;
            }
        }
        if (worst > opts.closure_tol) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3g", worst);
            rep.issues.push_back({"closure", fp.gamma, fp.lambda,
                                  "point " + format_point(worst_pt) + " of " + fp.gamma + " is at distance " + buf +
                                      " from " + fp.lambda});
        }
    }

    for (std::size_t i = 0; i < strata.size(); ++i) {
        for (std::size_t j = 0; j < strata.size(); ++j) {
            if (i == j) continue;
            const Stratum& a = strata[i];
            const Stratum& b = strata[j];
            if (x.declares(a.name(), b.name()) || x.declares(b.name(), a.name())) continue;
            // A point of a lying on (or in the closure of) b means the two are
            // not disjoint or share an undeclared frontier.
            for (const auto& p : draw(a, 0x0E7)) {
                const double dist = nearest_param(b, p, 1024).distance;
                if (dist <= opts.overlap_tol) {
                    rep.issues.push_back({"overlap", a.name(), b.name(),
                                          "point " + format_point(p) + " of " + a.name() + " lies in the closure of " +
                                              b.name() + " without a declared frontier relation"});
                    break;
                }
            }
        }
    }

    for (const auto& s : strata) {
        if (s.param_dim() == 0) continue;
        Rng rng(mix_seed(opts.seed, fnv1a(s.name()), 0x121));
        std::vector<Sample> pts;
        auto add = [&](Vector p) {
            try {
                Vector q = s.point(p);
                pts.push_back({std::move(p), std::move(q)});
            } catch (const EvalError&) {
            }
        };
        for (std::size_t i = 0; i < 32; ++i) add(uniform_in(rng, s.domain()));
        // Cell centres of a lattice symmetric about the box centre, so that
        // folds like u -> u^2 produce colliding sample pairs.
        const std::size_t d = s.param_dim();
        const auto m = static_cast<std::size_t>(std::max(2.0, std::floor(std::pow(256.0, 1.0 / static_cast<double>(d)))));
        std::vector<std::size_t> idx(d, 0);
        for (bool more = d <= 8; more;) {
            Vector p(d);
            for (std::size_t j = 0; j < d; ++j) {
                const Interval& iv = s.domain()[j];
                p[j] = iv.lo + (static_cast<double>(idx[j]) + 0.5) * iv.width() / static_cast<double>(m);
            }
            add(std::move(p));
            more = false;
            for (std::size_t j = 0; j < d && !more; ++j) {
                if (++idx[j] < m) more = true;
                else idx[j] = 0;
            }
        }
        double span = 0.0;
        for (const auto& iv : s.domain()) span = std::max(span, iv.width());
        bool warned = false;
        for (std::size_t u = 0; u < pts.size() && !warned; ++u) {
            for (std::size_t v = u + 1; v < pts.size(); ++v) {
                if (distance(pts[u].param, pts[v].param) > 1e-6 * span && distance(pts[u].point, pts[v].point) <= 1e-12 * (1.0 + norm(pts[u].point))) {
                    rep.warnings.push_back("stratum '" + s.name() + "': parameters " + format_point(pts[u].param) +
                                           " and " + format_point(pts[v].param) + " map to the same point");
                    warned = true;
                    break;
                }
            }
        }
    }
    return rep;
}

}  // namespace stratcheck
