#include "stratcheck/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stratcheck {

namespace {

// Samples of a (gamma, lambda) pair, shell by shell. A point stratum
// sitting at the base point serves as the gamma sample of every shell.
struct PairedShells {
    ShellSamples gamma;
    ShellSamples lambda;
    std::vector<std::vector<Sample>> gamma_shells;

    std::size_t shells() const { return lambda.shells.size(); }
    const std::vector<Sample>& gamma_at(std::size_t k) const { return gamma_shells[k]; }
    const std::vector<Sample>& lambda_at(std::size_t k) const { return lambda.shells[k].samples; }
};

constexpr double kCoincidence = 1e-12;

PairedShells sample_pair(const Stratum& g, const Stratum& l, const SampleSchedule& sched) {
    PairedShells ps;
    ps.gamma = sample_near(g, sched);
    ps.lambda = sample_near(l, sched);
    const bool fixed = g.param_dim() == 0 && ps.gamma.anchor_distance <= kCoincidence;
    for (std::size_t k = 0; k < ps.gamma.shells.size(); ++k) {
        if (fixed) {
            ps.gamma_shells.push_back({Sample{Vector{}, g.point(Vector{})}});
        } else {
            ps.gamma_shells.push_back(ps.gamma.shells[k].samples);
        }
    }
    return ps;
}

template <class ValueFn>
std::vector<ShellStat> collect(const PairedShells& ps, double gap, ValueFn&& value) {
    std::vector<ShellStat> out;
    for (std::size_t k = 0; k < ps.shells(); ++k) {
        ShellStat st;
        st.r_outer = ps.lambda.shells[k].r_outer;
        st.r_inner = ps.lambda.shells[k].r_inner;
        const auto& gs = ps.gamma_at(k);
        const auto& ls = ps.lambda_at(k);
        st.gamma_count = gs.size();
        st.lambda_count = ls.size();
        double sup = -std::numeric_limits<double>::infinity();
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < gs.size(); ++i) {
            for (std::size_t j = 0; j < ls.size(); ++j) {
                const double gapxy = distance(gs[i].point, ls[j].point);
                if (gapxy < gap) {
                    ++st.skipped_pairs;
                    continue;
                }
                const double v = value(k, i, j, gapxy);
                ++st.pair_count;
                if (v > sup) {
                    sup = v;
                    st.argmax = Witness{gs[i].point, ls[j].point, v};
                }
                if (v < inf) {
                    inf = v;
                    st.argmin = Witness{gs[i].point, ls[j].point, v};
                }
            }
        }
        if (st.pair_count > 0) {
            st.sup = sup;
            st.inf = inf;
        }
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<std::vector<Subspace>> tangents(const Stratum& s, const std::vector<std::vector<Sample>>& shells) {
    std::vector<std::vector<Subspace>> out;
    for (const auto& sh : shells) {
        std::vector<Subspace> row;
        row.reserve(sh.size());
        for (const auto& smp : sh) row.push_back(s.tangent_at(smp.param));
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::vector<Sample>> lambda_shells(const PairedShells& ps) {
    std::vector<std::vector<Sample>> out;
    for (const auto& sh : ps.lambda.shells) out.push_back(sh.samples);
    return out;
}

std::vector<const ShellStat*> non_empty(std::span<const ShellStat> shells) {
    std::vector<const ShellStat*> out;
    for (const auto& s : shells) {
        if (!s.empty()) out.push_back(&s);
    }
    return out;
}

struct Halves {
    double early = 0.0;
    double late = 0.0;
};

Halves half_maxima(const std::vector<const ShellStat*>& ne) {
    const std::size_t h = ne.size() / 2;
    Halves out;
    for (std::size_t i = 0; i < h; ++i) out.early = std::max(out.early, ne[i]->sup);
    for (std::size_t i = ne.size() - h; i < ne.size(); ++i) out.late = std::max(out.late, ne[i]->sup);
    return out;
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

Classification growth_rule(std::span<const ShellStat> shells, const Thresholds& t, std::size_t min_shells) {
    Classification c;
    const auto ne = non_empty(shells);
    if (ne.size() < min_shells) {
        c.reason = "only " + std::to_string(ne.size()) + " non-empty shells (need " + std::to_string(min_shells) + ")";
        return c;
    }
    c.slope = fit_log_slope(shells, false, t.zero_floor);
    const double initial = ne.front()->sup;
    const double final_sup = ne.back()->sup;
    if (c.slope && *c.slope <= t.fail_slope && final_sup > t.growth_factor * initial) {
        c.verdict = Verdict::Fails;
        c.reason = "sup grows with slope " + fmt(*c.slope) + ", final/initial = " + fmt(final_sup / initial);
        return c;
    }
    const Halves h = half_maxima(ne);
    if (h.late <= (1.0 + t.eps_growth) * h.early) {
        c.verdict = Verdict::Holds;
        c.reason = "late max " + fmt(h.late) + " <= (1 + eps) * early max " + fmt(h.early);
        return c;
    }
    c.reason = "late max " + fmt(h.late) + " exceeds early max " + fmt(h.early) + " without a clear growth trend";
    return c;
}

RegularityVerdict assemble(Condition cond, const std::string& gamma, const std::string& lambda,
                           const SampleSchedule& sched, std::vector<ShellStat> shells, const Classification& c,
                           const Thresholds& t, bool witness_from_inf = false) {
    RegularityVerdict v;
    v.condition = cond;
    v.gamma = gamma;
    v.lambda = lambda;
    v.base_point = sched.base_point;
    v.verdict = c.verdict;
    v.slope = c.slope;
    v.reason = c.reason;
    for (const auto& s : shells) {
        v.skipped_pairs += s.skipped_pairs;
        v.total_pairs += s.skipped_pairs + s.pair_count;
    }
    v.high_skip_rate = v.total_pairs > 0 &&
                       static_cast<double>(v.skipped_pairs) > t.skip_flag_rate * static_cast<double>(v.total_pairs);
    if (c.verdict == Verdict::Fails) {
        for (auto it = shells.rbegin(); it != shells.rend(); ++it) {
            if (it->empty()) continue;
            v.witness = witness_from_inf ? it->argmin : it->argmax;
            break;
        }
    }
    v.shells = std::move(shells);
    return v;
}

}  // namespace

std::string_view to_string(Condition c) {
    switch (c) {
        case Condition::WL: return "WL";
        case Condition::WBL: return "WBL";
        case Condition::WhitneyB: return "WhitneyB";
        case Condition::Verdier: return "Verdier";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

Condition parse_condition(std::string_view name) {
    for (Condition c : {Condition::WL, Condition::WBL, Condition::WhitneyB, Condition::Verdier}) {
        if (to_string(c) == name) return c;
    }
    throw InvalidArgument("unknown condition '" + std::string(name) + "'");
}

std::optional<double> fit_log_slope(std::span<const ShellStat> shells, bool use_inf, double floor) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : shells) {
        if (s.empty()) continue;
        const double v = use_inf ? s.inf : s.sup;
        if (!(v > floor) || !std::isfinite(v)) continue;
        xs.push_back(std::log(s.r_outer));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 2) return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

Classification wl_verdict(std::span<const ShellStat> shells, const Thresholds& t) {
    Classification c = growth_rule(shells, t, 2);
    if (c.verdict == Verdict::Inconclusive && c.slope && *c.slope >= -t.eps_growth) {
        c.verdict = Verdict::Holds;
        c.reason = "sup trend slope " + fmt(*c.slope) + " >= -eps";
    }
    return c;
}

Classification wbl_verdict(std::span<const ShellStat> shells, const Thresholds& t) {
    Classification c;
    const auto ne = non_empty(shells);
    if (ne.size() < 2) {
        c.reason = "only " + std::to_string(ne.size()) + " non-empty shells (need 2)";
        return c;
    }
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto* s : ne) lowest = std::min(lowest, s->inf);
    c.slope = fit_log_slope(shells, true, 0.0);
    const double initial = ne.front()->inf;
    const double final_inf = ne.back()->inf;
    if (lowest <= 0.0) {
        c.verdict = Verdict::Fails;
        c.reason = "distinct points with equal images (inf = 0)";
        return c;
    }
    if (c.slope && *c.slope >= t.wbl_slope && final_inf <= initial / t.growth_factor) {
        c.verdict = Verdict::Fails;
        c.reason = "inf collapses with slope " + fmt(*c.slope) + ", final/initial = " + fmt(final_inf / initial);
        return c;
    }
    if (lowest >= t.wbl_floor && (!c.slope || *c.slope < t.wbl_slope)) {
        c.verdict = Verdict::Holds;
        c.reason = "inf stays >= " + fmt(lowest);
        return c;
    }
    c.reason = "lowest inf " + fmt(lowest) + " without a decisive trend";
    return c;
}

Classification whitney_b_verdict(std::span<const ShellStat> shells, const Thresholds& t) {
    Classification c;
    const auto ne = non_empty(shells);
    if (ne.size() < 3) {
        c.reason = "only " + std::to_string(ne.size()) + " non-empty shells (need 3)";
        return c;
    }
    c.slope = fit_log_slope(shells, false, t.zero_floor);
    const bool all_zero = std::all_of(ne.begin(), ne.end(), [&](const ShellStat* s) { return s->sup <= t.zero_floor; });
    const double final_sup = ne.back()->sup;
    if (final_sup <= t.eps_b && (all_zero || (c.slope && *c.slope >= t.b_slope))) {
        c.verdict = Verdict::Holds;
        c.reason = all_zero ? "defect is zero on every shell"
                            : "final defect " + fmt(final_sup) + " with shrink slope " + fmt(*c.slope);
        return c;
    }
    double floor_last3 = std::numeric_limits<double>::infinity();
    for (std::size_t i = ne.size() - 3; i < ne.size(); ++i) floor_last3 = std::min(floor_last3, ne[i]->sup);
    if (floor_last3 >= t.eps_fail) {
        c.verdict = Verdict::Fails;
        c.reason = "defect stays >= " + fmt(floor_last3) + " over the last 3 shells";
        return c;
    }
    c.reason = "final defect " + fmt(final_sup) + " neither vanishing nor persistent";
    return c;
}

Classification verdier_verdict(std::span<const ShellStat> shells, const Thresholds& t) {
    return growth_rule(shells, t, 3);
}

std::vector<ShellStat> wl_ratio_stats(const StratifiedMap& f, const std::string& gamma, const std::string& lambda,
                                      const SampleSchedule& sched, double degenerate_gap) {
    const auto& x = f.base();
    const std::size_t gi = x.index_of(gamma);
    const std::size_t li = x.index_of(lambda);
    const PairedShells ps = sample_pair(x.strata()[gi], x.strata()[li], sched);
    std::vector<std::vector<Vector>> fg;
    std::vector<std::vector<Vector>> fl;
    for (std::size_t k = 0; k < ps.shells(); ++k) {
        std::vector<Vector> a;
        for (const auto& s : ps.gamma_at(k)) a.push_back(f.value(gi, s.param));
        std::vector<Vector> b;
        for (const auto& s : ps.lambda_at(k)) b.push_back(f.value(li, s.param));
        fg.push_back(std::move(a));
        fl.push_back(std::move(b));
    }
    return collect(ps, degenerate_gap, [&](std::size_t k, std::size_t i, std::size_t j, double gap) {
        return distance(fg[k][i], fl[k][j]) / gap;
    });
}

std::vector<ShellStat> whitney_b_stats(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                       const SampleSchedule& sched, double degenerate_gap) {
    const Stratum& g = x.at(gamma);
    const Stratum& l = x.at(lambda);
    const PairedShells ps = sample_pair(g, l, sched);
    const auto tl = tangents(l, lambda_shells(ps));
    return collect(ps, degenerate_gap, [&](std::size_t k, std::size_t i, std::size_t j, double gap) {
        Vector secant = ps.gamma_at(k)[i].point - ps.lambda_at(k)[j].point;
        for (double& c : secant) c /= gap;
        return dist_vec(secant, tl[k][j]);
    });
}

std::vector<ShellStat> verdier_stats(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                     const SampleSchedule& sched, double degenerate_gap) {
    const Stratum& g = x.at(gamma);
    const Stratum& l = x.at(lambda);
    const PairedShells ps = sample_pair(g, l, sched);
    const auto tg = tangents(g, ps.gamma_shells);
    const auto tl = tangents(l, lambda_shells(ps));
    return collect(ps, degenerate_gap, [&](std::size_t k, std::size_t i, std::size_t j, double gap) {
        return dist_d(tg[k][i], tl[k][j]) / gap;
    });
}

RegularityVerdict check_wl(const StratifiedMap& f, const std::string& gamma, const std::string& lambda,
                           const SampleSchedule& sched, const Thresholds& t) {
    auto shells = wl_ratio_stats(f, gamma, lambda, sched, t.degenerate_gap);
    const Classification c = wl_verdict(shells, t);
    return assemble(Condition::WL, gamma, lambda, sched, std::move(shells), c, t);
}

RegularityVerdict check_wbl(const StratifiedMap& f, const std::string& gamma, const std::string& lambda,
                            const SampleSchedule& sched, const Thresholds& t) {
    auto shells = wl_ratio_stats(f, gamma, lambda, sched, t.degenerate_gap);
    const Classification c = wbl_verdict(shells, t);
    return assemble(Condition::WBL, gamma, lambda, sched, std::move(shells), c, t, true);
}

RegularityVerdict check_whitney_b(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                  const SampleSchedule& sched, const Thresholds& t) {
    auto shells = whitney_b_stats(x, gamma, lambda, sched, t.degenerate_gap);
    const Classification c = whitney_b_verdict(shells, t);
    return assemble(Condition::WhitneyB, gamma, lambda, sched, std::move(shells), c, t);
}

RegularityVerdict check_verdier(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                const SampleSchedule& sched, const Thresholds& t) {
    auto shells = verdier_stats(x, gamma, lambda, sched, t.degenerate_gap);
    const Classification c = verdier_verdict(shells, t);
    return assemble(Condition::Verdier, gamma, lambda, sched, std::move(shells), c, t);
}

SecantVertical secant_vertical_identity(std::span<const double> x, std::span<const double> y, std::size_t n) {
    require_same_dim(x, y);
    if (n == 0 || n >= x.size()) {
        throw InvalidArgument("secant_vertical_identity: need 0 < n < total dimension");
    }
    const std::size_t total = x.size();
    Vector delta(total);
    for (std::size_t i = 0; i < total; ++i) delta[i] = x[i] - y[i];
    const double len = norm(delta);
    if (len == 0.0) throw InvalidArgument("secant_vertical_identity: x == y");

    const double da = norm(std::span<const double>(delta).first(n));
    const double df = norm(std::span<const double>(delta).subspan(n));
    SecantVertical out;
    if (da == 0.0) {
        out.vertical = true;
        out.d_val = 0.0;
        out.ratio = std::numeric_limits<double>::infinity();
        out.residual = 0.0;
        return out;
    }
    std::vector<std::size_t> vertical_axes;
    for (std::size_t i = n; i < total; ++i) vertical_axes.push_back(i);
    const Subspace vertical = Subspace::coordinate(total, vertical_axes);
    for (double& c : delta) c /= len;
    out.d_val = dist_vec(delta, vertical);
    out.ratio = df / da;
    out.residual = std::abs(out.d_val - 1.0 / std::sqrt(1.0 + out.ratio * out.ratio));
    return out;
}

ProjectionReport theorem_suite_projection(const StratifiedMap& f, Condition condition, const std::string& gamma,
                                          const std::string& lambda, const SampleSchedule& sched,
                                          const Thresholds& t) {
    if (condition != Condition::WhitneyB && condition != Condition::Verdier) {
        throw InvalidArgument("projection suite supports WhitneyB and Verdier");
    }
    ProjectionReport rep;
    rep.condition = condition;
    rep.precondition = check_wl(f, gamma, lambda, sched, t);

    const Stratification graph = graph_stratification(f);
    SampleSchedule gsched = sched;
    const std::size_t gi = f.base().index_of(gamma);
    const Vector anchor = nearest_param(f.base().strata()[gi], sched.base_point).param;
    const Vector fa = f.value(gi, anchor);
    gsched.base_point.insert(gsched.base_point.end(), fa.begin(), fa.end());

    auto run = [&](const Stratification& x, const SampleSchedule& s) {
        return condition == Condition::WhitneyB ? check_whitney_b(x, gamma, lambda, s, t)
                                                : check_verdier(x, gamma, lambda, s, t);
    };
    rep.graph = run(graph, gsched);
    rep.base = run(f.base(), sched);
    rep.implication_satisfied = !(rep.graph.verdict == Verdict::Holds && rep.base.verdict == Verdict::Fails);
    if (rep.precondition.verdict != Verdict::Holds) {
        rep.note = "weakly Lipschitz precondition is " + std::string(to_string(rep.precondition.verdict));
    } else if (!rep.implication_satisfied) {
        rep.note = "graph pair holds but base pair fails: sampling or implementation error";
    }
    return rep;
}

TransversalReport theorem_suite_transversal(const Stratification& x, const TransversalNames& names,
                                            Condition condition, const SampleSchedule& sched, double slack_tol) {
    if (condition != Condition::WhitneyB && condition != Condition::Verdier) {
        throw InvalidArgument("transversal suite supports WhitneyB and Verdier");
    }
    const Stratum& l1 = x.at(names.lambda1);
    const Stratum& g1 = x.at(names.gamma1);
    const Stratum& l2 = x.at(names.lambda2);
    const Stratum& g2 = x.at(names.gamma2);
    const Stratum& l12 = x.at(names.lambda12);
    const Stratum& g12 = x.at(names.gamma12);

    TransversalReport rep;
    rep.condition = condition;
    rep.names = names;
    rep.base_point = sched.base_point;
    rep.intersection_dim = l12.param_dim();

    const PairedShells ps = sample_pair(g12, l12, sched);

    struct LambdaData {
        Subspace s, k, sk;
        double lambda;
    };
    struct GammaData {
        Subspace r, l, rl;
    };
    std::vector<std::vector<LambdaData>> ld(ps.shells());
    std::vector<std::vector<GammaData>> gd(ps.shells());
    rep.inf_lambda = 1.0;
    bool any = false;

    for (std::size_t k = 0; k < ps.shells(); ++k) {
        for (const auto& smp : ps.lambda_at(k)) {
            Subspace s = l1.tangent_at(locate(l1, smp.point));
            Subspace kk = l2.tangent_at(locate(l2, smp.point));
            Subspace sk = intersect(s, kk);
            if (sk.dim() != l12.param_dim()) {
                throw InvalidArgument("transversal suite: tangent intersection has dimension " + std::to_string(sk.dim()) +
                                      " at a sample of " + names.lambda12 + ", expected " +
                                      std::to_string(l12.param_dim()));
            }
            const double lam = lambda_angle(s, kk);
            if (lam <= 0.0) {
                throw InvalidArgument("transversal suite: lambda vanishes at a sample of " + names.lambda12);
            }
            rep.inf_lambda = std::min(rep.inf_lambda, lam);
            any = true;
            const Subspace t12 = l12.tangent_at(smp.param);
            rep.max_tangent_residual = std::max(rep.max_tangent_residual, dist_D(t12, sk));
            ld[k].push_back({std::move(s), std::move(kk), std::move(sk), lam});
        }
        for (const auto& smp : ps.gamma_at(k)) {
            Subspace r = g1.param_dim() == 0 ? Subspace(x.ambient_dim()) : g1.tangent_at(locate(g1, smp.point));
            Subspace l = g2.param_dim() == 0 ? Subspace(x.ambient_dim()) : g2.tangent_at(locate(g2, smp.point));
            Subspace rl = intersect(r, l);
            if (rl.dim() != g12.param_dim()) {
                throw InvalidArgument("transversal suite: tangent intersection has dimension " + std::to_string(rl.dim()) +
                                      " at a sample of " + names.gamma12 + ", expected " +
                                      std::to_string(g12.param_dim()));
            }
            gd[k].push_back({std::move(r), std::move(l), std::move(rl)});
        }
    }
    if (!any) throw InvalidArgument("transversal suite: no samples of " + names.lambda12 + " near the base point");
    rep.constant = 1.0 / rep.inf_lambda;

    rep.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ps.shells(); ++k) {
        TransversalShell sh;
        sh.r_outer = ps.lambda.shells[k].r_outer;
        sh.r_inner = ps.lambda.shells[k].r_inner;
        sh.min_slack = std::numeric_limits<double>::infinity();
        const auto& gs = ps.gamma_at(k);
        const auto& ls = ps.lambda_at(k);
        for (std::size_t i = 0; i < gs.size(); ++i) {
            for (std::size_t j = 0; j < ls.size(); ++j) {
                const double gap = distance(gs[i].point, ls[j].point);
                if (gap < 1e-14) continue;
                double lhs = 0.0;
                double rhs = 0.0;
                const LambdaData& L = ld[k][j];
                if (condition == Condition::WhitneyB) {
                    Vector v = gs[i].point - ls[j].point;
                    for (double& c : v) c /= gap;
                    lhs = dist_vec(v, L.sk);
                    rhs = rep.constant * (dist_vec(v, L.s) + dist_vec(v, L.k));
                } else {
                    const GammaData& G = gd[k][i];
                    lhs = dist_d(G.rl, L.sk);
                    rhs = rep.constant * (dist_d(G.r, L.s) + dist_d(G.l, L.k));
                }
                const double slack = rhs - lhs;
                ++sh.pair_count;
                sh.max_lhs = std::max(sh.max_lhs, lhs);
                sh.max_rhs = std::max(sh.max_rhs, rhs);
                sh.min_slack = std::min(sh.min_slack, slack);
                if (slack < rep.min_slack) {
                    rep.min_slack = slack;
                    rep.tightest = Witness{gs[i].point, ls[j].point, slack};
                }
            }
        }
        if (sh.pair_count == 0) sh.min_slack = 0.0;
        rep.pair_count += sh.pair_count;
        rep.shells.push_back(sh);
    }
    if (rep.pair_count == 0) rep.min_slack = 0.0;
    rep.bound_satisfied = rep.pair_count > 0 && rep.min_slack >= -slack_tol;
    return rep;
}

}  // namespace stratcheck
