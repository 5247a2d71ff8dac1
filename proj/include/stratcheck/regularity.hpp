#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stratcheck/grassmann.hpp"
#include "stratcheck/strata.hpp"

namespace stratcheck {

enum class Condition { WL, WBL, WhitneyB, Verdier };
enum class Verdict { Holds, Fails, Inconclusive };

std::string_view to_string(Condition c);
std::string_view to_string(Verdict v);
/// Accepts the names printed by to_string. Throws InvalidArgument otherwise.
Condition parse_condition(std::string_view name);

struct Witness {
    Vector x;  // point of gamma
    Vector y;  // point of lambda
    double value = 0.0;
};

/// Statistics of one shell: x from the gamma shell, y from the lambda shell.
struct ShellStat {
    double r_outer = 0.0;
    double r_inner = 0.0;
    std::size_t gamma_count = 0;
    std::size_t lambda_count = 0;
    std::size_t pair_count = 0;
    std::size_t skipped_pairs = 0;  // |x - y| below the degenerate gap
    double sup = 0.0;
    double inf = 0.0;
    std::optional<Witness> argmax;
    std::optional<Witness> argmin;

    bool empty() const noexcept { return pair_count == 0; }
};

/// Shell-trend thresholds shared by all verdict rules.
struct Thresholds {
    double eps_growth = 0.25;     // bounded: late max <= (1 + eps) * early max
    double fail_slope = -0.5;     // growth: log-log slope at or below this
    double growth_factor = 10.0;  // growth: final sup over initial sup
    double eps_b = 0.05;          // Whitney (B): final defect ceiling
    double eps_fail = 0.2;        // Whitney (B): persistent defect floor
    double b_slope = 0.25;        // Whitney (B): minimum shrink rate
    double zero_floor = 1e-12;    // values at or below count as exact zeros
    double wbl_floor = 1e-3;      // bi-Lipschitz: lowest admissible inf
    double wbl_slope = 0.5;       // bi-Lipschitz: collapse rate of infs
    double degenerate_gap = 1e-14;
    double skip_flag_rate = 0.1;  // flag reports skipping more pairs than this
};

struct Classification {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<double> slope;
    std::string reason;
};

/// Least-squares slope of log(value) against log(r_outer) over non-empty
/// shells with value above `floor`; nullopt with fewer than two such shells.
std::optional<double> fit_log_slope(std::span<const ShellStat> shells, bool use_inf = false, double floor = 0.0);

Classification wl_verdict(std::span<const ShellStat> shells, const Thresholds& t = {});
Classification wbl_verdict(std::span<const ShellStat> shells, const Thresholds& t = {});
Classification whitney_b_verdict(std::span<const ShellStat> shells, const Thresholds& t = {});
Classification verdier_verdict(std::span<const ShellStat> shells, const Thresholds& t = {});

struct RegularityVerdict {
    Condition condition = Condition::WL;
    std::string gamma;
    std::string lambda;
    Vector base_point;
    std::vector<ShellStat> shells;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<double> slope;
    std::optional<Witness> witness;
    std::string reason;
    std::size_t skipped_pairs = 0;
    std::size_t total_pairs = 0;
    bool high_skip_rate = false;
};

/// |f(x) - f(y)| / |x - y| per shell.
std::vector<ShellStat> wl_ratio_stats(const StratifiedMap& f, const std::string& gamma, const std::string& lambda,
                                      const SampleSchedule& sched, double degenerate_gap = 1e-14);

/// d(unit secant, T_y lambda) per shell.
std::vector<ShellStat> whitney_b_stats(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                       const SampleSchedule& sched, double degenerate_gap = 1e-14);

/// d(T_x gamma, T_y lambda) / |x - y| per shell.
std::vector<ShellStat> verdier_stats(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                     const SampleSchedule& sched, double degenerate_gap = 1e-14);

RegularityVerdict check_wl(const StratifiedMap& f, const std::string& gamma, const std::string& lambda,
                           const SampleSchedule& sched, const Thresholds& t = {});
RegularityVerdict check_wbl(const StratifiedMap& f, const std::string& gamma, const std::string& lambda,
                            const SampleSchedule& sched, const Thresholds& t = {});
RegularityVerdict check_whitney_b(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                  const SampleSchedule& sched, const Thresholds& t = {});
RegularityVerdict check_verdier(const Stratification& x, const std::string& gamma, const std::string& lambda,
                                const SampleSchedule& sched, const Thresholds& t = {});

struct SecantVertical {
    double d_val = 0.0;
    double ratio = 0.0;  // |delta f| / |delta a|; infinity for vertical secants
    double residual = 0.0;
    bool vertical = false;
};

/// For points of R^{n+m}: distance of the unit secant to {0} x R^m, the
/// difference quotient, and |d_val - 1/sqrt(1 + ratio^2)|.
/// Throws InvalidArgument when x == y.
SecantVertical secant_vertical_identity(std::span<const double> x, std::span<const double> y, std::size_t n);

struct ProjectionReport {
    Condition condition = Condition::WhitneyB;
    RegularityVerdict precondition;  // WL of f on the base pair
    RegularityVerdict graph;
    RegularityVerdict base;
    bool implication_satisfied = false;  // not (graph holds and base fails)
    std::string note;
};

/// Runs `condition` on the graph pair and on the base pair and checks
/// graph-holds implies base-holds. `condition` must be WhitneyB or Verdier.
ProjectionReport theorem_suite_projection(const StratifiedMap& f, Condition condition, const std::string& gamma,
                                          const std::string& lambda, const SampleSchedule& sched,
                                          const Thresholds& t = {});

struct TransversalNames {
    std::string lambda1, gamma1, lambda2, gamma2, lambda12, gamma12;
};

struct TransversalShell {
    double r_outer = 0.0;
    double r_inner = 0.0;
    std::size_t pair_count = 0;
    double max_lhs = 0.0;
    double max_rhs = 0.0;
    double min_slack = 0.0;
};

struct TransversalReport {
    Condition condition = Condition::WhitneyB;
    TransversalNames names;
    Vector base_point;
    double inf_lambda = 0.0;
    double constant = 0.0;  // 1 / inf_lambda
    std::size_t intersection_dim = 0;
    std::size_t pair_count = 0;
    double min_slack = 0.0;
    double max_tangent_residual = 0.0;  // D(T_y lambda12, T_y lambda1 n T_y lambda2)
    std::optional<Witness> tightest;
    std::vector<TransversalShell> shells;
    bool bound_satisfied = false;
};

/// Checks on samples of lambda12 / gamma12 that the intersection defect is
/// bounded by C times the sum of the two input defects, C = 1 / inf lambda.
/// For WhitneyB the defect is the secant-to-tangent distance, for Verdier
/// the tangent-to-tangent distance. Throws InvalidArgument when sampled
/// tangent intersections change dimension or lambda vanishes.
TransversalReport theorem_suite_transversal(const Stratification& x, const TransversalNames& names,
                                            Condition condition, const SampleSchedule& sched,
                                            double slack_tol = 1e-9);

}  // namespace stratcheck
