#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratcheck/expr.hpp"
#include "stratcheck/subspace.hpp"

namespace stratcheck {

/// Relative rank tolerance for chart Jacobians.
inline constexpr double kRankTolerance = 1e-10;

/// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo < x && x < hi; }
};

/// One connected submanifold given by a chart over an open parameter box.
/// A stratum with no parameters is a single point.
class Stratum {
public:
    Stratum(std::string name, std::vector<std::string> params, std::vector<Interval> domain,
            std::vector<Expr> chart);

    /// Parses chart coordinate expressions over `params`.
    static Stratum parse(std::string name, std::vector<std::string> params,
                         std::vector<Interval> domain, const std::vector<std::string>& chart);

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& params() const noexcept { return params_; }
    const std::vector<Interval>& domain() const noexcept { return domain_; }
    const std::vector<Expr>& chart() const noexcept { return chart_; }
    std::size_t param_dim() const noexcept { return params_.size(); }
    std::size_t ambient_dim() const noexcept { return chart_.size(); }

    bool in_domain(std::span<const double> p) const;
    /// Center of the parameter box.
    Vector center() const;

    Vector point(std::span<const double> p) const;

    /// Jacobian columns: d vectors of length n.
    std::vector<Vector> jacobian(std::span<const double> p) const;

    /// Point and Jacobian columns from one dual evaluation pass.
    std::pair<Vector, std::vector<Vector>> point_and_jacobian(std::span<const double> p) const;

    /// Column span of the Jacobian at p. Columns are scaled to unit length
    /// before orthonormalization so the rank decision is relative. Throws
    /// RankDeficiency when the rank is below param_dim().
    Subspace tangent_at(std::span<const double> p, double rank_tol = kRankTolerance) const;

private:
    std::string name_;
    std::vector<std::string> params_;
    std::vector<Interval> domain_;
    std::vector<Expr> chart_;
};

/// Declared frontier relation: gamma lies in the closure of lambda, outside lambda.
struct FrontierPair {
    std::string gamma;
    std::string lambda;
};

class Stratification {
public:
    /// Throws InvalidArgument on duplicate names, mixed ambient dimensions or
    /// frontier pairs naming unknown strata. Dimension and acyclicity
    /// requirements are reported by frontier_check rather than enforced here.
    Stratification(std::vector<Stratum> strata, std::vector<FrontierPair> frontier);

    std::size_t ambient_dim() const noexcept { return ambient_dim_; }
    const std::vector<Stratum>& strata() const noexcept { return strata_; }
    const std::vector<FrontierPair>& frontier() const noexcept { return frontier_; }

    std::optional<std::size_t> find(const std::string& name) const;
    /// Throws InvalidArgument for unknown names.
    std::size_t index_of(const std::string& name) const;
    const Stratum& at(const std::string& name) const { return strata_[index_of(name)]; }
    bool declares(const std::string& gamma, const std::string& lambda) const;

private:
    std::size_t ambient_dim_ = 0;
    std::vector<Stratum> strata_;
    std::vector<FrontierPair> frontier_;
};

/// f : A -> R^m given stratum by stratum as expressions in each stratum's
/// chart parameters.
class StratifiedMap {
public:
    StratifiedMap(Stratification base, std::size_t target_dim,
                  std::vector<std::vector<Expr>> per_stratum);

    /// Map from expressions over the ambient coordinate names, composed with
    /// each chart. `overrides` replaces the expressions on named strata.
    static StratifiedMap from_ambient(Stratification base, const std::vector<std::string>& ambient_names,
                                      const std::vector<std::string>& exprs,
                                      const std::map<std::string, std::vector<std::string>>& overrides = {});

    const Stratification& base() const noexcept { return base_; }
    std::size_t target_dim() const noexcept { return target_dim_; }
    const std::vector<Expr>& components(std::size_t stratum) const { return per_stratum_.at(stratum); }

    Vector value(std::size_t stratum, std::span<const double> p) const;

private:
    Stratification base_;
    std::size_t target_dim_;
    std::vector<std::vector<Expr>> per_stratum_;
};

/// g o f where g is given by expressions over f's target coordinates
/// (any names, one per coordinate).
StratifiedMap compose(const StratifiedMap& f, const std::vector<Expr>& g);

/// x -> (f(x), g(x)); both maps must share the base stratification layout.
StratifiedMap pair(const StratifiedMap& f, const StratifiedMap& g);

/// Graph strata {(x, f(x))} in R^{n+m}, same names, same frontier.
Stratification graph_stratification(const StratifiedMap& f);

/// Image strata f(X) with charts f o chart, same names, same frontier.
/// Throws RankDeficiency when a composed chart loses rank at a probe parameter.
Stratification image_stratification(const StratifiedMap& f, std::size_t probes = 16,
                                    std::uint64_t seed = 7);

/// Best parameter found for the point of `s` nearest to `target`. The
/// search runs a grid over the box and then a compass search; parameters
/// are kept strictly inside the box.
struct NearestResult {
    Vector param;
    double distance = 0.0;
};
NearestResult nearest_param(const Stratum& s, std::span<const double> target,
                            std::size_t grid_budget = 4096);

/// Parameter whose image is `target`, refined by Gauss-Newton. Throws
/// InvalidArgument when the residual stays above `tol`.
Vector locate(const Stratum& s, std::span<const double> target, double tol = 1e-8);

struct SampleSchedule {
    Vector base_point;
    double r0 = 0.5;
    double rho = 0.5;
    std::size_t shells = 8;
    std::size_t samples = 64;
    std::uint64_t seed = 1;
    std::size_t attempt_factor = 10000;

    /// Throws InvalidArgument unless r0 > 0, 0 < rho < 1, shells >= 2, samples >= 1.
    void validate() const;
    double outer_radius(std::size_t k) const;
    double inner_radius(std::size_t k) const { return outer_radius(k + 1); }
};

struct Sample {
    Vector param;
    Vector point;
};

struct Shell {
    double r_outer = 0.0;
    double r_inner = 0.0;
    std::vector<Sample> samples;
    std::size_t attempts = 0;
    bool empty() const noexcept { return samples.empty(); }
};

struct ShellSamples {
    std::vector<Shell> shells;
    Vector anchor_param;
    double anchor_distance = 0.0;
};

/// Rejection samples of `s` in the annuli r_{k+1} < |x - a| <= r_k.
/// Each shell draws from its own stream; proposal boxes do not depend on
/// the sample count, so larger counts extend smaller ones. Throws
/// UnreachableBasePoint when the stratum stays farther than r0 from a.
ShellSamples sample_near(const Stratum& s, const SampleSchedule& sched);

struct FrontierIssue {
    std::string kind;  // dimension | cycle | closure | overlap
    std::string gamma;
    std::string lambda;
    std::string detail;
};

struct FrontierReport {
    std::vector<FrontierIssue> issues;
    std::vector<std::string> warnings;
    bool ok() const noexcept { return issues.empty(); }
};

struct FrontierOptions {
    std::size_t samples = 16;
    double closure_tol = 1e-6;
    double overlap_tol = 1e-12;
    std::uint64_t seed = 1;
};

/// Sampled audit of the declared frontier relation.
FrontierReport frontier_check(const Stratification& x, const FrontierOptions& opts = {});

}  // namespace stratcheck
