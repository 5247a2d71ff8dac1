#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratcheck/error.hpp"

namespace stratcheck {

/// Default half-width of the band around a conditional's switching surface
/// inside which eval_dual flags its result.
inline constexpr double kSwitchTolerance = 1e-9;

/// Forward-mode dual number: a value and its partial derivatives with respect
/// to each declared variable.
struct Dual {
    double value = 0.0;
    std::vector<double> partials;

    static Dual constant(double v, std::size_t nvars) { return {v, std::vector<double>(nvars, 0.0)}; }
    static Dual variable(double v, std::size_t index, std::size_t nvars) {
        Dual d = constant(v, nvars);
        d.partials.at(index) = 1.0;
        return d;
    }
};

struct Node;

/// Outcome of eval_dual. `near_switch` is set when some evaluated conditional
/// (if/min/max/abs) had its two compared quantities within the switching
/// tolerance, so the returned derivative is the taken branch's derivative
/// next to a seam.
struct DualResult {
    Dual dual;
    bool near_switch = false;
    double switch_margin = 0.0;  // smallest |lhs - rhs| over evaluated comparisons
};

/// Immutable parsed expression over a fixed, ordered list of variable names.
///
/// Grammar (lowest to highest precedence):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?            right-associative
///   primary := number | name | name '(' args ')' | '(' expr ')'
///   if(lhs REL rhs, then, else)   REL in < <= > >= (also the unicode forms)
/// Functions: sqrt sin cos exp log abs (1 argument), min max (2), if (3).
class Expr {
public:
    Expr() = default;

    std::size_t arity() const noexcept { return vars_ ? vars_->size() : 0; }
    const std::vector<std::string>& variables() const;
    bool empty() const noexcept { return root_ == nullptr; }

    /// IEEE double evaluation; throws EvalError on domain errors.
    double eval(std::span<const double> point) const;

    /// Value and exact first partials with respect to every variable.
    DualResult eval_dual(std::span<const double> point, double switch_tol = kSwitchTolerance) const;

    /// Evaluation on dual inputs (chain rule through an outer parametrization).
    DualResult eval_dual(std::span<const Dual> point, double switch_tol = kSwitchTolerance) const;

    /// Fully parenthesized source that parses back to a structurally equal tree.
    std::string to_string() const;

    const Node* root() const noexcept { return root_.get(); }

private:
    Expr(std::shared_ptr<const Node> root, std::shared_ptr<const std::vector<std::string>> vars)
        : root_(std::move(root)), vars_(std::move(vars)) {}

    std::shared_ptr<const Node> root_;
    std::shared_ptr<const std::vector<std::string>> vars_;

    friend Expr parse(std::string_view, const std::vector<std::string>&);
    friend Expr substitute(const Expr&, const std::vector<std::string>&,
                           const std::map<std::string, Expr>&);
    friend Expr constant_expr(double, const std::vector<std::string>&);
};

/// Parses `source` over `vars`. Throws ParseError with a byte offset on
/// syntax errors, unknown identifiers and arity mismatches.
Expr parse(std::string_view source, const std::vector<std::string>& vars);

/// Literal expression over `vars`. Negative values are stored as negation of
/// a literal so that printing round-trips.
Expr constant_expr(double value, const std::vector<std::string>& vars);

/// Rewrites `e` into an expression over `new_vars`: each variable named in
/// `bindings` is replaced by the bound expression (which must be over
/// `new_vars`); every other variable must also appear in `new_vars`.
Expr substitute(const Expr& e, const std::vector<std::string>& new_vars,
                const std::map<std::string, Expr>& bindings);

/// Same tree shape, same literals, same variable names.
bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace stratcheck
