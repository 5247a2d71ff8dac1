#include "stratcheck/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <type_traits>

namespace stratcheck {

struct Node {
    enum class Kind { Literal, Variable, Neg, Add, Sub, Mul, Div, Pow, Call, If };
    enum class Func { Sqrt, Sin, Cos, Exp, Log, Abs, Min, Max };
    enum class Rel { Lt, Le, Gt, Ge };

    Kind kind = Kind::Literal;
    double value = 0.0;
    std::size_t var = 0;
    Func func = Func::Sqrt;
    Rel rel = Rel::Lt;
    std::vector<std::shared_ptr<const Node>> kids;  // If: lhs, rhs, then, else
    std::size_t offset = 0;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct FuncInfo {
    std::string_view name;
    Node::Func func;
    std::size_t arity;
};

constexpr FuncInfo kFunctions[] = {
    {"sqrt", Node::Func::Sqrt, 1}, {"sin", Node::Func::Sin, 1}, {"cos", Node::Func::Cos, 1},
    {"exp", Node::Func::Exp, 1},   {"log", Node::Func::Log, 1}, {"abs", Node::Func::Abs, 1},
    {"min", Node::Func::Min, 2},   {"max", Node::Func::Max, 2},
};

std::string_view func_name(Node::Func f) {
    for (const auto& info : kFunctions) {
        if (info.func == f) return info.name;
    }
    return "?";
}

std::string_view rel_text(Node::Rel r) {
    switch (r) {
        case Node::Rel::Lt: return "<";
        case Node::Rel::Le: return "<=";
        case Node::Rel::Gt: return ">";
        case Node::Rel::Ge: return ">=";
    }
    return "?";
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void print_node(const Node& n, const std::vector<std::string>& vars, std::string& out) {
    auto binary = [&](const char* op) {
        out += '(';
        print_node(*n.kids[0], vars, out);
        out += op;
        print_node(*n.kids[1], vars, out);
        out += ')';
    };
    switch (n.kind) {
        case Node::Kind::Literal: out += format_number(n.value); break;
        case Node::Kind::Variable: out += vars.at(n.var); break;
        case Node::Kind::Neg:
            out += "(-";
            print_node(*n.kids[0], vars, out);
            out += ')';
            break;
        case Node::Kind::Add: binary(" + "); break;
        case Node::Kind::Sub: binary(" - "); break;
        case Node::Kind::Mul: binary(" * "); break;
        case Node::Kind::Div: binary(" / "); break;
        case Node::Kind::Pow: binary(" ^ "); break;
        case Node::Kind::Call:
            out += func_name(n.func);
            out += '(';
            for (std::size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.kids[i], vars, out);
            }
            out += ')';
            break;
        case Node::Kind::If:
            out += "if(";
            print_node(*n.kids[0], vars, out);
            out += ' ';
            out += rel_text(n.rel);
            out += ' ';
            print_node(*n.kids[1], vars, out);
            out += ", ";
            print_node(*n.kids[2], vars, out);
            out += ", ";
            print_node(*n.kids[3], vars, out);
            out += ')';
            break;
    }
}

std::string node_text(const Node& n, const std::vector<std::string>& vars) {
    std::string s;
    print_node(n, vars, s);
    return s;
}

// ---------------------------------------------------------------------------
// Parser

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Rel, End };

struct Token {
    Tok kind = Tok::End;
    std::size_t offset = 0;
    std::string_view text;
    double number = 0.0;
    Node::Rel rel = Node::Rel::Lt;
};

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {
        advance();
    }

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        if (tok_.kind != Tok::End) fail("unexpected input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.offset); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t offset) const {
        throw ParseError(msg, offset);
    }

    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    void advance() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r')) {
            ++pos_;
        }
        tok_ = Token{};
        tok_.offset = pos_;
        if (pos_ >= src_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        const char c = src_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
            lex_number();
            return;
        }
        if (is_ident_start(c)) {
            std::size_t end = pos_;
            while (end < src_.size() && is_ident_char(src_[end])) ++end;
            tok_.kind = Tok::Ident;
            tok_.text = src_.substr(pos_, end - pos_);
            pos_ = end;
            return;
        }
        // UTF-8 forms of <= (E2 89 A4) and >= (E2 89 A5).
        if (static_cast<unsigned char>(c) == 0xE2 && pos_ + 2 < src_.size() &&
            static_cast<unsigned char>(src_[pos_ + 1]) == 0x89) {
            const auto third = static_cast<unsigned char>(src_[pos_ + 2]);
            if (third == 0xA4 || third == 0xA5) {
                tok_.kind = Tok::Rel;
                tok_.rel = third == 0xA4 ? Node::Rel::Le : Node::Rel::Ge;
                pos_ += 3;
                return;
            }
        }
        ++pos_;
        switch (c) {
            case '+': tok_.kind = Tok::Plus; return;
            case '-': tok_.kind = Tok::Minus; return;
            case '*': tok_.kind = Tok::Star; return;
            case '/': tok_.kind = Tok::Slash; return;
            case '^': tok_.kind = Tok::Caret; return;
            case '(': tok_.kind = Tok::LParen; return;
            case ')': tok_.kind = Tok::RParen; return;
            case ',': tok_.kind = Tok::Comma; return;
            case '<':
            case '>': {
                const bool eq = pos_ < src_.size() && src_[pos_] == '=';
                if (eq) ++pos_;
                tok_.kind = Tok::Rel;
                tok_.rel = c == '<' ? (eq ? Node::Rel::Le : Node::Rel::Lt)
                                    : (eq ? Node::Rel::Ge : Node::Rel::Gt);
                return;
            }
            default: break;
        }
        fail_at(std::string("unexpected character '") + c + "'", tok_.offset);
    }

    void lex_number() {
        std::size_t end = pos_;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && is_digit(src_[end])) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
            if (exp < src_.size() && is_digit(src_[exp])) {
                while (exp < src_.size() && is_digit(src_[exp])) ++exp;
                end = exp;
            }
        }
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + end;
        double value = 0.0;
        auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
            fail_at("malformed number", pos_);
        }
        tok_.kind = Tok::Number;
        tok_.number = value;
        tok_.text = src_.substr(pos_, end - pos_);
        pos_ = end;
    }

    void expect(Tok kind, const char* what) {
        if (tok_.kind != kind) fail(std::string("expected ") + what);
        advance();
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            Node n;
            n.kind = tok_.kind == Tok::Plus ? Node::Kind::Add : Node::Kind::Sub;
            n.offset = tok_.offset;
            advance();
            n.kids = {lhs, parse_term()};
            lhs = make_node(std::move(n));
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            Node n;
            n.kind = tok_.kind == Tok::Star ? Node::Kind::Mul : Node::Kind::Div;
            n.offset = tok_.offset;
            advance();
            n.kids = {lhs, parse_unary()};
            lhs = make_node(std::move(n));
        }
        return lhs;
    }

    NodePtr parse_unary() {
        if (tok_.kind == Tok::Minus) {
            Node n;
            n.kind = Node::Kind::Neg;
            n.offset = tok_.offset;
            advance();
            n.kids = {parse_unary()};
            return make_node(std::move(n));
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (tok_.kind == Tok::Caret) {
            Node n;
            n.kind = Node::Kind::Pow;
            n.offset = tok_.offset;
            advance();
            n.kids = {base, parse_unary()};
            return make_node(std::move(n));
        }
        return base;
    }

    NodePtr parse_primary() {
        const std::size_t start = tok_.offset;
        switch (tok_.kind) {
            case Tok::Number: {
                Node n;
                n.kind = Node::Kind::Literal;
                n.value = tok_.number;
                n.offset = start;
                advance();
                return make_node(std::move(n));
            }
            case Tok::LParen: {
                advance();
                NodePtr inner = parse_expr();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident: return parse_identifier();
            case Tok::End: fail("unexpected end of expression");
            default: fail("expected a number, variable, function call or '('");
        }
    }

    NodePtr parse_identifier() {
        const std::string_view name = tok_.text;
        const std::size_t start = tok_.offset;
        advance();
        if (tok_.kind != Tok::LParen) {
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) fail_at("unknown identifier '" + std::string(name) + "'", start);
            Node n;
            n.kind = Node::Kind::Variable;
            n.var = static_cast<std::size_t>(it - vars_.begin());
            n.offset = start;
            return make_node(std::move(n));
        }
        if (name == "if") return parse_if(start);

        const FuncInfo* info = nullptr;
        for (const auto& f : kFunctions) {
            if (f.name == name) info = &f;
        }
        if (std::find(vars_.begin(), vars_.end(), name) != vars_.end() && info == nullptr) {
            fail_at("variable '" + std::string(name) + "' is not callable", start);
        }
        if (info == nullptr) fail_at("unknown function '" + std::string(name) + "'", start);
        advance();  // '('
        Node n;
        n.kind = Node::Kind::Call;
        n.func = info->func;
        n.offset = start;
        if (tok_.kind != Tok::RParen) {
            n.kids.push_back(parse_expr());
            while (tok_.kind == Tok::Comma) {
                advance();
                n.kids.push_back(parse_expr());
            }
        }
        expect(Tok::RParen, "')'");
        if (n.kids.size() != info->arity) {
            fail_at(std::string(info->name) + " expects " + std::to_string(info->arity) +
                        " argument(s), got " + std::to_string(n.kids.size()),
                    start);
        }
        return make_node(std::move(n));
    }

    NodePtr parse_if(std::size_t start) {
        advance();  // '('
        Node n;
        n.kind = Node::Kind::If;
        n.offset = start;
        NodePtr lhs = parse_expr();
        if (tok_.kind != Tok::Rel) fail("if: expected a comparison (<, <=, >, >=)");
        n.rel = tok_.rel;
        advance();
        NodePtr rhs = parse_expr();
        if (tok_.kind != Tok::Comma) fail("if expects 3 arguments: if(a REL b, then, else)");
        advance();
        NodePtr then_branch = parse_expr();
        if (tok_.kind != Tok::Comma) fail("if expects 3 arguments: if(a REL b, then, else)");
        advance();
        NodePtr else_branch = parse_expr();
        if (tok_.kind == Tok::Comma) fail("if expects 3 arguments: if(a REL b, then, else)");
        expect(Tok::RParen, "')'");
        n.kids = {lhs, rhs, then_branch, else_branch};
        return make_node(std::move(n));
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
    Token tok_;
};

// ---------------------------------------------------------------------------
// Evaluation. The value path is shared by double and Dual so that the value
// of eval_dual is bit-identical to eval.

double value_of(double x) { return x; }
double value_of(const Dual& x) { return x.value; }

double ipow(double a, long long n) {
    if (n < 0) return 1.0 / ipow(a, -n);
    double result = 1.0;
    double base = a;
    while (n > 0) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

bool is_small_integer(double b) { return std::abs(b) <= 1024.0 && b == std::nearbyint(b); }

template <class T>
class Evaluator {
public:
    Evaluator(std::span<const T> point, const std::vector<std::string>& vars, double switch_tol,
              std::size_t nvars)
        : point_(point), vars_(vars), switch_tol_(switch_tol), nvars_(nvars) {}

    T run(const Node& n) {
        T r = eval(n);
        check_finite(n, r);
        return r;
    }

    bool near_switch = false;
    double margin = std::numeric_limits<double>::infinity();

private:
    static constexpr bool kDual = std::is_same_v<T, Dual>;

    [[noreturn]] void fail(const Node& n, const std::string& msg) const {
        throw EvalError(msg, node_text(n, vars_), n.offset);
    }

    void check_finite(const Node& n, const T& r) const {
        if (!std::isfinite(value_of(r))) fail(n, "non-finite result");
        if constexpr (kDual) {
            for (double p : r.partials) {
                if (!std::isfinite(p)) fail(n, "derivative is not finite");
            }
        }
    }

    void note_switch(double diff) {
        const double m = std::abs(diff);
        margin = std::min(margin, m);
        if (m <= switch_tol_) near_switch = true;
    }

    T constant(double v) const {
        if constexpr (kDual) {
            return Dual::constant(v, nvars_);
        } else {
            return v;
        }
    }

    static bool has_partials(const T& x) {
        if constexpr (kDual) {
            return std::any_of(x.partials.begin(), x.partials.end(), [](double p) { return p != 0.0; });
        } else {
            return false;
        }
    }

    // Builds a Dual from a value and a scaled copy of one or two partial vectors.
    static Dual unary(double value, const Dual& a, double da) {
        Dual r{value, a.partials};
        for (double& p : r.partials) p *= da;
        return r;
    }
    static Dual binary(double value, const Dual& a, double da, const Dual& b, double db) {
        Dual r{value, std::vector<double>(a.partials.size())};
        for (std::size_t i = 0; i < r.partials.size(); ++i) {
            r.partials[i] = da * a.partials[i] + db * b.partials[i];
        }
        return r;
    }

    T eval(const Node& n) {
        switch (n.kind) {
            case Node::Kind::Literal: return constant(n.value);
            case Node::Kind::Variable: return point_[n.var];
            case Node::Kind::Neg: {
                T a = eval(*n.kids[0]);
                if constexpr (kDual) {
                    return unary(-a.value, a, -1.0);
                } else {
                    return -a;
                }
            }
            case Node::Kind::Add:
            case Node::Kind::Sub:
            case Node::Kind::Mul:
            case Node::Kind::Div: return arith(n);
            case Node::Kind::Pow: return power(n);
            case Node::Kind::Call: return call(n);
            case Node::Kind::If: return branch(n);
        }
        fail(n, "unknown node");
    }

    T arith(const Node& n) {
        T a = eval(*n.kids[0]);
        T b = eval(*n.kids[1]);
        const double av = value_of(a);
        const double bv = value_of(b);
        T r;
        switch (n.kind) {
            case Node::Kind::Add:
                if constexpr (kDual) r = binary(av + bv, a, 1.0, b, 1.0); else r = av + bv;
                break;
            case Node::Kind::Sub:
                if constexpr (kDual) r = binary(av - bv, a, 1.0, b, -1.0); else r = av - bv;
                break;
            case Node::Kind::Mul:
                if constexpr (kDual) r = binary(av * bv, a, bv, b, av); else r = av * bv;
                break;
            default: {
                if (bv == 0.0) fail(n, "division by zero");
                const double q = av / bv;
                if constexpr (kDual) r = binary(q, a, 1.0 / bv, b, -q / bv); else r = q;
                break;
            }
        }
        check_finite(n, r);
        return r;
    }

    T power(const Node& n) {
        T a = eval(*n.kids[0]);
        T b = eval(*n.kids[1]);
        const double av = value_of(a);
        const double bv = value_of(b);
        T r;
        if (is_small_integer(bv)) {
            const auto k = static_cast<long long>(bv);
            if (k < 0 && av == 0.0) fail(n, "division by zero (zero to a negative power)");
            const double v = ipow(av, k);
            if constexpr (kDual) {
                const double da = (k == 0) ? 0.0 : static_cast<double>(k) * ipow(av, k - 1);
                double db = 0.0;
                if (has_partials(b)) {
                    if (av <= 0.0) fail(n, "exponent derivative needs a positive base");
                    db = v * std::log(av);
                }
                r = binary(v, a, da, b, db);
            } else {
                r = v;
            }
        } else {
            if (!(av > 0.0)) fail(n, "non-integer power of a non-positive base");
            const double v = std::pow(av, bv);
            if constexpr (kDual) {
                r = binary(v, a, bv * v / av, b, v * std::log(av));
            } else {
                r = v;
            }
        }
        check_finite(n, r);
        return r;
    }

    T call(const Node& n) {
        if (n.func == Node::Func::Min || n.func == Node::Func::Max) {
            T a = eval(*n.kids[0]);
            T b = eval(*n.kids[1]);
            note_switch(value_of(a) - value_of(b));
            const bool take_a = n.func == Node::Func::Min ? value_of(a) <= value_of(b)
                                                          : value_of(a) >= value_of(b);
            return take_a ? a : b;
        }
        T a = eval(*n.kids[0]);
        const double av = value_of(a);
        T r;
        switch (n.func) {
            case Node::Func::Sqrt: {
                if (av < 0.0) fail(n, "sqrt of a negative number");
                const double v = std::sqrt(av);
                if constexpr (kDual) {
                    if (v == 0.0) {
                        if (has_partials(a)) fail(n, "sqrt is not differentiable at 0");
                        r = constant(0.0);
                    } else {
                        r = unary(v, a, 0.5 / v);
                    }
                } else {
                    r = v;
                }
                break;
            }
            case Node::Func::Sin:
                if constexpr (kDual) r = unary(std::sin(av), a, std::cos(av)); else r = std::sin(av);
                break;
            case Node::Func::Cos:
                if constexpr (kDual) r = unary(std::cos(av), a, -std::sin(av)); else r = std::cos(av);
                break;
            case Node::Func::Exp: {
                const double v = std::exp(av);
                if constexpr (kDual) r = unary(v, a, v); else r = v;
                break;
            }
            case Node::Func::Log:
                if (!(av > 0.0)) fail(n, "log of a non-positive number");
                if constexpr (kDual) r = unary(std::log(av), a, 1.0 / av); else r = std::log(av);
                break;
            case Node::Func::Abs:
                note_switch(av);
                if constexpr (kDual) {
                    r = av < 0.0 ? unary(-av, a, -1.0) : a;
                } else {
                    r = std::abs(av);
                }
                break;
            default: fail(n, "unknown function");
        }
        check_finite(n, r);
        return r;
    }

    T branch(const Node& n) {
        const double lhs = value_of(eval(*n.kids[0]));
        const double rhs = value_of(eval(*n.kids[1]));
        note_switch(lhs - rhs);
        bool taken = false;
        switch (n.rel) {
            case Node::Rel::Lt: taken = lhs < rhs; break;
            case Node::Rel::Le: taken = lhs <= rhs; break;
            case Node::Rel::Gt: taken = lhs > rhs; break;
            case Node::Rel::Ge: taken = lhs >= rhs; break;
        }
        return eval(*n.kids[taken ? 2 : 3]);
    }

    std::span<const T> point_;
    const std::vector<std::string>& vars_;
    double switch_tol_;
    std::size_t nvars_;
};

bool nodes_equal(const Node& a, const std::vector<std::string>& va, const Node& b,
                 const std::vector<std::string>& vb) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    switch (a.kind) {
        case Node::Kind::Literal:
            if (!(a.value == b.value)) return false;
            break;
        case Node::Kind::Variable:
            if (va.at(a.var) != vb.at(b.var)) return false;
            break;
        case Node::Kind::Call:
            if (a.func != b.func) return false;
            break;
        case Node::Kind::If:
            if (a.rel != b.rel) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i) {
        if (!nodes_equal(*a.kids[i], va, *b.kids[i], vb)) return false;
    }
    return true;
}

NodePtr rebuild(const NodePtr& n, const std::vector<std::string>& old_vars,
                const std::vector<std::string>& new_vars, const std::map<std::string, NodePtr>& bindings) {
    if (n->kind == Node::Kind::Variable) {
        const std::string& name = old_vars.at(n->var);
        if (auto it = bindings.find(name); it != bindings.end()) return it->second;
        auto pos = std::find(new_vars.begin(), new_vars.end(), name);
        if (pos == new_vars.end()) {
            throw InvalidArgument("substitute: variable '" + name + "' is neither bound nor kept");
        }
        Node copy = *n;
        copy.var = static_cast<std::size_t>(pos - new_vars.begin());
        return make_node(std::move(copy));
    }
    if (n->kids.empty()) return n;
    Node copy = *n;
    for (auto& kid : copy.kids) kid = rebuild(kid, old_vars, new_vars, bindings);
    return make_node(std::move(copy));
}

const std::vector<std::string>& empty_vars() {
    static const std::vector<std::string> none;
    return none;
}

}  // namespace

const std::vector<std::string>& Expr::variables() const { return vars_ ? *vars_ : empty_vars(); }

double Expr::eval(std::span<const double> point) const {
    if (!root_) throw InvalidArgument("eval: empty expression");
    if (point.size() != arity()) {
        throw DimensionMismatch("eval: expected " + std::to_string(arity()) + " values, got " +
                                std::to_string(point.size()));
    }
    Evaluator<double> ev(point, *vars_, kSwitchTolerance, arity());
    return ev.run(*root_);
}

DualResult Expr::eval_dual(std::span<const double> point, double switch_tol) const {
    if (point.size() != arity()) {
        throw DimensionMismatch("eval_dual: expected " + std::to_string(arity()) + " values, got " +
                                std::to_string(point.size()));
    }
    std::vector<Dual> seeded;
    seeded.reserve(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        seeded.push_back(Dual::variable(point[i], i, point.size()));
    }
    return eval_dual(std::span<const Dual>(seeded), switch_tol);
}

DualResult Expr::eval_dual(std::span<const Dual> point, double switch_tol) const {
    if (!root_) throw InvalidArgument("eval_dual: empty expression");
    if (point.size() != arity()) {
        throw DimensionMismatch("eval_dual: expected " + std::to_string(arity()) + " values, got " +
                                std::to_string(point.size()));
    }
    const std::size_t nparts = point.empty() ? 0 : point.front().partials.size();
    for (const auto& d : point) {
        if (d.partials.size() != nparts) throw DimensionMismatch("eval_dual: ragged dual inputs");
    }
    Evaluator<Dual> ev(point, *vars_, switch_tol, nparts);
    DualResult out;
    out.dual = ev.run(*root_);
    out.near_switch = ev.near_switch;
    out.switch_margin = ev.margin;
    return out;
}

std::string Expr::to_string() const {
    if (!root_) return {};
    return node_text(*root_, *vars_);
}

Expr parse(std::string_view source, const std::vector<std::string>& vars) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
            if (vars[i] == vars[j]) throw InvalidArgument("parse: duplicate variable '" + vars[i] + "'");
        }
        for (const auto& f : kFunctions) {
            if (f.name == vars[i]) throw InvalidArgument("parse: variable name '" + vars[i] + "' is reserved");
        }
        if (vars[i] == "if") throw InvalidArgument("parse: variable name 'if' is reserved");
    }
    Parser p(source, vars);
    NodePtr root = p.parse_all();
    return Expr(std::move(root), std::make_shared<const std::vector<std::string>>(vars));
}

Expr constant_expr(double value, const std::vector<std::string>& vars) {
    if (!std::isfinite(value)) throw InvalidArgument("constant_expr: non-finite value");
    Node lit;
    lit.kind = Node::Kind::Literal;
    lit.value = std::abs(value);
    NodePtr root = make_node(std::move(lit));
    if (std::signbit(value) && value != 0.0) {
        Node neg;
        neg.kind = Node::Kind::Neg;
        neg.kids = {root};
        root = make_node(std::move(neg));
    }
    return Expr(std::move(root), std::make_shared<const std::vector<std::string>>(vars));
}

Expr substitute(const Expr& e, const std::vector<std::string>& new_vars,
                const std::map<std::string, Expr>& bindings) {
    if (e.empty()) throw InvalidArgument("substitute: empty expression");
    std::map<std::string, NodePtr> roots;
    for (const auto& [name, bound] : bindings) {
        if (bound.empty() || bound.variables() != new_vars) {
            throw InvalidArgument("substitute: binding for '" + name + "' is not over the new variables");
        }
        roots.emplace(name, bound.root_);
    }
    NodePtr root = rebuild(e.root_, e.variables(), new_vars, roots);
    return Expr(std::move(root), std::make_shared<const std::vector<std::string>>(new_vars));
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.empty() || b.empty()) return a.empty() && b.empty();
    return nodes_equal(*a.root(), a.variables(), *b.root(), b.variables());
}

}  // namespace stratcheck
