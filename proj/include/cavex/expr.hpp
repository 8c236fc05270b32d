#pragma once

// Curve expressions in one variable x and their forward-mode derivatives.
//
// Grammar (whitespace insensitive, no implicit multiplication):
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := unary ('^' factor)?          right associative
//   unary  := '-'? atom
//   atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | exp | log | sqrt
//
// Unary minus binds to the atom only, so "-x^2" is (-x)^2; write "-(x^2)"
// or "0 - x^2" for the other reading. Exponents must be free of x.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace cavex {

/// Value and first derivative carried together through evaluation.
struct Dual {
    double value = 0;
    double deriv = 0;
};

inline Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.deriv + b.deriv}; }
inline Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.deriv - b.deriv}; }
inline Dual operator-(Dual a) { return {-a.value, -a.deriv}; }
inline Dual operator*(Dual a, Dual b) { return {a.value * b.value, a.deriv * b.value + a.value * b.deriv}; }
inline Dual operator/(Dual a, Dual b) {
    return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
}

enum class NodeKind { constant, variable, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, exp, log, sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind = NodeKind::constant;
    double value = 0; ///< literal for constants, folded exponent for pow
    Func func = Func::sin;
    NodePtr lhs;      ///< operand of neg and call, left of binary
    NodePtr rhs;
    std::size_t offset = 0;
};

inline std::string_view func_name(Func f) {
    switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    }
    return "?";
}

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline int precedence(NodeKind k) {
    switch (k) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::pow: return 3;
    case NodeKind::neg: return 4;
    default: return 5;
    }
}

inline std::string print(const Node& n) {
    auto wrap = [](const Node& child, int min_prec) {
        std::string s = print(child);
        return precedence(child.kind) < min_prec ? "(" + s + ")" : s;
    };
    switch (n.kind) {
    case NodeKind::constant: return format_number(n.value);
    case NodeKind::variable: return "x";
    case NodeKind::neg: return "-" + wrap(*n.lhs, 5);
    case NodeKind::call: return std::string(func_name(n.func)) + "(" + print(*n.lhs) + ")";
    case NodeKind::pow: return wrap(*n.lhs, 4) + "^" + wrap(*n.rhs, 3);
    case NodeKind::add: return wrap(*n.lhs, 1) + " + " + wrap(*n.rhs, 2);
    case NodeKind::sub: return wrap(*n.lhs, 1) + " - " + wrap(*n.rhs, 2);
    case NodeKind::mul: return wrap(*n.lhs, 2) + " * " + wrap(*n.rhs, 3);
    case NodeKind::div: return wrap(*n.lhs, 2) + " / " + wrap(*n.rhs, 3);
    }
    return "?";
}

inline bool same_tree(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case NodeKind::constant: return a->value == b->value;
    case NodeKind::variable: return true;
    case NodeKind::call: return a->func == b->func && same_tree(a->lhs.get(), b->lhs.get());
    default: return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
    }
}

inline bool depends_on_x(const Node& n) {
    if (n.kind == NodeKind::variable) return true;
    return (n.lhs && depends_on_x(*n.lhs)) || (n.rhs && depends_on_x(*n.rhs));
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= src_.size()) fail({"expression"});
        NodePtr root = expr();
        skip_ws();
        if (pos_ < src_.size()) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
        return root;
    }

private:
    NodePtr expr() {
        NodePtr lhs = term();
        while (true) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = binary(NodeKind::add, lhs, term(), at);
            } else if (accept('-')) {
                lhs = binary(NodeKind::sub, lhs, term(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (true) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = binary(NodeKind::mul, lhs, factor(), at);
            } else if (accept('/')) {
                lhs = binary(NodeKind::div, lhs, factor(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        NodePtr base = unary();
        skip_ws();
        const std::size_t at = pos_;
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t exponent_at = pos_;
        NodePtr exponent = factor();
        if (depends_on_x(*exponent)) {
            pos_ = exponent_at;
            fail({"constant exponent"});
        }
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::pow;
        n->lhs = std::move(base);
        n->rhs = std::move(exponent);
        n->value = fold(*n->rhs);
        n->offset = at;
        if (!std::isfinite(n->value)) {
            pos_ = exponent_at;
            fail({"finite exponent"});
        }
        return n;
    }

    NodePtr unary() {
        skip_ws();
        const std::size_t at = pos_;
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::neg;
            n->lhs = atom();
            n->offset = at;
            return n;
        }
        return atom();
    }

    NodePtr atom() {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ >= src_.size()) fail(atom_expected());
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            expect(')');
            return inner;
        }
        if (is_digit(c) || c == '.') return number();
        if (is_alpha(c)) {
            std::size_t end = pos_;
            while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]))) ++end;
            const std::string_view word = src_.substr(pos_, end - pos_);
            if (word == "x") {
                pos_ = end;
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::variable;
                n->offset = at;
                return n;
            }
            for (Func f : {Func::sin, Func::cos, Func::exp, Func::log, Func::sqrt}) {
                if (word == func_name(f)) {
                    pos_ = end;
                    skip_ws();
                    expect('(');
                    auto n = std::make_shared<Node>();
                    n->kind = NodeKind::call;
                    n->func = f;
                    n->lhs = expr();
                    n->offset = at;
                    expect(')');
                    return n;
                }
            }
        }
        fail(atom_expected());
    }

    NodePtr number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        bool digits = false;
        while (end < src_.size() && is_digit(src_[end])) ++end, digits = true;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && is_digit(src_[end])) ++end, digits = true;
        }
        if (!digits) fail({"number"});
        // exponent only when digits follow, so "2e" leaves the 'e' alone
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && is_digit(src_[e])) {
                while (e < src_.size() && is_digit(src_[e])) ++e;
                end = e;
            }
        }
        double v = 0;
        const auto res = std::from_chars(src_.data() + at, src_.data() + end, v);
        if (res.ec != std::errc() || !std::isfinite(v)) fail({"finite number"});
        pos_ = end;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::constant;
        n->value = v;
        n->offset = at;
        return n;
    }

    static double fold(const Node& n) {
        switch (n.kind) {
        case NodeKind::constant: return n.value;
        case NodeKind::neg: return -fold(*n.lhs);
        case NodeKind::add: return fold(*n.lhs) + fold(*n.rhs);
        case NodeKind::sub: return fold(*n.lhs) - fold(*n.rhs);
        case NodeKind::mul: return fold(*n.lhs) * fold(*n.rhs);
        case NodeKind::div: return fold(*n.lhs) / fold(*n.rhs);
        case NodeKind::pow: return std::pow(fold(*n.lhs), n.value);
        case NodeKind::call: {
            const double a = fold(*n.lhs);
            switch (n.func) {
            case Func::sin: return std::sin(a);
            case Func::cos: return std::cos(a);
            case Func::exp: return std::exp(a);
            case Func::log: return std::log(a);
            case Func::sqrt: return std::sqrt(a);
            }
            break;
        }
        case NodeKind::variable: break;
        }
        return std::nan("");
    }

    static NodePtr binary(NodeKind k, NodePtr lhs, NodePtr rhs, std::size_t at) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        n->offset = at;
        return n;
    }

    static std::vector<std::string> atom_expected() {
        return {"number", "'x'", "function name", "'('"};
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (!accept(c)) fail({std::string("'") + c + "'"});
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = "end of input";
        if (pos_ < src_.size()) found = std::string("'") + src_[pos_] + "'";
        throw ParseError(pos_, std::move(expected), found);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

inline Dual apply(Func f, Dual a, const Node& n) {
    switch (f) {
    case Func::sin: return {std::sin(a.value), std::cos(a.value) * a.deriv};
    case Func::cos: return {std::cos(a.value), -std::sin(a.value) * a.deriv};
    case Func::exp: {
        const double e = std::exp(a.value);
        return {e, e * a.deriv};
    }
    case Func::log:
        if (!(a.value > 0)) throw DomainError("log of non-positive value in '" + print(n) + "'");
        return {std::log(a.value), a.deriv / a.value};
    case Func::sqrt: {
        if (a.value < 0) throw DomainError("sqrt of negative value in '" + print(n) + "'");
        const double r = std::sqrt(a.value);
        if (r == 0) {
            if (a.deriv != 0) throw DomainError("unbounded derivative of '" + print(n) + "'");
            return {0, 0};
        }
        return {r, a.deriv / (2 * r)};
    }
    }
    return {};
}

inline Dual power(Dual base, double p, const Node& n) {
    if (p == 0) return {1, 0};
    if (p == 1) return base;
    const bool integral = std::floor(p) == p;
    if (!integral && base.value < 0) throw DomainError("non-integer power of negative value in '" + print(n) + "'");
    const double v = std::pow(base.value, p);
    const double d = p * std::pow(base.value, p - 1) * base.deriv;
    if (base.value == 0 && p < 1) throw DomainError("unbounded derivative of '" + print(n) + "'");
    return {v, d};
}

inline Dual eval(const Node& n, double x) {
    Dual r;
    switch (n.kind) {
    case NodeKind::constant: r = {n.value, 0}; break;
    case NodeKind::variable: r = {x, 1}; break;
    case NodeKind::neg: r = -eval(*n.lhs, x); break;
    case NodeKind::add: r = eval(*n.lhs, x) + eval(*n.rhs, x); break;
    case NodeKind::sub: r = eval(*n.lhs, x) - eval(*n.rhs, x); break;
    case NodeKind::mul: r = eval(*n.lhs, x) * eval(*n.rhs, x); break;
    case NodeKind::div: {
        const Dual den = eval(*n.rhs, x);
        if (den.value == 0) throw DomainError("division by zero in '" + print(n) + "'");
        r = eval(*n.lhs, x) / den;
        break;
    }
    case NodeKind::pow: r = power(eval(*n.lhs, x), n.value, n); break;
    case NodeKind::call: r = apply(n.func, eval(*n.lhs, x), n); break;
    }
    if (!std::isfinite(r.value) || !std::isfinite(r.deriv)) {
        throw DomainError("non-finite value of '" + print(n) + "' at x=" + format_number(x));
    }
    return r;
}

} // namespace detail

/// An immutable parsed expression.
class Expr {
public:
    static Expr parse(std::string_view src) {
        Expr e;
        e.root_ = detail::Parser(src).parse();
        return e;
    }

    /// f(x) and f'(x); throws DomainError naming the offending subexpression.
    Dual eval_dual(double x) const { return detail::eval(*root_, x); }
    double operator()(double x) const { return eval_dual(x).value; }

    std::string to_string() const { return detail::print(*root_); }
    const Node& root() const { return *root_; }

    friend bool operator==(const Expr& a, const Expr& b) { return detail::same_tree(a.root_.get(), b.root_.get()); }

private:
    NodePtr root_;
};

} // namespace cavex
