#pragma once

// Small closed-form expression language for radial profiles and flow fields.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// Names are either the declared variable, the constants `pi` and `e`, or one
// of the functions sinh cosh tanh exp log sqrt abs sign sin cos.
// Expressions differentiate symbolically, which lets closed-form metrics
// carry exact derivatives alongside their samples.

#include "ahspec/core/error.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

namespace ahspec {

class Expr {
public:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
    enum class Fn { Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs, Sign, Sin, Cos };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v) { return Expr(std::make_shared<Node>(Node{Op::Const, v, {}, {}, Fn::Exp})); }
    static Expr variable() { return Expr(std::make_shared<Node>(Node{Op::Var, 0.0, {}, {}, Fn::Exp})); }

    static Expr parse(std::string_view text, std::string_view variable_name = "t");

    [[nodiscard]] double operator()(double x) const { return eval(*node_, x); }
    [[nodiscard]] Expr derivative() const { return Expr(diff(node_)); }
    [[nodiscard]] std::string str(std::string_view variable_name = "x") const {
        std::ostringstream os;
        print(os, *node_, variable_name);
        return os.str();
    }
    [[nodiscard]] bool is_constant() const { return node_->op == Op::Const; }

    friend Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node_, b.node_)); }
    friend Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node_, b.node_)); }
    friend Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node_, b.node_)); }
    friend Expr operator/(const Expr& a, const Expr& b) { return Expr(divide(a.node_, b.node_)); }

private:
    struct Node;
    using Ptr = std::shared_ptr<const Node>;
    struct Node {
        Op op;
        double value;
        Ptr lhs;
        Ptr rhs;
        Fn fn;
    };

    explicit Expr(Ptr p) : node_(std::move(p)) {}

    static Ptr make(Op op, Ptr a, Ptr b = nullptr, Fn fn = Fn::Exp) {
        return std::make_shared<Node>(Node{op, 0.0, std::move(a), std::move(b), fn});
    }
    static Ptr cst(double v) { return std::make_shared<Node>(Node{Op::Const, v, {}, {}, Fn::Exp}); }
    static bool is(const Ptr& p, double v) { return p->op == Op::Const && p->value == v; }

    static Ptr add(Ptr a, Ptr b) {
        if (is(a, 0.0)) return b;
        if (is(b, 0.0)) return a;
        if (a->op == Op::Const && b->op == Op::Const) return cst(a->value + b->value);
        return make(Op::Add, std::move(a), std::move(b));
    }
    static Ptr sub(Ptr a, Ptr b) {
        if (is(b, 0.0)) return a;
        if (a->op == Op::Const && b->op == Op::Const) return cst(a->value - b->value);
        if (is(a, 0.0)) return neg(std::move(b));
        return make(Op::Sub, std::move(a), std::move(b));
    }
    static Ptr mul(Ptr a, Ptr b) {
        if (is(a, 0.0) || is(b, 0.0)) return cst(0.0);
        if (is(a, 1.0)) return b;
        if (is(b, 1.0)) return a;
        if (a->op == Op::Const && b->op == Op::Const) return cst(a->value * b->value);
        return make(Op::Mul, std::move(a), std::move(b));
    }
    static Ptr divide(Ptr a, Ptr b) {
        if (is(a, 0.0)) return cst(0.0);
        if (is(b, 1.0)) return a;
        if (a->op == Op::Const && b->op == Op::Const) return cst(a->value / b->value);
        return make(Op::Div, std::move(a), std::move(b));
    }
    static Ptr neg(Ptr a) {
        if (a->op == Op::Const) return cst(-a->value);
        if (a->op == Op::Neg) return a->lhs;
        return make(Op::Neg, std::move(a));
    }
    static Ptr pow(Ptr a, Ptr b) {
        if (is(b, 0.0)) return cst(1.0);
        if (is(b, 1.0)) return a;
        if (a->op == Op::Const && b->op == Op::Const) return cst(std::pow(a->value, b->value));
        return make(Op::Pow, std::move(a), std::move(b));
    }
    static Ptr call(Fn fn, Ptr a) {
        if (a->op == Op::Const) {
            Node tmp{Op::Call, 0.0, a, nullptr, fn};
            return cst(eval(tmp, 0.0));
        }
        return make(Op::Call, std::move(a), nullptr, fn);
    }

    static double eval(const Node& n, double x) {
        switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return x;
        case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
        case Op::Neg: return -eval(*n.lhs, x);
        case Op::Pow:
            return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
        case Op::Call: {
            const double a = eval(*n.lhs, x);
            switch (n.fn) {
            case Fn::Sinh: return std::sinh(a);
            case Fn::Cosh: return std::cosh(a);
            case Fn::Tanh: return std::tanh(a);
            case Fn::Exp: return std::exp(a);
            case Fn::Log: return std::log(a);
            case Fn::Sqrt: return std::sqrt(a);
            case Fn::Abs: return std::abs(a);
            case Fn::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
            case Fn::Sin: return std::sin(a);
            case Fn::Cos: return std::cos(a);
            }
        }
        }
        return 0.0;
    }

    static Ptr diff(const Ptr& p) {
        const Node& n = *p;
        switch (n.op) {
        case Op::Const: return cst(0.0);
        case Op::Var: return cst(1.0);
        case Op::Add: return add(diff(n.lhs), diff(n.rhs));
        case Op::Sub: return sub(diff(n.lhs), diff(n.rhs));
        case Op::Neg: return neg(diff(n.lhs));
        case Op::Mul: return add(mul(diff(n.lhs), n.rhs), mul(n.lhs, diff(n.rhs)));
        case Op::Div:
            return divide(sub(mul(diff(n.lhs), n.rhs), mul(n.lhs, diff(n.rhs))), mul(n.rhs, n.rhs));
        case Op::Pow: {
            if (n.rhs->op == Op::Const) {
                const double k = n.rhs->value;
                return mul(mul(cst(k), pow(n.lhs, cst(k - 1.0))), diff(n.lhs));
            }
            // d(a^b) = a^b (b' log a + b a'/a)
            return mul(p, add(mul(diff(n.rhs), call(Fn::Log, n.lhs)),
                              divide(mul(n.rhs, diff(n.lhs)), n.lhs)));
        }
        case Op::Call: {
            const Ptr& a = n.lhs;
            const Ptr da = diff(a);
            Ptr outer;
            switch (n.fn) {
            case Fn::Sinh: outer = call(Fn::Cosh, a); break;
            case Fn::Cosh: outer = call(Fn::Sinh, a); break;
            case Fn::Tanh: {
                Ptr th = call(Fn::Tanh, a);
                outer = sub(cst(1.0), mul(th, th));
                break;
            }
            case Fn::Exp: outer = p; break;
            case Fn::Log: outer = divide(cst(1.0), a); break;
            case Fn::Sqrt: outer = divide(cst(0.5), p); break;
            case Fn::Abs: outer = call(Fn::Sign, a); break;
            case Fn::Sign: return cst(0.0);
            case Fn::Sin: outer = call(Fn::Cos, a); break;
            case Fn::Cos: outer = neg(call(Fn::Sin, a)); break;
            }
            return mul(outer, da);
        }
        }
        return cst(0.0);
    }

    static const char* name(Fn fn) {
        switch (fn) {
        case Fn::Sinh: return "sinh";
        case Fn::Cosh: return "cosh";
        case Fn::Tanh: return "tanh";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
        case Fn::Sign: return "sign";
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        }
        return "?";
    }

    static void print(std::ostream& os, const Node& n, std::string_view var) {
        switch (n.op) {
        case Op::Const: os << n.value; return;
        case Op::Var: os << var; return;
        case Op::Neg: os << "(-"; print(os, *n.lhs, var); os << ')'; return;
        case Op::Call: os << name(n.fn) << '('; print(os, *n.lhs, var); os << ')'; return;
        default: break;
        }
        const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : n.op == Op::Div ? '/' : '^';
        os << '(';
        print(os, *n.lhs, var);
        os << sym;
        print(os, *n.rhs, var);
        os << ')';
    }

    class Parser;
    Ptr node_;
};

class Expr::Parser {
public:
    Parser(std::string_view text, std::string_view var) : s_(text), var_(var) {}

    Ptr parse_all() {
        Ptr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("expression '" + std::string(s_) + "': " + what + " at offset " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Ptr expr() {
        Ptr lhs = term();
        for (;;) {
            if (accept('+')) lhs = add(lhs, term());
            else if (accept('-')) lhs = sub(lhs, term());
            else return lhs;
        }
    }
    Ptr term() {
        Ptr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = mul(lhs, unary());
            else if (accept('/')) lhs = divide(lhs, unary());
            else return lhs;
        }
    }
    Ptr unary() {
        if (accept('-')) return neg(unary());
        if (accept('+')) return unary();
        return power();
    }
    Ptr power() {
        Ptr base = atom();
        if (accept('^')) return Expr::pow(base, unary());
        return base;
    }
    Ptr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (accept('(')) {
            Ptr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }
    Ptr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        const std::string tok(s_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) fail("malformed number '" + tok + "'");
            return cst(v);
        } catch (const std::logic_error&) {
            fail("malformed number '" + tok + "'");
        }
    }
    Ptr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string_view id = s_.substr(start, pos_ - start);
        if (id == var_) return make(Op::Var, nullptr);
        if (id == "pi") return cst(std::numbers::pi);
        if (id == "e") return cst(std::numbers::e);
        static constexpr std::pair<std::string_view, Fn> fns[] = {
            {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}, {"exp", Fn::Exp},
            {"log", Fn::Log},   {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs},   {"sign", Fn::Sign},
            {"sin", Fn::Sin},   {"cos", Fn::Cos}};
        for (const auto& [nm, fn] : fns) {
            if (id == nm) {
                if (!accept('(')) fail("expected '(' after " + std::string(nm));
                Ptr arg = expr();
                if (!accept(')')) fail("expected ')'");
                return call(fn, arg);
            }
        }
        fail("unknown name '" + std::string(id) + "'");
    }

    std::string_view s_;
    std::string_view var_;
    std::size_t pos_ = 0;
};

inline Expr Expr::parse(std::string_view text, std::string_view variable_name) {
    return Expr(Parser(text, variable_name).parse_all());
}

} // namespace ahspec
