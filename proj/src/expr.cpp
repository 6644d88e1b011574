#include "pseudoglue/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "pseudoglue/errors.hpp"

namespace pseudoglue {

namespace {

Expr node(ExprKind k, Expr lhs = nullptr, Expr rhs = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

std::string number_text(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse() {
        Expr e = sum();
        skip();
        if (pos_ < s_.size()) throw SyntaxError(pos_, std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

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

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw SyntaxError(pos_, std::string("expected '") + c + "' before end of input");
            throw SyntaxError(pos_, std::string("expected '") + c + "'");
        }
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (accept('+')) e = node(ExprKind::Add, e, product());
            else if (accept('-')) e = node(ExprKind::Sub, e, product());
            else return e;
        }
    }

    Expr product() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) e = node(ExprKind::Mul, e, unary());
            else if (accept('/')) e = node(ExprKind::Div, e, unary());
            else return e;
        }
    }

    Expr unary() {
        if (accept('-')) return node(ExprKind::Neg, unary());
        return power();
    }

    int exponent() {
        skip();
        const bool paren = accept('(');
        skip();
        const std::size_t start = pos_;
        bool neg = false;
        if (pos_ < s_.size() && s_[pos_] == '-') {
            neg = true;
            ++pos_;
        }
        const std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == digits) throw SyntaxError(start, "expected an integer exponent");
        int value = 0;
        auto res = std::from_chars(s_.data() + digits, s_.data() + pos_, value);
        if (res.ec != std::errc()) throw SyntaxError(start, "exponent out of range");
        if (paren) expect(')');
        return neg ? -value : value;
    }

    Expr power() {
        Expr e = primary();
        while (accept('^')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprKind::Pow;
            n->lhs = e;
            n->exponent = exponent();
            e = n;
        }
        return e;
    }

    Expr primary() {
        skip();
        if (pos_ >= s_.size()) throw SyntaxError(pos_, "unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string_view id = s_.substr(start, pos_ - start);
            if (id == "x") return node(ExprKind::Variable);
            if (id == "exp") {
                expect('(');
                Expr arg = sum();
                expect(')');
                return node(ExprKind::Exp, arg);
            }
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprKind::Constant;
            n->name = std::string(id);
            return n;
        }
        if (accept('(')) {
            Expr e = sum();
            expect(')');
            return e;
        }
        throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) throw SyntaxError(start, "malformed number");
        return lit(v);
    }
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorCode::EvaluationError, std::string(what) + " is not finite");
    return v;
}

}  // namespace

Expr lit(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Literal;
    n->value = v;
    return n;
}

Expr var() { return node(ExprKind::Variable); }

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

double evaluate(const Expr& e, double x, const Constants& constants) {
    if (!e) throw Error(ErrorCode::EvaluationError, "empty expression");
    switch (e->kind) {
        case ExprKind::Literal: return e->value;
        case ExprKind::Variable: return x;
        case ExprKind::Constant: {
            auto it = constants.find(e->name);
            if (it == constants.end()) throw Error(ErrorCode::EvaluationError, "unknown constant '" + e->name + "'");
            return it->second;
        }
        case ExprKind::Neg: return -evaluate(e->lhs, x, constants);
        case ExprKind::Add: return checked(evaluate(e->lhs, x, constants) + evaluate(e->rhs, x, constants), "sum");
        case ExprKind::Sub: return checked(evaluate(e->lhs, x, constants) - evaluate(e->rhs, x, constants), "difference");
        case ExprKind::Mul: return checked(evaluate(e->lhs, x, constants) * evaluate(e->rhs, x, constants), "product");
        case ExprKind::Div: {
            double num = evaluate(e->lhs, x, constants);
            double den = evaluate(e->rhs, x, constants);
            if (den == 0.0) throw Error(ErrorCode::EvaluationError, "division by zero");
            return checked(num / den, "quotient");
        }
        case ExprKind::Pow: {
            double b = evaluate(e->lhs, x, constants);
            if (b == 0.0 && e->exponent < 0) throw Error(ErrorCode::EvaluationError, "zero to a negative power");
            return checked(std::pow(b, e->exponent), "power");
        }
        case ExprKind::Exp: return checked(std::exp(evaluate(e->lhs, x, constants)), "exponential");
    }
    throw Error(ErrorCode::EvaluationError, "malformed expression");
}

std::string structure(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Literal: return "Lit " + number_text(e->value);
        case ExprKind::Variable: return "Var";
        case ExprKind::Constant: return "Const " + e->name;
        case ExprKind::Neg: return "Neg(" + structure(e->lhs) + ")";
        case ExprKind::Add: return "Add(" + structure(e->lhs) + "," + structure(e->rhs) + ")";
        case ExprKind::Sub: return "Sub(" + structure(e->lhs) + "," + structure(e->rhs) + ")";
        case ExprKind::Mul: return "Mul(" + structure(e->lhs) + "," + structure(e->rhs) + ")";
        case ExprKind::Div: return "Div(" + structure(e->lhs) + "," + structure(e->rhs) + ")";
        case ExprKind::Pow: return "Pow(" + structure(e->lhs) + "," + std::to_string(e->exponent) + ")";
        case ExprKind::Exp: return "Exp(" + structure(e->lhs) + ")";
    }
    return "?";
}

std::string to_text(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Literal: return e->value < 0 ? "(" + number_text(e->value) + ")" : number_text(e->value);
        case ExprKind::Variable: return "x";
        case ExprKind::Constant: return e->name;
        case ExprKind::Neg: return "(-" + to_text(e->lhs) + ")";
        case ExprKind::Add: return "(" + to_text(e->lhs) + "+" + to_text(e->rhs) + ")";
        case ExprKind::Sub: return "(" + to_text(e->lhs) + "-" + to_text(e->rhs) + ")";
        case ExprKind::Mul: return "(" + to_text(e->lhs) + "*" + to_text(e->rhs) + ")";
        case ExprKind::Div: return "(" + to_text(e->lhs) + "/" + to_text(e->rhs) + ")";
        case ExprKind::Pow: return "(" + to_text(e->lhs) + "^(" + std::to_string(e->exponent) + "))";
        case ExprKind::Exp: return "exp(" + to_text(e->lhs) + ")";
    }
    return "";
}

}  // namespace pseudoglue
