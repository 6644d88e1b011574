#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace pseudoglue {

enum class ExprKind { Literal, Variable, Constant, Neg, Add, Sub, Mul, Div, Pow, Exp };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind = ExprKind::Literal;
    double value = 0.0;  // Literal
    int exponent = 0;    // Pow
    std::string name;    // Constant
    Expr lhs;            // operand of Neg, Pow, Exp
    Expr rhs;
};

using Constants = std::map<std::string, double>;

// Grammar, loosest first:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' int | '^' '(' int ')')*
//   primary := number | 'x' | identifier | 'exp' '(' sum ')' | '(' sum ')'
// Identifiers other than x and exp name constants resolved at evaluation time.
// Throws SyntaxError carrying the byte offset of the offending token.
Expr parse_expr(std::string_view text);

// Throws EvaluationError on unknown constants, division by zero and non-finite results.
double evaluate(const Expr& e, double x, const Constants& constants = {});

// Tree shape, e.g. "Add(Pow(Var,2),Lit 4)".
std::string structure(const Expr& e);
// Fully parenthesised text that parses back to the same tree.
std::string to_text(const Expr& e);

Expr lit(double v);
Expr var();

}  // namespace pseudoglue
