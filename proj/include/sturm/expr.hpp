#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sturm {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt, Tanh };

/// Immutable expression tree in the single variable `x`.
///
/// Copies share the underlying nodes, so an Expression is cheap to pass by
/// value and safe to evaluate from several threads at once.
class Expression {
public:
    struct Node;

    /// The constant 0.
    Expression();

    static Expression constant(double value);
    static Expression variable();
    static Expression unary(Op op, Expression arg);
    static Expression binary(Op op, Expression lhs, Expression rhs);

    Op op() const noexcept;
    /// Literal value; only meaningful when op() == Op::Constant.
    double literal() const noexcept;
    /// Operand of a unary node, left operand of a binary node.
    Expression lhs() const;
    Expression rhs() const;

    /// True when the tree does not mention `x`.
    bool is_constant() const noexcept;

    /// Plain double evaluation. Throws DomainError instead of returning NaN or inf.
    double operator()(double x) const;

    /// Taylor coefficients f^(k)(x)/k! for k = 0..order, by truncated power
    /// series arithmetic over the tree.
    std::vector<double> taylor(double x, int order) const;

    std::size_t node_count() const noexcept;

    friend bool operator==(const Expression& a, const Expression& b);

private:
    explicit Expression(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Parses the coefficient grammar:
///
///     expr   := term (("+"|"-") term)*
///     term   := factor (("*"|"/") factor)*
///     factor := unary ("^" factor)?
///     unary  := "-" unary | atom
///     atom   := number | "x" | func "(" expr ")" | "(" expr ")"
///     func   := sin | cos | exp | log | sqrt | tanh
///
/// The Unicode minus sign U+2212 is accepted wherever "-" is. Throws
/// ParseError carrying the byte offset of the first bad token.
Expression parse(std::string_view source);

double evaluate(const Expression& e, double x);

/// Exact symbolic derivative with light constant folding.
Expression differentiate(const Expression& e);

/// Fully parenthesised text that parse() maps back to the same tree.
std::string print(const Expression& e);

}  // namespace sturm
