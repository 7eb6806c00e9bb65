#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace parnewt::expr {

/// Variables of the coefficient language. x2/xi2 are only admissible on 2D
/// problems; the parser enforces this via its `dim` argument.
enum class Var : int { X1 = 0, X2 = 1, T = 2, U = 3, Xi1 = 4, Xi2 = 5 };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression tree. Pow keeps its literal exponent in `value`
/// (the grammar only admits "^ number").
struct Node {
    enum class Op {
        Const, Variable,
        Add, Sub, Mul, Div, Neg, Pow,
        Sin, Cos, Exp, Log, Abs, Sign, Sqrt,
        Min, Max
    };
    Op op;
    double value = 0.0;  // Const payload or Pow exponent
    Var var = Var::X1;
    NodePtr a, b;
};

/// Syntax error. `offset` indexes the whitespace-stripped input (whitespace
/// is insignificant in the language).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& msg)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + msg),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Domain error during evaluation (division by zero, log of a non-positive
/// value, ...). Carries the offending subexpression.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& msg, std::string subexpr)
        : std::runtime_error(msg + " in subexpression '" + subexpr + "'"),
          subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

struct EvalPoint {
    std::array<double, 2> x{0.0, 0.0};
    double t = 0.0;
    double u = 0.0;
    std::array<double, 2> xi{0.0, 0.0};
};

/// Recursive-descent parse of
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | base ("^" number)?
///   base   := number | ident | func "(" expr ("," expr)* ")" | "(" expr ")"
/// with ident in {x1..x_dim, t, u, xi1..xi_dim} and func in
/// {sin,cos,exp,log,abs,sign,sqrt} (unary), {min,max} (binary).
NodePtr parse(const std::string& text, int dim);

double evaluate(const NodePtr& node, const EvalPoint& p);

/// Exact symbolic derivative with respect to `v`, with constant folding.
/// Kinked primitives follow fixed conventions: sign' == 0, abs'(0) == 0,
/// min/max differentiate through (a+b -/+ |a-b|)/2.
NodePtr differentiate(const NodePtr& node, Var v);

/// Grammar-conformant rendering; parsing it back gives a structurally
/// identical tree for any parsed input.
std::string to_string(const NodePtr& node);

bool equal(const NodePtr& a, const NodePtr& b);
bool depends_on(const NodePtr& node, Var v);
/// True when the tree contains abs/sign/min/max anywhere.
bool has_kinked_primitive(const NodePtr& node);

NodePtr constant(double c);
NodePtr variable(Var v);
/// Folding combinators used by differentiate (0+x, 1*x, const*const, ...).
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr divide(NodePtr a, NodePtr b);
NodePtr neg(NodePtr a);
NodePtr pow_of(NodePtr a, double e);
NodePtr unary(Node::Op op, NodePtr a);
NodePtr binary_call(Node::Op op, NodePtr a, NodePtr b);

const char* var_name(Var v);

}  // namespace parnewt::expr
