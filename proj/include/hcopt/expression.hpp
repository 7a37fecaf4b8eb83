#ifndef HCOPT_EXPRESSION_HPP
#define HCOPT_EXPRESSION_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcopt/function_handle.hpp"

namespace hcopt {

// Arithmetic expression grammar over variables x1..xn:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' number)?
//   atom   := number | x<k> | '(' expr ')' | fn '(' expr (',' expr)* ')'
//   fn     := min | max | abs | pow
//
// Exponents must be numeric literals. Smooth subtrees compile to a single
// piece with a forward-mode gradient; min/max/abs produce max-of-smooth and
// difference-of-max structure through the handle algebra. Products and
// quotients involving a nonsmooth operand are rejected unless the other side
// is a constant.
struct Expr {
    enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Min, Max, Abs };
    Kind kind = Kind::Const;
    double value = 0.0; // Const payload; Pow exponent
    int var = 0;
    std::vector<std::shared_ptr<const Expr>> kids;
};

using ExprPtr = std::shared_ptr<const Expr>;

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (column " + std::to_string(pos + 1) + ")"), position(pos) {}
};

ExprPtr parse_expression(const std::string& text, int dim);

bool expr_is_constant(const ExprPtr& e);
bool expr_is_affine(const ExprPtr& e);
bool expr_is_smooth(const ExprPtr& e); // free of min/max/abs

double eval_expression(const ExprPtr& e, const Vec& x);

FunctionHandle compile_expression(const ExprPtr& e, int dim, std::string label = {});
FunctionHandle compile_expression(const std::string& text, int dim);

} // namespace hcopt

#endif
