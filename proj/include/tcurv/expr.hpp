#pragma once

// Scalar expression language used for metric components.
//
// Grammar (whitespace-insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' unary)?            right-associative, binds tighter than unary minus
//   primary := number | name | function '(' expr ')' | '(' expr ')'
// Functions: sin cos tan exp log sqrt sinh cosh tanh. The name `pi` is a constant
// unless a coordinate or parameter shadows it.

#include "tcurv/errors.hpp"
#include "tcurv/jet.hpp"

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tcurv {

enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Constant, Coordinate, Parameter, Negate, Add, Sub, Mul, Div, Pow, Call };

    Kind kind = Kind::Constant;
    double value = 0.0;               // Constant
    int index = -1;                   // Coordinate / Parameter slot
    std::string name;                 // Coordinate / Parameter name
    Function function = Function::Sin; // Call
    ExprPtr lhs;                      // operand of unary nodes, left operand otherwise
    ExprPtr rhs;
};

struct SymbolTable {
    std::vector<std::string> coordinates;
    std::vector<std::string> parameters;
};

ExprPtr parse_expression(std::string_view text, const SymbolTable& symbols);

/// Canonical text form; reparses to a structurally equal tree.
std::string to_string(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

std::string_view function_name(Function f);

namespace detail {

inline void require_finite(double v, std::string_view what)
{
    if (!std::isfinite(v)) throw DomainError("non-finite value in " + std::string(what));
}

inline double apply(Function f, double x)
{
    switch (f) {
    case Function::Sin: return std::sin(x);
    case Function::Cos: return std::cos(x);
    case Function::Tan:
        if (std::cos(x) == 0.0) throw DomainError("tan at a pole");
        return std::tan(x);
    case Function::Exp: return std::exp(x);
    case Function::Log:
        if (!(x > 0.0)) throw DomainError("log of non-positive value " + std::to_string(x));
        return std::log(x);
    case Function::Sqrt:
        if (x < 0.0) throw DomainError("sqrt of negative value " + std::to_string(x));
        return std::sqrt(x);
    case Function::Sinh: return std::sinh(x);
    case Function::Cosh: return std::cosh(x);
    case Function::Tanh: return std::tanh(x);
    }
    return 0.0;
}

inline Jet apply(Function f, const Jet& x)
{
    switch (f) {
    case Function::Sin: return sin(x);
    case Function::Cos: return cos(x);
    case Function::Tan: return tan(x);
    case Function::Exp: return exp(x);
    case Function::Log: return log(x);
    case Function::Sqrt: return sqrt(x);
    case Function::Sinh: return sinh(x);
    case Function::Cosh: return cosh(x);
    case Function::Tanh: return tanh(x);
    }
    return Jet(0.0);
}

// Same multiplication sequence as pow(const Jet&, int), so that plain and order-0
// jet evaluation agree bit for bit.
inline double integer_power(double base, long exponent)
{
    if (exponent < 0) return 1.0 / integer_power(base, -exponent);
    double result = 1.0;
    double square = base;
    unsigned long n = static_cast<unsigned long>(exponent);
    while (n) {
        if (n & 1u) result *= square;
        n >>= 1u;
        if (n) square *= square;
    }
    return result;
}

inline double power(double base, double exponent)
{
    if (base == 0.0 && exponent < 0.0) throw DomainError("negative power of zero");
    if (std::nearbyint(exponent) == exponent && std::abs(exponent) <= 1 << 20)
        return integer_power(base, static_cast<long>(exponent));
    if (!(base > 0.0))
        throw DomainError("non-integer power of non-positive base " + std::to_string(base));
    return std::pow(base, exponent);
}

inline Jet power(const Jet& base, const Jet& exponent) { return pow(base, exponent); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Jet& v) { return v.value() == 0.0; }

} // namespace detail

/// Evaluates `e` with coordinate values `coords` over doubles or Jets.
template <class Scalar>
Scalar evaluate(const Expr& e, std::span<const Scalar> coords, std::span<const double> params)
{
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Constant: return Scalar(e.value);
    case K::Coordinate: return coords[e.index];
    case K::Parameter: return Scalar(params[e.index]);
    case K::Negate: return -evaluate(*e.lhs, coords, params);
    case K::Add: return evaluate(*e.lhs, coords, params) + evaluate(*e.rhs, coords, params);
    case K::Sub: return evaluate(*e.lhs, coords, params) - evaluate(*e.rhs, coords, params);
    case K::Mul: return evaluate(*e.lhs, coords, params) * evaluate(*e.rhs, coords, params);
    case K::Div: {
        Scalar den = evaluate(*e.rhs, coords, params);
        if (detail::is_zero(den)) throw DomainError("division by zero");
        return evaluate(*e.lhs, coords, params) / den;
    }
    case K::Pow: {
        Scalar r = detail::power(evaluate(*e.lhs, coords, params), evaluate(*e.rhs, coords, params));
        detail::require_finite(value_of(r), "power");
        return r;
    }
    case K::Call: {
        Scalar r = detail::apply(e.function, evaluate(*e.lhs, coords, params));
        detail::require_finite(value_of(r), function_name(e.function));
        return r;
    }
    }
    return Scalar(0.0);
}

} // namespace tcurv
