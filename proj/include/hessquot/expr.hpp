#pragma once

// Arithmetic expressions over x1..xn, u, p1..pn used for the forcing term
// psi(x, u, p), boundary data phi(x) and subsolutions. Grammar (see README):
//
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-'? power
//   power := atom ('^' unary)?
//   atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//
// so '^' binds tighter than unary minus (-x^2 == -(x^2)) and is right-associative.

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace hessquot::expr {

enum class VarKind { X, U, P };

/// x_{index+1}, u, or p_{index+1}. index is 0-based and ignored for U.
struct Variable {
    VarKind kind = VarKind::U;
    int index = 0;

    static Variable x(int i) { return {VarKind::X, i}; }
    static Variable u() { return {VarKind::U, 0}; }
    static Variable p(int i) { return {VarKind::P, i}; }

    std::string name() const;
    friend bool operator==(const Variable&, const Variable&) = default;
};

struct Node;

/// Immutable expression tree; copies share structure.
class Expr {
public:
    /// The literal 0.
    Expr();
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    const Node& root() const noexcept { return *root_; }
    const std::shared_ptr<const Node>& ptr() const noexcept { return root_; }

    bool is_literal() const noexcept;
    /// Literal value; only meaningful when is_literal().
    double literal_value() const noexcept;

    /// Structural equality (same tree shape, operators, literals and variables).
    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const Node> root_;
};

struct EvalEnv {
    std::span<const double> x;
    double u = 0.0;
    std::span<const double> p;
};

/// Throws ParseError (with byte offset and expected tokens) or UnknownIdentifier.
/// Variables x_i / p_i are accepted for 1 <= i <= n.
Expr parse(std::string_view text, int n);

/// Throws DomainFault for log of a non-positive value, sqrt of a negative value, division by zero,
/// invalid powers and non-finite results; InvalidArgument if a variable is missing from env.
double evaluate(const Expr& e, const EvalEnv& env);

/// Exact symbolic derivative with literal folding and trivial simplification (0 + a, 1 * a, a ^ 1, ...).
Expr differentiate(const Expr& e, Variable var);

bool depends_on(const Expr& e, Variable var);

/// Canonical text form; parse(to_string(parse(s))) == parse(s).
std::string to_string(const Expr& e);

Expr literal(double v);
Expr variable(Variable v);

}  // namespace hessquot::expr
