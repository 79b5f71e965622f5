#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hojman/errors.hpp"

namespace hojman {

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

std::string_view func_name(Func f) noexcept;
std::optional<Func> func_from_name(std::string_view name) noexcept;

bool is_identifier(std::string_view name) noexcept;

/// Immutable expression tree over named scalar variables.
///
/// Nodes are shared, so copying an Expr is cheap and subtrees produced by
/// differentiation are reused rather than duplicated. Equality (operator==)
/// is structural; semantic equality is decided by equal_numeric.
class Expr {
public:
    enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
    struct Node;

    /// The constant 0.
    Expr();
    explicit Expr(double value);

    static Expr constant(double value);
    /// Throws std::invalid_argument if name is not an identifier.
    static Expr variable(std::string name);
    static Expr call(Func f, Expr arg);
    static Expr unary(Kind kind, Expr operand);
    static Expr binary(Kind kind, Expr lhs, Expr rhs);

    Kind kind() const noexcept;
    double value() const;
    const std::string& name() const;
    Func func() const;
    /// Operand of Neg and Call nodes.
    const Expr& operand() const;
    const Expr& lhs() const;
    const Expr& rhs() const;

    bool is_constant() const noexcept { return kind() == Kind::Constant; }
    bool is_constant(double v) const noexcept;
    bool is_variable(std::string_view name) const noexcept;
    bool depends_on(std::string_view name) const;
    std::set<std::string> variables() const;
    /// Number of distinct nodes (shared subtrees count once).
    std::size_t node_count() const;

    /// Identity of the underlying node; equal ids imply structural equality.
    const Node* id() const noexcept { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    // Empty child slot of a leaf node.
    explicit Expr(std::nullptr_t) noexcept {}
    std::shared_ptr<const Node> node_;
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

/// Total structural order; 0 iff structurally equal.
int structural_compare(const Expr& a, const Expr& b);

// Raw constructors: no simplification is applied.
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);

/// Parses the expression grammar:
///
///   expr    := term (("+"|"-") term)*
///   term    := factor (("*"|"/") factor)*
///   factor  := unary ("^" factor)?
///   unary   := "-" unary | primary
///   primary := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
///
/// Note that unary minus binds tighter than "^", so "-x^2" is (-x)^2.
/// Throws ParseError.
Expr parse_expr(std::string_view src);

/// Renders in the grammar above with the minimum parentheses needed for
/// parse_expr to rebuild the same tree.
std::string render(const Expr& e);

/// Rewrites negative constants as Neg(constant), the only form that survives
/// a render/parse round trip.
Expr normalize(const Expr& e);

/// Exact partial derivative with respect to var, simplified.
///
/// The derivative of abs(u) is u/abs(u) * u', which raises a domain error
/// when evaluated at u = 0.
Expr diff(const Expr& e, std::string_view var);

/// Sound structural simplification: constant folding, 0/1 identities,
/// double negation, collection of like terms and cancellation of
/// structurally equal factors.
Expr simplify(const Expr& e);

/// Variable-name to value map. Looking up an unbound name is an error.
class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}
    explicit Bindings(Point values) : values_(std::move(values)) {}

    void set(const std::string& name, double value) { values_[name] = value; }
    double at(const std::string& name) const;
    bool contains(const std::string& name) const { return values_.count(name) != 0; }
    const Point& values() const noexcept { return values_; }

private:
    Point values_;
};

/// Evaluates in IEEE double precision. Throws UnboundVariableError or
/// DomainError; never returns a non-finite value.
double eval(const Expr& e, const Bindings& b);

/// An expression flattened into a straight-line program over a fixed slot
/// order. Shared subtrees are computed once per call.
class CompiledExpr {
public:
    /// Throws UnboundVariableError if e uses a variable missing from slots.
    CompiledExpr(const Expr& e, std::span<const std::string> slots);

    double operator()(std::span<const double> values) const;

private:
    enum class Op { Const, Load, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
    struct Instr {
        Op op;
        std::size_t a = 0;
        std::size_t b = 0;
        double c = 0.0;
    };

    using Memo = std::unordered_map<const Expr::Node*, std::size_t>;
    std::size_t emit(const Expr& e, std::span<const std::string> slots, Memo& memo);
    [[noreturn]] void fail(std::size_t index, const std::string& reason) const;

    std::vector<Instr> program_;
    std::vector<Expr> sources_;
};

}  // namespace hojman
