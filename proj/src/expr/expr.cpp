#include "hojman/expr.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "node.hpp"

namespace hojman {

namespace {

constexpr std::array<std::pair<Func, std::string_view>, 7> kFuncNames{{
    {Func::Sin, "sin"},
    {Func::Cos, "cos"},
    {Func::Tan, "tan"},
    {Func::Exp, "exp"},
    {Func::Log, "log"},
    {Func::Sqrt, "sqrt"},
    {Func::Abs, "abs"},
}};

const Expr& zero_expr() {
    static const Expr zero = Expr::constant(0.0);
    return zero;
}

bool is_unary(Expr::Kind k) { return k == Expr::Kind::Neg || k == Expr::Kind::Call; }

bool is_binary(Expr::Kind k) {
    return k == Expr::Kind::Add || k == Expr::Kind::Sub || k == Expr::Kind::Mul || k == Expr::Kind::Div ||
           k == Expr::Kind::Pow;
}

}  // namespace

std::string_view func_name(Func f) noexcept {
    for (const auto& [func, name] : kFuncNames) {
        if (func == f) return name;
    }
    return "?";
}

std::optional<Func> func_from_name(std::string_view name) noexcept {
    for (const auto& [func, n] : kFuncNames) {
        if (n == name) return func;
    }
    return std::nullopt;
}

bool is_identifier(std::string_view name) noexcept {
    if (name.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!alpha(name.front())) return false;
    for (char c : name) {
        if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
    }
    return true;
}

Expr::Expr() : Expr(zero_expr()) {}

Expr::Expr(double value) : Expr(constant(value)) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::variable(std::string name) {
    if (!is_identifier(name)) throw std::invalid_argument("invalid variable name '" + name + "'");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = std::move(name);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::call(Func f, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->func = f;
    n->a = std::move(arg);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::unary(Kind kind, Expr operand) {
    if (kind != Kind::Neg) throw std::invalid_argument("Expr::unary expects Neg");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(operand);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
    if (!is_binary(kind)) throw std::invalid_argument("Expr::binary expects a binary kind");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

double Expr::value() const {
    if (kind() != Kind::Constant) throw std::logic_error("value() on non-constant");
    return node_->value;
}

const std::string& Expr::name() const {
    if (kind() != Kind::Variable) throw std::logic_error("name() on non-variable");
    return node_->name;
}

Func Expr::func() const {
    if (kind() != Kind::Call) throw std::logic_error("func() on non-call");
    return node_->func;
}

const Expr& Expr::operand() const {
    if (!is_unary(kind())) throw std::logic_error("operand() on non-unary");
    return node_->a;
}

const Expr& Expr::lhs() const {
    if (!is_binary(kind())) throw std::logic_error("lhs() on non-binary");
    return node_->a;
}

const Expr& Expr::rhs() const {
    if (!is_binary(kind())) throw std::logic_error("rhs() on non-binary");
    return node_->b;
}

bool Expr::is_constant(double v) const noexcept { return kind() == Kind::Constant && node_->value == v; }

bool Expr::is_variable(std::string_view name) const noexcept {
    return kind() == Kind::Variable && node_->name == name;
}

bool Expr::depends_on(std::string_view name) const {
    switch (kind()) {
        case Kind::Constant:
            return false;
        case Kind::Variable:
            return node_->name == name;
        case Kind::Neg:
        case Kind::Call:
            return node_->a.depends_on(name);
        default:
            return node_->a.depends_on(name) || node_->b.depends_on(name);
    }
}

std::set<std::string> Expr::variables() const {
    std::set<std::string> out;
    std::unordered_set<const Node*> seen;
    std::vector<const Expr*> stack{this};
    while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        if (!seen.insert(e->id()).second) continue;
        switch (e->kind()) {
            case Kind::Constant:
                break;
            case Kind::Variable:
                out.insert(e->node_->name);
                break;
            case Kind::Neg:
            case Kind::Call:
                stack.push_back(&e->node_->a);
                break;
            default:
                stack.push_back(&e->node_->a);
                stack.push_back(&e->node_->b);
        }
    }
    return out;
}

std::size_t Expr::node_count() const {
    std::unordered_set<const Node*> seen;
    std::vector<const Expr*> stack{this};
    while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        if (!seen.insert(e->id()).second) continue;
        if (is_unary(e->kind())) stack.push_back(&e->node_->a);
        if (is_binary(e->kind())) {
            stack.push_back(&e->node_->a);
            stack.push_back(&e->node_->b);
        }
    }
    return seen.size();
}

int structural_compare(const Expr& a, const Expr& b) {
    if (a.id() == b.id()) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
        case Expr::Kind::Constant:
            if (a.value() == b.value()) return 0;
            return a.value() < b.value() ? -1 : 1;
        case Expr::Kind::Variable:
            return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
        case Expr::Kind::Neg:
            return structural_compare(a.operand(), b.operand());
        case Expr::Kind::Call:
            if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
            return structural_compare(a.operand(), b.operand());
        default: {
            int c = structural_compare(a.lhs(), b.lhs());
            return c != 0 ? c : structural_compare(a.rhs(), b.rhs());
        }
    }
}

bool operator==(const Expr& a, const Expr& b) { return structural_compare(a, b) == 0; }

Expr operator-(const Expr& a) { return Expr::unary(Expr::Kind::Neg, a); }
Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Div, a, b); }
Expr operator+(const Expr& a, double b) { return a + Expr(b); }
Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
Expr operator-(const Expr& a, double b) { return a - Expr(b); }
Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
Expr operator*(const Expr& a, double b) { return a * Expr(b); }
Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
Expr operator/(const Expr& a, double b) { return a / Expr(b); }
Expr operator/(double a, const Expr& b) { return Expr(a) / b; }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(Expr::Kind::Pow, base, exponent); }
Expr pow(const Expr& base, double exponent) { return pow(base, Expr(exponent)); }
Expr sin(const Expr& a) { return Expr::call(Func::Sin, a); }
Expr cos(const Expr& a) { return Expr::call(Func::Cos, a); }
Expr tan(const Expr& a) { return Expr::call(Func::Tan, a); }
Expr exp(const Expr& a) { return Expr::call(Func::Exp, a); }
Expr log(const Expr& a) { return Expr::call(Func::Log, a); }
Expr sqrt(const Expr& a) { return Expr::call(Func::Sqrt, a); }
Expr abs(const Expr& a) { return Expr::call(Func::Abs, a); }

Expr normalize(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            if (e.value() < 0.0 || std::signbit(e.value())) return -Expr(-e.value());
            return e;
        case Expr::Kind::Variable:
            return e;
        case Expr::Kind::Neg:
            return -normalize(e.operand());
        case Expr::Kind::Call:
            return Expr::call(e.func(), normalize(e.operand()));
        default:
            return Expr::binary(e.kind(), normalize(e.lhs()), normalize(e.rhs()));
    }
}

}  // namespace hojman
