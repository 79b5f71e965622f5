#include <string>
#include <unordered_map>

#include "hojman/expr.hpp"

namespace hojman {

namespace {

bool is_zero(const Expr& e) { return e.is_constant(0.0); }
bool is_one(const Expr& e) { return e.is_constant(1.0); }

// Local 0/1 shortcuts keep derivative trees from filling up with dead terms
// before the final simplify.
Expr add(const Expr& a, const Expr& b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return a + b;
}

Expr sub(const Expr& a, const Expr& b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return -b;
    return a - b;
}

Expr mul(const Expr& a, const Expr& b) {
    if (is_zero(a) || is_zero(b)) return Expr(0.0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    return a * b;
}

Expr neg(const Expr& a) { return is_zero(a) ? a : -a; }

class Differentiator {
public:
    explicit Differentiator(std::string_view var) : var_(var) {}

    Expr d(const Expr& e) {
        if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
        Expr out = rule(e);
        memo_.emplace(e.id(), out);
        return out;
    }

private:
    Expr rule(const Expr& e) {
        switch (e.kind()) {
            case Expr::Kind::Constant:
                return Expr(0.0);
            case Expr::Kind::Variable:
                return Expr(e.name() == var_ ? 1.0 : 0.0);
            case Expr::Kind::Neg:
                return neg(d(e.operand()));
            case Expr::Kind::Add:
                return add(d(e.lhs()), d(e.rhs()));
            case Expr::Kind::Sub:
                return sub(d(e.lhs()), d(e.rhs()));
            case Expr::Kind::Mul:
                return add(mul(d(e.lhs()), e.rhs()), mul(e.lhs(), d(e.rhs())));
            case Expr::Kind::Div: {
                const Expr& u = e.lhs();
                const Expr& v = e.rhs();
                Expr du = d(u);
                Expr dv = d(v);
                if (is_zero(dv)) return is_zero(du) ? Expr(0.0) : du / v;
                Expr v2 = pow(v, Expr(2.0));
                if (is_zero(du)) return neg(mul(u, dv) / v2);
                return sub(mul(du, v), mul(u, dv)) / v2;
            }
            case Expr::Kind::Pow:
                return power_rule(e);
            case Expr::Kind::Call:
                return chain_rule(e);
        }
        return Expr(0.0);
    }

    Expr power_rule(const Expr& e) {
        const Expr& u = e.lhs();
        const Expr& v = e.rhs();
        Expr du = d(u);
        Expr dv = d(v);
        if (is_zero(du) && is_zero(dv)) return Expr(0.0);
        if (is_zero(dv)) {
            Expr reduced = v.is_constant() ? Expr(v.value() - 1.0) : v - Expr(1.0);
            return mul(mul(v, pow(u, reduced)), du);
        }
        if (is_zero(du)) return mul(mul(e, log(u)), dv);
        return mul(e, add(mul(dv, log(u)), mul(v, du) / u));
    }

    Expr chain_rule(const Expr& e) {
        const Expr& u = e.operand();
        Expr du = d(u);
        if (is_zero(du)) return Expr(0.0);
        switch (e.func()) {
            case Func::Sin:
                return mul(cos(u), du);
            case Func::Cos:
                return neg(mul(sin(u), du));
            case Func::Tan:
                return du / pow(cos(u), Expr(2.0));
            case Func::Exp:
                return mul(e, du);
            case Func::Log:
                return du / u;
            case Func::Sqrt:
                return du / (Expr(2.0) * e);
            case Func::Abs:
                return mul(u / e, du);
        }
        return Expr(0.0);
    }

    std::string var_;
    std::unordered_map<const Expr::Node*, Expr> memo_;
};

}  // namespace

Expr diff(const Expr& e, std::string_view var) { return simplify(Differentiator(var).d(e)); }

}  // namespace hojman
