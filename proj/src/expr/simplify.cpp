#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hojman/expr.hpp"

namespace hojman {

namespace {

bool is_integer(double v) { return std::isfinite(v) && std::trunc(v) == v; }

std::optional<double> fold_call(Func f, double x) {
    double r = 0.0;
    switch (f) {
        case Func::Sin: r = std::sin(x); break;
        case Func::Cos: r = std::cos(x); break;
        case Func::Tan: r = std::tan(x); break;
        case Func::Exp: r = std::exp(x); break;
        case Func::Log:
            if (!(x > 0.0)) return std::nullopt;
            r = std::log(x);
            break;
        case Func::Sqrt:
            if (x < 0.0) return std::nullopt;
            r = std::sqrt(x);
            break;
        case Func::Abs: r = std::abs(x); break;
    }
    if (!std::isfinite(r)) return std::nullopt;
    return r;
}

std::optional<double> fold_pow(double a, double b) {
    if (a < 0.0 && !is_integer(b)) return std::nullopt;
    if (a == 0.0 && b < 0.0) return std::nullopt;
    double r = std::pow(a, b);
    if (!std::isfinite(r)) return std::nullopt;
    return r;
}

// A product in the form coef * (num factors) / (den factors).
struct Monomial {
    double coef = 1.0;
    std::vector<Expr> num;
    std::vector<Expr> den;
};

// Returns false when the chain cannot be canonicalized (a constant zero
// divisor or a non-finite coefficient); the caller then keeps the node.
bool collect_factors(const Expr& e, bool in_den, Monomial& m) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            if (in_den) {
                if (e.value() == 0.0) return false;
                m.coef /= e.value();
            } else {
                m.coef *= e.value();
            }
            return std::isfinite(m.coef);
        case Expr::Kind::Neg:
            m.coef = -m.coef;
            return collect_factors(e.operand(), in_den, m);
        case Expr::Kind::Mul:
            return collect_factors(e.lhs(), in_den, m) && collect_factors(e.rhs(), in_den, m);
        case Expr::Kind::Div:
            return collect_factors(e.lhs(), in_den, m) && collect_factors(e.rhs(), !in_den, m);
        default:
            (in_den ? m.den : m.num).push_back(e);
            return true;
    }
}

// Integer power view of a factor: u^k with k an integer constant, else u^1.
std::pair<Expr, double> as_power(const Expr& f) {
    if (f.kind() == Expr::Kind::Pow && f.rhs().is_constant() && is_integer(f.rhs().value()) && f.rhs().value() >= 2.0) {
        return {f.lhs(), f.rhs().value()};
    }
    return {f, 1.0};
}

Expr make_power(const Expr& base, double k) {
    if (k == 1.0) return base;
    return pow(base, Expr(k));
}

void cancel(Monomial& m) {
    for (std::size_t i = 0; i < m.den.size();) {
        auto [dbase, dk] = as_power(m.den[i]);
        bool changed = false;
        for (std::size_t j = 0; j < m.num.size(); ++j) {
            auto [nbase, nk] = as_power(m.num[j]);
            if (nbase != dbase) continue;
            double common = std::min(nk, dk);
            nk -= common;
            dk -= common;
            if (nk == 0.0) {
                m.num.erase(m.num.begin() + static_cast<std::ptrdiff_t>(j));
            } else {
                m.num[j] = make_power(nbase, nk);
            }
            changed = true;
            break;
        }
        if (!changed) {
            ++i;
        } else if (dk == 0.0) {
            m.den.erase(m.den.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            m.den[i] = make_power(dbase, dk);
        }
    }
}

// x * x^2 -> x^3 within one side of a monomial.
void merge_powers(std::vector<Expr>& factors) {
    std::vector<std::pair<Expr, double>> merged;
    for (const auto& f : factors) {
        auto [base, k] = as_power(f);
        auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& p) { return p.first == base; });
        if (it == merged.end()) {
            merged.emplace_back(base, k);
        } else {
            it->second += k;
        }
    }
    if (merged.size() == factors.size()) return;
    factors.clear();
    for (const auto& [base, k] : merged) factors.push_back(make_power(base, k));
}

Expr product_of(const std::vector<Expr>& factors) {
    Expr acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) acc = acc * factors[i];
    return acc;
}

bool by_structure(const Expr& a, const Expr& b) { return structural_compare(a, b) < 0; }

// Rebuilds |coef| * num / den, negated when coef < 0.
Expr build(Monomial m) {
    if (m.coef == 0.0) return Expr(0.0);
    std::sort(m.num.begin(), m.num.end(), by_structure);
    std::sort(m.den.begin(), m.den.end(), by_structure);
    bool negative = m.coef < 0.0;
    double mag = std::abs(m.coef);
    if (m.num.empty() && m.den.empty()) return Expr(m.coef);

    double inv = 1.0 / mag;
    if (!is_integer(mag) && is_integer(inv) && inv < 1e15) {
        m.den.insert(m.den.begin(), Expr(inv));
        mag = 1.0;
    }
    if (mag != 1.0 || m.num.empty()) m.num.insert(m.num.begin(), Expr(mag));
    Expr top = product_of(m.num);
    Expr out = m.den.empty() ? top : top / product_of(m.den);
    return negative ? -out : out;
}

struct Term {
    Expr rest;
    double coef;
};

class Simplifier {
public:
    Expr run(const Expr& e) {
        if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
        Expr out = rewrite(e);
        memo_.emplace(e.id(), out);
        return out;
    }

private:
    Expr rewrite(const Expr& e) {
        switch (e.kind()) {
            case Expr::Kind::Constant:
            case Expr::Kind::Variable:
                return e;
            case Expr::Kind::Call:
                return rewrite_call(e.func(), run(e.operand()));
            case Expr::Kind::Pow:
                return rewrite_pow(run(e.lhs()), run(e.rhs()));
            case Expr::Kind::Add:
            case Expr::Kind::Sub: {
                std::vector<Expr> parts;
                std::vector<double> signs;
                flatten_sum(e, 1.0, parts, signs);
                Expr acc = run(parts.front());
                if (signs.front() < 0.0) acc = -acc;
                for (std::size_t i = 1; i < parts.size(); ++i) {
                    Expr t = run(parts[i]);
                    acc = signs[i] > 0.0 ? acc + t : acc - t;
                }
                return rewrite_sum(acc);
            }
            case Expr::Kind::Neg: {
                Expr inner = run(e.operand());
                if (inner.kind() == Expr::Kind::Add || inner.kind() == Expr::Kind::Sub) return rewrite_sum(-inner);
                return rewrite_product(-inner);
            }
            default:
                return rewrite_product(Expr::binary(e.kind(), run(e.lhs()), run(e.rhs())));
        }
    }

    Expr rewrite_call(Func f, const Expr& arg) {
        if (arg.is_constant()) {
            if (auto v = fold_call(f, arg.value())) return Expr(*v);
        }
        if (f == Func::Log && arg.kind() == Expr::Kind::Call && arg.func() == Func::Exp) return arg.operand();
        // log(1/w) = -log(w) wherever either side is defined.
        if (f == Func::Log && arg.kind() == Expr::Kind::Div && arg.lhs().is_constant(1.0)) {
            return rewrite_product(-rewrite_call(Func::Log, arg.rhs()));
        }
        if (f == Func::Abs && arg.kind() == Expr::Kind::Neg) return rewrite_call(f, arg.operand());
        if (f == Func::Sqrt && arg.kind() == Expr::Kind::Pow && arg.rhs().is_constant(2.0)) {
            return rewrite_call(Func::Abs, arg.lhs());
        }
        return Expr::call(f, arg);
    }

    Expr rewrite_pow(const Expr& base, const Expr& exponent) {
        if (base.is_constant() && exponent.is_constant()) {
            if (auto v = fold_pow(base.value(), exponent.value())) return Expr(*v);
        }
        if (exponent.is_constant(1.0)) return base;
        if (exponent.is_constant(0.0)) return Expr(1.0);
        if (base.is_constant(1.0)) return Expr(1.0);
        if (base.is_constant(0.0) && exponent.is_constant() && exponent.value() > 0.0) return Expr(0.0);
        if (exponent.is_constant() && is_integer(exponent.value())) {
            double k = exponent.value();
            if (base.kind() == Expr::Kind::Pow && base.rhs().is_constant() && is_integer(base.rhs().value())) {
                return rewrite_pow(base.lhs(), Expr(base.rhs().value() * k));
            }
            if (base.kind() == Expr::Kind::Neg) {
                Expr p = rewrite_pow(base.operand(), exponent);
                return std::fmod(k, 2.0) == 0.0 ? p : rewrite_product(-p);
            }
        }
        return pow(base, exponent);
    }

    Expr rewrite_product(const Expr& e) {
        Monomial m;
        if (!collect_factors(e, false, m)) return e;
        merge_powers(m.num);
        merge_powers(m.den);
        cancel(m);
        if (m.den.empty()) return build(std::move(m));
        Expr built = build(m);
        if (auto spread = distribute_quotient(m); spread && spread->node_count() < built.node_count()) return *spread;
        return built;
    }

    // (a + b) * c / d -> a*c/d + b*c/d, tried when it lets d cancel.
    std::optional<Expr> distribute_quotient(const Monomial& m) {
        auto sum = std::find_if(m.num.begin(), m.num.end(), [](const Expr& f) {
            return f.kind() == Expr::Kind::Add || f.kind() == Expr::Kind::Sub;
        });
        if (sum == m.num.end()) return std::nullopt;
        Monomial rest = m;
        rest.num.erase(rest.num.begin() + (sum - m.num.begin()));
        std::vector<Expr> parts;
        std::vector<double> signs;
        flatten_sum(*sum, 1.0, parts, signs);
        Expr acc(0.0);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            Monomial piece = rest;
            piece.coef *= signs[i];
            if (!collect_factors(parts[i], false, piece)) return std::nullopt;
            merge_powers(piece.num);
            merge_powers(piece.den);
            cancel(piece);
            acc = acc + build(std::move(piece));
        }
        return rewrite_sum(acc);
    }

    static void flatten_sum(const Expr& e, double sign, std::vector<Expr>& parts, std::vector<double>& signs) {
        if (e.kind() == Expr::Kind::Add || e.kind() == Expr::Kind::Sub) {
            flatten_sum(e.lhs(), sign, parts, signs);
            flatten_sum(e.rhs(), e.kind() == Expr::Kind::Add ? sign : -sign, parts, signs);
            return;
        }
        if (e.kind() == Expr::Kind::Neg &&
            (e.operand().kind() == Expr::Kind::Add || e.operand().kind() == Expr::Kind::Sub)) {
            flatten_sum(e.operand(), -sign, parts, signs);
            return;
        }
        parts.push_back(e);
        signs.push_back(sign);
    }

    // Splits a term into coefficient and coefficient-free canonical rest.
    static std::optional<Term> split_term(const Expr& e) {
        Monomial m;
        if (!collect_factors(e, false, m)) return std::nullopt;
        merge_powers(m.num);
        merge_powers(m.den);
        cancel(m);
        double coef = m.coef;
        if (m.num.empty() && m.den.empty()) return Term{Expr(1.0), coef};
        m.coef = 1.0;
        return Term{build(std::move(m)), coef};
    }

    // coef * rest for a coefficient-free rest from split_term.
    static Expr scaled(const Expr& rest, double coef) {
        Monomial m;
        if (!collect_factors(rest, false, m)) return coef == 1.0 ? rest : Expr(coef) * rest;
        m.coef *= coef;
        return build(std::move(m));
    }

    static void collect_terms(const Expr& e, double sign, std::vector<Term>& terms, double& constant, bool& ok) {
        switch (e.kind()) {
            case Expr::Kind::Add:
                collect_terms(e.lhs(), sign, terms, constant, ok);
                collect_terms(e.rhs(), sign, terms, constant, ok);
                return;
            case Expr::Kind::Sub:
                collect_terms(e.lhs(), sign, terms, constant, ok);
                collect_terms(e.rhs(), -sign, terms, constant, ok);
                return;
            case Expr::Kind::Neg:
                if (e.operand().kind() == Expr::Kind::Add || e.operand().kind() == Expr::Kind::Sub) {
                    collect_terms(e.operand(), -sign, terms, constant, ok);
                    return;
                }
                break;
            case Expr::Kind::Constant:
                constant += sign * e.value();
                return;
            default:
                break;
        }
        auto term = split_term(e);
        if (!term) {
            terms.push_back({e, sign});
            return;
        }
        if (term->rest.is_constant(1.0)) {
            constant += sign * term->coef;
            return;
        }
        double c = sign * term->coef;
        for (auto& t : terms) {
            if (t.rest == term->rest) {
                t.coef += c;
                if (!std::isfinite(t.coef)) ok = false;
                return;
            }
        }
        terms.push_back({term->rest, c});
    }

    Expr rewrite_sum(const Expr& e) {
        std::vector<Term> terms;
        double constant = 0.0;
        bool ok = true;
        collect_terms(e, 1.0, terms, constant, ok);
        if (!ok || !std::isfinite(constant)) return e;
        std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
        if (terms.empty()) return Expr(constant);

        // Lead with the first positive term so output starts without a sign.
        auto lead = std::find_if(terms.begin(), terms.end(), [](const Term& t) { return t.coef > 0.0; });
        if (lead != terms.end()) std::rotate(terms.begin(), lead, lead + 1);

        Expr acc = scaled(terms.front().rest, terms.front().coef);
        for (std::size_t i = 1; i < terms.size(); ++i) {
            Expr t = scaled(terms[i].rest, std::abs(terms[i].coef));
            acc = terms[i].coef > 0.0 ? acc + t : acc - t;
        }
        if (constant > 0.0) acc = acc + Expr(constant);
        if (constant < 0.0) acc = acc - Expr(-constant);
        return acc;
    }

    std::unordered_map<const Expr::Node*, Expr> memo_;
};

}  // namespace

Expr simplify(const Expr& e) {
    Expr current = e;
    for (int pass = 0; pass < 4; ++pass) {
        Expr next = Simplifier().run(current);
        if (next == current) return next;
        current = next;
    }
    return current;
}

}  // namespace hojman
