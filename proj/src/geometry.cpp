#include "hojman/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hojman {

Chart::Chart(std::vector<std::string> coords, bool has_time) : coords_(std::move(coords)), has_time_(has_time) {
    if (coords_.empty()) throw std::invalid_argument("chart needs at least one coordinate");
    std::set<std::string> seen;
    for (const auto& c : coords_) {
        if (!is_identifier(c)) throw std::invalid_argument("invalid coordinate name '" + c + "'");
        if (!seen.insert(c).second) throw std::invalid_argument("duplicate coordinate '" + c + "'");
    }
}

const std::string& Chart::time() const {
    if (!has_time_) throw MissingTimeCoordinate();
    return coords_.front();
}

bool Chart::contains(const std::string& name) const {
    return std::find(coords_.begin(), coords_.end(), name) != coords_.end();
}

std::size_t Chart::index_of(const std::string& name) const {
    auto it = std::find(coords_.begin(), coords_.end(), name);
    if (it == coords_.end()) throw std::invalid_argument("'" + name + "' is not a chart coordinate");
    return static_cast<std::size_t>(it - coords_.begin());
}

VectorField::VectorField(Chart chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_.dim()) {
        throw std::invalid_argument("vector field has " + std::to_string(components_.size()) +
                                    " components on a chart of dimension " + std::to_string(chart_.dim()));
    }
    for (const auto& c : components_) {
        for (const auto& v : c.variables()) {
            if (!chart_.contains(v)) {
                throw std::invalid_argument("component '" + render(c) + "' uses '" + v + "', not a chart coordinate");
            }
        }
    }
    nsode_ = chart_.has_time() && components_.front().is_constant(1.0);
}

VectorField VectorField::zero(const Chart& chart) {
    return VectorField(chart, std::vector<Expr>(chart.dim(), Expr(0.0)));
}

VectorField VectorField::scaled(const Expr& f) const {
    std::vector<Expr> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(simplify(f * c));
    return VectorField(chart_, std::move(out));
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    if (!(a.chart() == b.chart())) throw ChartMismatchError("vector fields live on different charts");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < a.dim(); ++i) out.push_back(simplify(a[i] + b[i]));
    return VectorField(a.chart(), std::move(out));
}

Multiplier::Multiplier(Chart chart, Expr r, SampleBox positivity_box)
    : chart_(std::move(chart)), r_(std::move(r)), box_(std::move(positivity_box)) {
    for (const auto& v : r_.variables()) {
        if (!chart_.contains(v)) throw std::invalid_argument("multiplier uses '" + v + "', not a chart coordinate");
    }
    for (const auto& p : retained_points({r_}, box_)) {
        double value = eval(r_, Bindings(p));
        if (!(value > 0.0)) throw PositivityViolation(p, value);
    }
}

Expr Multiplier::log_value() const { return simplify(log(r_)); }

Multiplier Multiplier::rescaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("rescaling constant must be positive");
    return Multiplier(chart_, simplify(Expr(c) * r_), box_);
}

Expr divergence(const VectorField& x) {
    Expr sum(0.0);
    const auto& coords = x.chart().coords();
    for (std::size_t i = 0; i < coords.size(); ++i) sum = sum + diff(x[i], coords[i]);
    return simplify(sum);
}

Expr lie_derivative(const VectorField& x, const Expr& f) {
    Expr sum(0.0);
    const auto& coords = x.chart().coords();
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (x[i].is_constant(0.0)) continue;
        Expr df = diff(f, coords[i]);
        if (df.is_constant(0.0)) continue;
        sum = sum + x[i] * df;
    }
    return simplify(sum);
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("lie_bracket: vector fields live on different charts");
    std::vector<Expr> out;
    out.reserve(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out.push_back(simplify(lie_derivative(x, y[i]) - lie_derivative(y, x[i])));
    return VectorField(x.chart(), std::move(out));
}

EqualityReport scale_divergence_check(const VectorField& x, const Expr& f, const SampleBox& box, double rtol) {
    Expr lhs = divergence(x.scaled(f));
    Expr rhs = lie_derivative(x, f) + f * divergence(x);
    return equal_numeric(lhs, rhs, box, rtol);
}

EqualityReport bracket_divergence_residual(const VectorField& x, const VectorField& y, const SampleBox& box,
                                           double rtol) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("bracket_divergence_residual: chart mismatch");
    Expr lhs = lie_derivative(x, divergence(y)) - lie_derivative(y, divergence(x));
    Expr rhs = divergence(lie_bracket(x, y));
    return equal_numeric(lhs, rhs, box, rtol);
}

Expr multiplier_residual(const VectorField& x, const Multiplier& r) {
    if (!(x.chart() == r.chart())) throw ChartMismatchError("multiplier_residual: chart mismatch");
    return simplify(divergence(x) + lie_derivative(x, r.log_value()));
}

EqualityReport multiplier_report(const VectorField& x, const Multiplier& r, const SampleBox& box, double rtol) {
    return is_zero_numeric(multiplier_residual(x, r), box, rtol);
}

bool is_multiplier(const VectorField& x, const Multiplier& r, const SampleBox& box, double rtol) {
    return multiplier_report(x, r, box, rtol).equal;
}

EqualityReport vanishes(const VectorField& v, const SampleBox& box, double rtol) {
    EqualityReport worst;
    bool any = false;
    for (const auto& c : v.components()) {
        EqualityReport r = is_zero_numeric(c, box, rtol);
        bool worse = (!r.equal && worst.equal) || (r.equal == worst.equal && r.worst_residual > worst.worst_residual);
        if (!any || worse) worst = std::move(r);
        any = true;
    }
    return worst;
}

std::string to_string(NormalizerResult::Kind kind) {
    switch (kind) {
        case NormalizerResult::Kind::Commuting:
            return "commuting";
        case NormalizerResult::Kind::Normalizer:
            return "normalizer";
        case NormalizerResult::Kind::NotNormalizer:
            return "not_normalizer";
    }
    return "unknown";
}

namespace {

// Verifies B^i = h X^i for every component against a closed-form h.
NormalizerResult verify_closed_form(const VectorField& x, const VectorField& bracket, const Expr& h,
                                    const SampleBox& box, double rtol) {
    NormalizerResult out;
    out.h = simplify(h);
    bool ok = true;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        EqualityReport r = equal_numeric(bracket[i], *out.h * x[i], box, rtol);
        out.worst_residual = std::max(out.worst_residual, r.worst_residual);
        if (!r.equal && ok) {
            ok = false;
            out.witness = r.worst_point;
            out.detail = "component " + x.chart().coords()[i] + " of [Y,X] differs from h X^i";
        }
    }
    if (!ok) {
        out.kind = NormalizerResult::Kind::NotNormalizer;
        return out;
    }
    bool h_zero = is_zero_numeric(*out.h, box, rtol).equal;
    out.kind = h_zero && vanishes(bracket, box, rtol).equal ? NormalizerResult::Kind::Commuting
                                                            : NormalizerResult::Kind::Normalizer;
    if (out.kind == NormalizerResult::Kind::Commuting) out.h = Expr(0.0);
    return out;
}

}  // namespace

NormalizerResult normalizer_factor(const VectorField& x, const VectorField& y, const SampleBox& box, double rtol,
                                   const std::optional<Expr>& h_expr, double eps) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("normalizer_factor: chart mismatch");
    VectorField bracket = lie_bracket(y, x);

    if (h_expr) return verify_closed_form(x, bracket, *h_expr, box, rtol);

    if (vanishes(bracket, box, rtol).equal) {
        NormalizerResult out;
        out.kind = NormalizerResult::Kind::Commuting;
        out.h = Expr(0.0);
        return out;
    }

    // h * 1 = B^0 when the time component of X is 1.
    if (x.nsode()) return verify_closed_form(x, bracket, bracket[0], box, rtol);

    std::vector<std::string> names = box.names();
    std::vector<CompiledExpr> xs;
    std::vector<CompiledExpr> bs;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        xs.emplace_back(x[i], names);
        bs.emplace_back(bracket[i], names);
    }

    NormalizerResult out;
    out.kind = NormalizerResult::Kind::Normalizer;
    std::size_t degenerate = 0;
    std::size_t budget = 10 * box.count();
    for (std::size_t k = 0; k < budget && out.points.size() < box.count(); ++k) {
        Point p = box.point(k);
        std::vector<double> values;
        for (const auto& [name, v] : p) values.push_back(v);
        std::vector<double> xv(x.dim());
        std::vector<double> bv(x.dim());
        try {
            for (std::size_t i = 0; i < x.dim(); ++i) {
                xv[i] = xs[i](values);
                bv[i] = bs[i](values);
            }
        } catch (const DomainError&) {
            continue;
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < x.dim(); ++i) {
            if (std::abs(xv[i]) > std::abs(xv[best])) best = i;
        }
        if (std::abs(xv[best]) <= eps) {
            ++degenerate;
            continue;
        }
        double h = bv[best] / xv[best];
        for (std::size_t j = 0; j < x.dim(); ++j) {
            double hx = h * xv[j];
            double residual = std::abs(bv[j] - hx) / (1.0 + std::max(std::abs(bv[j]), std::abs(hx)));
            if (residual > out.worst_residual) out.worst_residual = residual;
            if (residual > rtol && out.kind != NormalizerResult::Kind::NotNormalizer) {
                out.kind = NormalizerResult::Kind::NotNormalizer;
                out.witness = p;
                out.detail = "no single h satisfies all components of [Y,X] = h X";
            }
        }
        out.points.push_back(std::move(p));
        out.h_values.push_back(h);
    }
    if (out.points.size() < box.count()) {
        if (degenerate > 0) {
            throw DegenerateDirectionError("X is below the direction threshold at " + std::to_string(degenerate) +
                                           " sample points");
        }
        throw InsufficientSamplesError(out.points.size(), box.count());
    }
    return out;
}

}  // namespace hojman
