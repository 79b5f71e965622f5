#include "hojman/mechanics.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace hojman {

namespace {

constexpr double kRegularityThreshold = 1e-10;

void require_variables(const Expr& e, const std::set<std::string>& allowed, const std::string& what) {
    for (const auto& v : e.variables()) {
        if (!allowed.count(v)) throw std::invalid_argument(what + " uses '" + v + "', which is not allowed here");
    }
}

ExprMatrix minor_of(const ExprMatrix& m, std::size_t col) {
    ExprMatrix out;
    for (std::size_t r = 1; r < m.size(); ++r) {
        std::vector<Expr> row;
        for (std::size_t c = 0; c < m.size(); ++c) {
            if (c != col) row.push_back(m[r][c]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

std::string velocity_name(const std::string& base) { return "v_" + base; }

SecondOrderSystem::SecondOrderSystem(std::vector<std::string> base, std::vector<Expr> forces, bool time_dependent,
                                     std::vector<std::string> velocities)
    : base_(std::move(base)), velocities_(std::move(velocities)), forces_(std::move(forces)),
      time_dependent_(time_dependent) {
    if (base_.empty()) throw std::invalid_argument("second-order system needs at least one coordinate");
    if (velocities_.empty()) {
        for (const auto& b : base_) velocities_.push_back(velocity_name(b));
    }
    if (velocities_.size() != base_.size() || forces_.size() != base_.size()) {
        throw std::invalid_argument("second-order system: coordinate, velocity and force counts differ");
    }
    Chart check = chart();
    std::set<std::string> allowed(check.coords().begin(), check.coords().end());
    for (const auto& f : forces_) require_variables(f, allowed, "force '" + render(f) + "'");
}

Chart SecondOrderSystem::chart() const {
    std::vector<std::string> coords;
    if (time_dependent_) coords.push_back(kTimeName);
    coords.insert(coords.end(), base_.begin(), base_.end());
    coords.insert(coords.end(), velocities_.begin(), velocities_.end());
    return Chart(std::move(coords), time_dependent_);
}

SecondOrderSystem SecondOrderSystem::with_time() const {
    return SecondOrderSystem(base_, forces_, true, velocities_);
}

VectorField sode_lift(const SecondOrderSystem& sys) {
    std::vector<Expr> comps;
    if (sys.time_dependent()) comps.emplace_back(1.0);
    for (const auto& v : sys.velocities()) comps.push_back(Expr::variable(v));
    for (const auto& f : sys.forces()) comps.push_back(f);
    return VectorField(sys.chart(), std::move(comps));
}

Expr determinant(const ExprMatrix& m) {
    if (m.empty()) return Expr(1.0);
    if (m.size() == 1) return m[0][0];
    if (m.size() == 2) return simplify(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    Expr sum(0.0);
    for (std::size_t c = 0; c < m.size(); ++c) {
        if (m[0][c].is_constant(0.0)) continue;
        Expr term = m[0][c] * determinant(minor_of(m, c));
        sum = c % 2 == 0 ? sum + term : sum - term;
    }
    return simplify(sum);
}

LagrangianData lagrangian_analyze(const Expr& lagrangian, std::vector<std::string> base, bool time_dependent,
                                  const CheckOptions& opts) {
    const std::size_t n = base.size();
    if (n == 0) throw std::invalid_argument("Lagrangian needs at least one coordinate");
    if (n > kMaxLagrangianDimension) {
        throw DimensionTooLarge("Lagrangian analysis supports at most " + std::to_string(kMaxLagrangianDimension) +
                                " degrees of freedom, got " + std::to_string(n));
    }
    std::vector<std::string> vel;
    for (const auto& b : base) vel.push_back(velocity_name(b));
    {
        std::set<std::string> allowed(base.begin(), base.end());
        allowed.insert(vel.begin(), vel.end());
        if (time_dependent) allowed.insert(kTimeName);
        require_variables(lagrangian, allowed, "Lagrangian");
    }

    std::vector<Expr> dl_dv;
    for (const auto& v : vel) dl_dv.push_back(diff(lagrangian, v));
    ExprMatrix w(n, std::vector<Expr>(n));
    ExprMatrix a(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w[i][j] = diff(dl_dv[i], vel[j]);
            a[i][j] = diff(dl_dv[j], base[i]);
        }
    }
    Expr det = determinant(w);
    if (det.is_constant() && std::abs(det.value()) <= kRegularityThreshold) {
        throw DegenerateLagrangian(Point{}, "det W is identically " + render(det));
    }
    for (const auto& p : retained_points({det}, opts.box)) {
        double value = eval(det, Bindings(p));
        if (std::abs(value) <= kRegularityThreshold) {
            throw DegenerateLagrangian(p, "det W = " + std::to_string(value) + " at a sample point");
        }
    }

    std::vector<Expr> rhs;
    for (std::size_t i = 0; i < n; ++i) {
        Expr r = diff(lagrangian, base[i]);
        for (std::size_t j = 0; j < n; ++j) r = r - a[j][i] * Expr::variable(vel[j]);
        if (time_dependent) r = r - diff(dl_dv[i], kTimeName);
        rhs.push_back(simplify(r));
    }

    std::vector<Expr> forces;
    for (std::size_t k = 0; k < n; ++k) {
        if (n == 1) {
            forces.push_back(simplify(rhs[0] / det));
            continue;
        }
        ExprMatrix replaced = w;
        for (std::size_t i = 0; i < n; ++i) replaced[i][k] = rhs[i];
        forces.push_back(simplify(determinant(replaced) / det));
    }

    Expr energy = -lagrangian;
    for (std::size_t i = 0; i < n; ++i) energy = Expr::variable(vel[i]) * dl_dv[i] + energy;

    LagrangianData ld{lagrangian,
                      SecondOrderSystem(base, std::move(forces), time_dependent, vel),
                      std::move(w),
                      std::move(a),
                      det,
                      simplify(energy)};

    for (const auto& residual : euler_lagrange_residuals(ld)) {
        EqualityReport r = is_zero_numeric(residual, opts.box, opts.rtol);
        if (!r.equal) throw CertificationFailure(r.worst_point, "derived forces fail the Euler-Lagrange equations");
    }
    return ld;
}

std::vector<Expr> euler_lagrange_residuals(const LagrangianData& ld) {
    const auto& sys = ld.system;
    std::vector<Expr> out;
    for (std::size_t i = 0; i < sys.n(); ++i) {
        Expr r(0.0);
        for (std::size_t j = 0; j < sys.n(); ++j) {
            r = r + ld.hessian[i][j] * sys.forces()[j] + ld.mixed[j][i] * Expr::variable(sys.velocities()[j]);
        }
        if (sys.time_dependent()) r = r + diff(diff(ld.lagrangian, sys.velocities()[i]), kTimeName);
        r = r - diff(ld.lagrangian, sys.base()[i]);
        out.push_back(simplify(r));
    }
    return out;
}

LagrangianMultiplier lagrangian_multiplier(const LagrangianData& ld, const CheckOptions& opts,
                                           const std::optional<Chart>& chart) {
    SecondOrderSystem sys = ld.system;
    if (chart && chart->has_time() && !sys.time_dependent()) sys = sys.with_time();
    if (chart && !(*chart == sys.chart())) throw ChartMismatchError("lagrangian_multiplier: chart mismatch");

    bool any_positive = false;
    bool any_negative = false;
    Point crossing;
    for (const auto& p : retained_points({ld.hessian_det}, opts.box)) {
        double value = eval(ld.hessian_det, Bindings(p));
        if (value > 0.0) any_positive = true;
        if (value <= 0.0) {
            any_negative = true;
            crossing = p;
        }
    }
    if (any_positive && any_negative) throw DegenerateLagrangian(crossing, "det W changes sign on the working box");

    bool negated = any_negative;
    Expr r = negated ? simplify(-ld.hessian_det) : ld.hessian_det;
    Multiplier m(sys.chart(), r, opts.box);
    EqualityReport check = multiplier_report(sode_lift(sys), m, opts.box, opts.rtol);
    if (!check.equal) throw CertificationFailure(check.worst_point, "det W is not a Jacobi multiplier of the dynamics");
    return {std::move(m), negated};
}

VectorField prolong(const PointField& pf, const SecondOrderSystem& sys) {
    SecondOrderSystem evo = sys.with_time();
    if (pf.components.size() != evo.n()) {
        throw std::invalid_argument("point field has " + std::to_string(pf.components.size()) +
                                    " spatial components for a system with " + std::to_string(evo.n()));
    }
    std::set<std::string> allowed(evo.base().begin(), evo.base().end());
    allowed.insert(kTimeName);
    require_variables(pf.time_component, allowed, "point field (velocity-free)");
    for (const auto& c : pf.components) require_variables(c, allowed, "point field (velocity-free)");

    VectorField gamma = sode_lift(evo);
    Expr gamma_x0 = lie_derivative(gamma, pf.time_component);
    std::vector<Expr> comps{pf.time_component};
    for (const auto& c : pf.components) comps.push_back(c);
    for (std::size_t i = 0; i < evo.n(); ++i) {
        Expr v = Expr::variable(evo.velocities()[i]);
        comps.push_back(simplify(lie_derivative(gamma, pf.components[i]) - v * gamma_x0));
    }
    return VectorField(evo.chart(), std::move(comps));
}

Expr prolonged_divergence_formula(const PointField& pf, const SecondOrderSystem& sys) {
    SecondOrderSystem evo = sys.with_time();
    VectorField gamma = sode_lift(evo);
    Expr sum(0.0);
    for (std::size_t i = 0; i < evo.n(); ++i) {
        const auto& x = evo.base()[i];
        sum = sum + diff(pf.components[i], x) - Expr::variable(evo.velocities()[i]) * diff(pf.time_component, x);
    }
    double n = static_cast<double>(evo.n());
    return simplify(Expr(2.0) * sum - Expr(n - 1.0) * lie_derivative(gamma, pf.time_component));
}

SodeSymmetryReport sode_symmetry_conditions(const VectorField& y, const VectorField& gamma, const SampleBox& box,
                                            double rtol) {
    if (!(y.chart() == gamma.chart())) throw ChartMismatchError("sode_symmetry_conditions: chart mismatch");
    const auto& coords = gamma.chart().coords();
    if (!gamma.nsode() || coords.size() % 2 == 0) {
        throw std::invalid_argument("sode_symmetry_conditions: Gamma must be d/dt + v d/dx + F d/dv on (t, x, v)");
    }
    const std::size_t n = (coords.size() - 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        if (!gamma[1 + i].is_variable(coords[1 + n + i])) {
            throw std::invalid_argument("sode_symmetry_conditions: component " + coords[1 + i] + " of Gamma must be " +
                                        coords[1 + n + i]);
        }
    }

    auto g = [&](const Expr& f) { return lie_derivative(gamma, f); };
    SodeSymmetryReport out;
    const Expr& y0 = y[0];
    Expr g_y0 = g(y0);
    Expr gg_y0 = g(g_y0);
    out.h = simplify(-g_y0);

    out.commuting_checks.push_back({"Gamma(Y0) = 0", is_zero_numeric(g_y0, box, rtol)});
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& xi = coords[1 + i];
        const Expr& yi = y[1 + i];
        const Expr& ybar = y[1 + n + i];
        const Expr& force = gamma[1 + n + i];
        Expr v = Expr::variable(coords[1 + n + i]);
        Expr g_yi = g(yi);
        Expr gg_yi = g(g_yi);
        Expr y_f = lie_derivative(y, force);

        out.commuting_checks.push_back({"Ybar_" + xi + " = Gamma(Y_" + xi + ")", equal_numeric(ybar, g_yi, box, rtol)});
        out.commuting_checks.push_back(
            {"Gamma(Gamma(Y_" + xi + ")) = Y(F_" + xi + ")", equal_numeric(gg_yi, y_f, box, rtol)});
        out.normalizer_checks.push_back({"Ybar_" + xi + " = Gamma(Y_" + xi + ") - Gamma(Y0) v_" + xi,
                                         equal_numeric(ybar, g_yi - g_y0 * v, box, rtol)});
        out.normalizer_checks.push_back(
            {"Y(F_" + xi + ") = Gamma(Gamma(Y_" + xi + ")) - 2 Gamma(Y0) F - Gamma(Gamma(Y0)) v",
             equal_numeric(y_f, gg_yi - Expr(2.0) * g_y0 * force - gg_y0 * v, box, rtol)});
    }
    auto all_hold = [](const std::vector<NamedCheck>& checks) {
        for (const auto& c : checks) {
            if (!c.report.equal) return false;
        }
        return true;
    };
    out.commuting = all_hold(out.commuting_checks);
    out.normalizer = all_hold(out.normalizer_checks);

    out.bracket_route = normalizer_factor(gamma, y, box, rtol);
    using Kind = NormalizerResult::Kind;
    out.routes_agree = out.commuting == (out.bracket_route.kind == Kind::Commuting) &&
                       out.normalizer == (out.bracket_route.kind != Kind::NotNormalizer);
    return out;
}

LagrangianInvariant hojman_invariant_lagrangian(const PointField& pf, const LagrangianData& ld,
                                                const CheckOptions& opts) {
    SecondOrderSystem evo = ld.system.with_time();
    VectorField gamma = sode_lift(evo);
    VectorField x1 = prolong(pf, ld.system);

    NormalizerResult nf = normalizer_factor(gamma, x1, opts.box, opts.rtol);
    if (nf.kind == NormalizerResult::Kind::NotNormalizer) {
        throw PreconditionViolation("normalizer", nf.witness.value_or(Point{}),
                                    "prolonged field does not normalize the dynamics: " + nf.detail);
    }
    LagrangianMultiplier lm = lagrangian_multiplier(ld, opts, evo.chart());

    Expr gamma_x0 = lie_derivative(gamma, pf.time_component);
    Expr h = simplify(-gamma_x0);
    Expr sum(0.0);
    for (std::size_t i = 0; i < evo.n(); ++i) {
        const auto& x = evo.base()[i];
        sum = sum + diff(pf.components[i], x) - Expr::variable(evo.velocities()[i]) * diff(pf.time_component, x);
    }
    Expr closed = Expr(2.0) * sum - Expr(static_cast<double>(evo.n())) * gamma_x0 +
                  lie_derivative(x1, lm.multiplier.log_value());

    InvariantResult result{simplify(closed), Construction::ProlongedPointSymmetry, gamma, x1,
                           lm.multiplier.value(), h, std::nullopt, {}};
    result = certify_result(std::move(result), opts);

    InvariantResult generic = invariant_normalizer(gamma, x1, lm.multiplier, h, opts);
    EqualityReport agreement = equal_numeric(result.invariant, generic.invariant, opts.box, opts.rtol);
    if (!agreement.equal) {
        throw CertificationFailure(agreement.worst_point, "closed-form invariant disagrees with the normalizer route");
    }
    return {std::move(result), std::move(x1), agreement};
}

VectorField hamiltonian_field(const Expr& h, const std::vector<std::string>& q, const std::vector<std::string>& p,
                              bool time_dependent) {
    if (q.size() != p.size()) throw std::invalid_argument("hamiltonian_field: q and p differ in length");
    std::vector<std::string> coords;
    std::vector<Expr> comps;
    if (time_dependent) {
        coords.push_back(kTimeName);
        comps.emplace_back(1.0);
    }
    coords.insert(coords.end(), q.begin(), q.end());
    coords.insert(coords.end(), p.begin(), p.end());
    for (const auto& pi : p) comps.push_back(diff(h, pi));
    for (const auto& qi : q) comps.push_back(simplify(-diff(h, qi)));
    return VectorField(Chart(std::move(coords), time_dependent), std::move(comps));
}

InvariantResult hamiltonian_invariant(const VectorField& x, const VectorField& y, const std::optional<Multiplier>& r,
                                      const std::optional<Expr>& h, const CheckOptions& opts) {
    if (x.chart().has_time() && x.nsode()) return invariant_nonautonomous(x, y, r, opts);
    if (h) return invariant_normalizer(x, y, r, *h, opts);
    if (r) return invariant_multiplier(x, y, *r, opts);
    return invariant_divfree(x, y, opts);
}

Expr hamiltonian_nonautonomous_formula(const VectorField& x, const VectorField& y, const Expr& r) {
    const auto& coords = x.chart().coords();
    Expr sum(0.0);
    for (std::size_t k = 0; k < coords.size(); ++k) sum = sum + diff(r * y[k], coords[k]) / r;
    return simplify(sum - lie_derivative(x, y[0]));
}

}  // namespace hojman
