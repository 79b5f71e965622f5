#include "hojman/invariants.hpp"

namespace hojman {

std::string to_string(Construction c) {
    switch (c) {
        case Construction::DivergenceFree:
            return "divergence-free-symmetry";
        case Construction::Multiplier:
            return "multiplier-symmetry";
        case Construction::Normalizer:
            return "normalizer";
        case Construction::NonautonomousDivergenceFree:
            return "nonautonomous-divergence-free";
        case Construction::NonautonomousMultiplier:
            return "nonautonomous-multiplier";
        case Construction::ProlongedPointSymmetry:
            return "prolonged-point-symmetry";
    }
    return "unknown";
}

namespace {

void require(const EqualityReport& r, const std::string& which, const std::string& detail) {
    if (!r.equal) throw PreconditionViolation(which, r.worst_point, detail);
}

void require_divergence_free(const VectorField& x, const CheckOptions& opts) {
    require(is_zero_numeric(divergence(x), opts.box, opts.rtol), "div_free", "div(X) does not vanish");
}

void require_multiplier(const VectorField& x, const Multiplier& r, const CheckOptions& opts) {
    require(multiplier_report(x, r, opts.box, opts.rtol), "multiplier",
            "div(X) + X(log R) does not vanish, R is not a Jacobi multiplier");
}

void require_commuting(const VectorField& x, const VectorField& y, const CheckOptions& opts) {
    require(vanishes(lie_bracket(x, y), opts.box, opts.rtol), "commuting", "[X,Y] does not vanish");
}

void require_normalizer(const VectorField& x, const VectorField& y, const Expr& h, const CheckOptions& opts) {
    NormalizerResult nf = normalizer_factor(x, y, opts.box, opts.rtol, h);
    if (nf.kind == NormalizerResult::Kind::NotNormalizer) {
        throw InconsistentFactorError(nf.witness.value_or(Point{}), "[Y,X] != h X for h = " + render(h));
    }
}

// Y(log R), or 0 without a multiplier.
Expr log_term(const VectorField& y, const std::optional<Multiplier>& r) {
    return r ? lie_derivative(y, r->log_value()) : Expr(0.0);
}

InvariantResult make(Expr invariant, Construction c, const VectorField& x, const VectorField& y,
                     const std::optional<Multiplier>& r, std::optional<Expr> h) {
    InvariantResult out{simplify(invariant), c, x, y, std::nullopt, std::move(h), std::nullopt, {}};
    if (r) out.multiplier = r->value();
    return out;
}

}  // namespace

InvariantResult certify_result(InvariantResult result, const CheckOptions& opts) {
    result.certification = is_zero_numeric(lie_derivative(result.x, result.invariant), opts.box, opts.rtol);
    require(result.certification, "certification", "X(I) does not vanish on the working box");

    if (result.invariant.is_constant()) {
        result.constant_value = result.invariant.value();
    } else {
        Point first = retained_points({result.invariant}, opts.box).front();
        double v = eval(result.invariant, Bindings(first));
        if (equal_numeric(result.invariant, Expr(v), opts.box, opts.rtol).equal) result.constant_value = v;
    }
    return result;
}

InvariantResult invariant_divfree(const VectorField& x, const VectorField& y, const CheckOptions& opts) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("invariant_divfree: chart mismatch");
    require_divergence_free(x, opts);
    require_commuting(x, y, opts);
    return certify_result(make(divergence(y), Construction::DivergenceFree, x, y, std::nullopt, std::nullopt), opts);
}

InvariantResult invariant_multiplier(const VectorField& x, const VectorField& y, const Multiplier& r,
                                     const CheckOptions& opts) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("invariant_multiplier: chart mismatch");
    require_multiplier(x, r, opts);
    require_commuting(x, y, opts);
    Expr invariant = divergence(y) + log_term(y, r);
    return certify_result(make(invariant, Construction::Multiplier, x, y, r, std::nullopt), opts);
}

InvariantResult invariant_normalizer(const VectorField& x, const VectorField& y, const std::optional<Multiplier>& r,
                                     const Expr& h, const CheckOptions& opts) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("invariant_normalizer: chart mismatch");
    require_normalizer(x, y, h, opts);
    if (r) {
        require_multiplier(x, *r, opts);
    } else {
        require_divergence_free(x, opts);
    }
    Expr invariant = divergence(y) + log_term(y, r) + h;
    return certify_result(make(invariant, Construction::Normalizer, x, y, r, simplify(h)), opts);
}

InvariantResult invariant_nonautonomous(const VectorField& x, const VectorField& y,
                                        const std::optional<Multiplier>& r, const CheckOptions& opts) {
    if (!(x.chart() == y.chart())) throw ChartMismatchError("invariant_nonautonomous: chart mismatch");
    x.chart().time();
    if (!x.nsode()) {
        throw PreconditionViolation("time_component", Point{}, "time component of X must be the constant 1");
    }
    Expr x_of_y0 = lie_derivative(x, y[0]);
    Expr h = simplify(-x_of_y0);
    require_normalizer(x, y, h, opts);
    if (r) {
        require_multiplier(x, *r, opts);
    } else {
        require_divergence_free(x, opts);
    }
    Expr invariant = divergence(y) + log_term(y, r) - x_of_y0;
    Construction c = r ? Construction::NonautonomousMultiplier : Construction::NonautonomousDivergenceFree;
    return certify_result(make(invariant, c, x, y, r, h), opts);
}

}  // namespace hojman
