#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "hojman/mechanics.hpp"

using namespace hojman;
using hojman::testing::Gen;
using hojman::testing::numbered;
using hojman::testing::uniform_box;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

void expect_same(const Expr& a, const Expr& b, const SampleBox& box, double rtol = kDefaultRtol) {
    EqualityReport r = equal_numeric(a, b, box, rtol);
    EXPECT_TRUE(r.equal) << render(a) << " vs " << render(b) << " residual " << r.worst_residual;
}

CheckOptions opts_for(SampleBox box) { return CheckOptions{std::move(box), kDefaultRtol}; }

// Box over (t, x..., v_x...).
SampleBox evolution_box(const std::vector<std::string>& base, std::uint64_t seed, double lo = -1, double hi = 1) {
    std::vector<std::string> names{kTimeName};
    for (const auto& b : base) names.push_back(b);
    for (const auto& b : base) names.push_back(velocity_name(b));
    return uniform_box(names, lo, hi, seed);
}

LagrangianData analyze(const std::string& l, bool time_dependent, std::uint64_t seed = 1) {
    return lagrangian_analyze(P(l), {"x"}, time_dependent, opts_for(evolution_box({"x"}, seed)));
}

}  // namespace

TEST(SecondOrder, Validation) {
    EXPECT_EQ(velocity_name("q"), "v_q");
    EXPECT_THROW(SecondOrderSystem({"x"}, {P("y")}, false), std::invalid_argument);
    EXPECT_THROW(SecondOrderSystem({"x"}, {P("t")}, false), std::invalid_argument);
    EXPECT_NO_THROW(SecondOrderSystem({"x"}, {P("t*v_x")}, true));
    EXPECT_THROW(SecondOrderSystem({"x", "y"}, {P("x")}, false), std::invalid_argument);
}

TEST(SecondOrder, Lift) {
    SecondOrderSystem sys({"x"}, {P("-x")}, false);
    VectorField g = sode_lift(sys);
    EXPECT_EQ(g.chart().coords(), (std::vector<std::string>{"x", "v_x"}));
    EXPECT_EQ(render(g[0]), "v_x");
    EXPECT_EQ(render(g[1]), "-x");

    VectorField gt = sode_lift(sys.with_time());
    EXPECT_EQ(gt.chart().coords(), (std::vector<std::string>{"t", "x", "v_x"}));
    EXPECT_TRUE(gt.nsode());
    EXPECT_EQ(render(gt[2]), "-x");
}

TEST(Determinant, Examples) {
    ExprMatrix m{{P("a"), P("b")}, {P("c"), P("d")}};
    Bindings b{{"a", 2}, {"b", 3}, {"c", 5}, {"d", 7}};
    EXPECT_DOUBLE_EQ(eval(determinant(m), b), 2 * 7 - 3 * 5);
    ExprMatrix m3{{P("2"), P("0"), P("1")}, {P("1"), P("3"), P("2")}, {P("1"), P("1"), P("1")}};
    // 2(3-2) - 0 + 1(1-3)
    EXPECT_DOUBLE_EQ(eval(determinant(m3), {}), 0.0);
}

TEST(LagrangianAnalyze, Oscillator) {
    LagrangianData ld = analyze("v_x^2/2 - x^2/2", false);
    EXPECT_EQ(render(ld.system.forces()[0]), "-x");
    EXPECT_EQ(render(ld.hessian_det), "1");
    expect_same(ld.energy, P("(v_x^2 + x^2)/2"), evolution_box({"x"}, 2));
}

TEST(LagrangianAnalyze, CaldirolaKanai) {
    LagrangianData ld = analyze("exp(2*t)*(v_x^2/2 - x^2/2)", true);
    EXPECT_EQ(render(ld.hessian_det), "exp(2*t)");
    expect_same(ld.system.forces()[0], P("-x - 2*v_x"), evolution_box({"x"}, 3));
}

TEST(LagrangianAnalyze, Quartic) {
    LagrangianData ld = lagrangian_analyze(P("v_x^4/4"), {"x"}, false,
                                           opts_for(uniform_box({"x", "v_x"}, 0.5, 2, 4)));
    expect_same(ld.hessian_det, P("3*v_x^2"), uniform_box({"x", "v_x"}, 0.5, 2, 4));
    EXPECT_TRUE(ld.system.forces()[0].is_constant(0.0));
}

TEST(LagrangianAnalyze, CentralForceInTwoDimensions) {
    // Kepler-like: F = -x / r^3
    SampleBox box = uniform_box({"x", "y", "v_x", "v_y"}, 0.5, 1.5, 5);
    LagrangianData ld = lagrangian_analyze(P("(v_x^2 + v_y^2)/2 + 1/sqrt(x^2 + y^2)"), {"x", "y"}, false, opts_for(box));
    expect_same(ld.system.forces()[0], P("-x/(x^2 + y^2)^(3/2)"), box);
    expect_same(ld.system.forces()[1], P("-y/(x^2 + y^2)^(3/2)"), box);
    for (const auto& r : euler_lagrange_residuals(ld)) EXPECT_TRUE(is_zero_numeric(r, box).equal);
}

TEST(LagrangianAnalyze, Rejections) {
    EXPECT_THROW(analyze("x*v_x", false), DegenerateLagrangian);
    EXPECT_THROW(analyze("x^2", false), DegenerateLagrangian);
    EXPECT_THROW(analyze("v_x^2 + t", false), std::invalid_argument);
    std::vector<std::string> five = numbered("q", 5);
    Expr l(0.0);
    for (const auto& q : five) l = l + pow(Expr::variable(velocity_name(q)), Expr(2.0));
    try {
        lagrangian_analyze(l, five, false, opts_for(evolution_box(five, 6)));
        FAIL();
    } catch (const DimensionTooLarge& e) {
        EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
    }
}

TEST(LagrangianMultiplier, Examples) {
    SampleBox box = evolution_box({"x"}, 7);
    LagrangianData osc = analyze("v_x^2/2 - x^2/2", false);
    LagrangianMultiplier m = lagrangian_multiplier(osc, opts_for(box));
    EXPECT_FALSE(m.negated);
    EXPECT_EQ(render(m.multiplier.value()), "1");

    LagrangianData neg = analyze("-(v_x^2)/2", false);
    LagrangianMultiplier mn = lagrangian_multiplier(neg, opts_for(box));
    EXPECT_TRUE(mn.negated);
    EXPECT_EQ(render(mn.multiplier.value()), "1");

    LagrangianData ck = analyze("exp(2*t)*(v_x^2/2 - x^2/2)", true);
    LagrangianMultiplier mc = lagrangian_multiplier(ck, opts_for(box));
    EXPECT_EQ(render(mc.multiplier.value()), "exp(2*t)");
    EXPECT_TRUE(mc.multiplier.chart().has_time());
}

TEST(LagrangianMultiplier, SignChangeIsDegenerate) {
    LagrangianData cubic = analyze("v_x^3/6", false);
    EXPECT_THROW(lagrangian_multiplier(cubic, opts_for(evolution_box({"x"}, 8))), DegenerateLagrangian);
}

TEST(Prolong, Examples) {
    SecondOrderSystem free({"x"}, {P("0")}, false);
    VectorField dt = prolong(PointField{P("1"), {P("0")}}, free);
    EXPECT_EQ(dt.chart().coords(), (std::vector<std::string>{"t", "x", "v_x"}));
    EXPECT_EQ(render(dt[2]), "0");

    VectorField dil = prolong(PointField{P("0"), {P("x")}}, free);
    EXPECT_EQ(render(dil[2]), "v_x");

    VectorField tt = prolong(PointField{P("t"), {P("0")}}, free);
    EXPECT_EQ(render(tt[0]), "t");
    EXPECT_EQ(render(tt[2]), "-v_x");

    VectorField boost = prolong(PointField{P("0"), {P("t")}}, free);
    EXPECT_EQ(render(boost[2]), "1");

    EXPECT_THROW(prolong(PointField{P("v_x"), {P("0")}}, free), std::invalid_argument);
    EXPECT_THROW(prolong(PointField{P("0"), {P("0"), P("0")}}, free), std::invalid_argument);
}

TEST(SodeConditions, GammaIsItsOwnSymmetry) {
    SecondOrderSystem osc({"x"}, {P("-x")}, true);
    VectorField g = sode_lift(osc);
    SodeSymmetryReport r = sode_symmetry_conditions(g, g, evolution_box({"x"}, 9));
    EXPECT_TRUE(r.commuting);
    EXPECT_TRUE(r.normalizer);
    EXPECT_TRUE(r.routes_agree);
    EXPECT_EQ(r.bracket_route.kind, NormalizerResult::Kind::Commuting);
}

TEST(SodeConditions, OscillatorDilation) {
    SecondOrderSystem osc({"x"}, {P("-x")}, false);
    VectorField y = prolong(PointField{P("0"), {P("x")}}, osc);
    SodeSymmetryReport r = sode_symmetry_conditions(y, sode_lift(osc.with_time()), evolution_box({"x"}, 10));
    EXPECT_TRUE(r.commuting);
    EXPECT_TRUE(r.routes_agree);
    ASSERT_EQ(r.commuting_checks.size(), 3u);
    EXPECT_EQ(r.commuting_checks[0].name, "Gamma(Y0) = 0");
}

TEST(SodeConditions, FreeParticleTimeDilationNormalizes) {
    SecondOrderSystem free({"x"}, {P("0")}, false);
    VectorField y = prolong(PointField{P("t"), {P("0")}}, free);
    SodeSymmetryReport r = sode_symmetry_conditions(y, sode_lift(free.with_time()), evolution_box({"x"}, 11));
    EXPECT_FALSE(r.commuting);
    EXPECT_TRUE(r.normalizer);
    EXPECT_EQ(render(r.h), "-1");
    EXPECT_TRUE(r.routes_agree);
    EXPECT_EQ(r.bracket_route.kind, NormalizerResult::Kind::Normalizer);
}

TEST(SodeConditions, NonSymmetryFailsBothRoutes) {
    SecondOrderSystem osc({"x"}, {P("-x")}, false);
    VectorField y = prolong(PointField{P("0"), {P("x^2")}}, osc);
    SodeSymmetryReport r = sode_symmetry_conditions(y, sode_lift(osc.with_time()), evolution_box({"x"}, 12));
    EXPECT_FALSE(r.commuting);
    EXPECT_FALSE(r.normalizer);
    EXPECT_TRUE(r.routes_agree);
}

TEST(SodeConditions, RejectsNonLift) {
    Chart c({"t", "x", "v_x"}, true);
    VectorField g(c, {P("1"), P("x"), P("0")});
    EXPECT_THROW(sode_symmetry_conditions(g, g, evolution_box({"x"}, 13)), std::invalid_argument);
}

TEST(LagrangianInvariant, CaldirolaKanaiTimeTranslation) {
    LagrangianData ld = analyze("exp(2*t)*(v_x^2/2 - x^2/2)", true);
    LagrangianInvariant li = hojman_invariant_lagrangian(PointField{P("1"), {P("0")}}, ld,
                                                         opts_for(evolution_box({"x"}, 14)));
    EXPECT_EQ(render(li.result.invariant), "2");
    EXPECT_TRUE(li.route_agreement.equal);
    EXPECT_EQ(li.result.construction, Construction::ProlongedPointSymmetry);
}

TEST(LagrangianInvariant, OscillatorDilation) {
    LagrangianData ld = analyze("v_x^2/2 - x^2/2", false);
    LagrangianInvariant li =
        hojman_invariant_lagrangian(PointField{P("0"), {P("x")}}, ld, opts_for(evolution_box({"x"}, 15)));
    EXPECT_EQ(render(li.result.invariant), "2");
}

TEST(LagrangianInvariant, FreeParticleTimeDilation) {
    LagrangianData ld = analyze("v_x^2/2", false);
    LagrangianInvariant li =
        hojman_invariant_lagrangian(PointField{P("t"), {P("0")}}, ld, opts_for(evolution_box({"x"}, 16)));
    EXPECT_EQ(render(li.result.invariant), "-1");
    ASSERT_TRUE(li.result.h);
    EXPECT_EQ(render(*li.result.h), "-1");
}

TEST(LagrangianInvariant, QuarticBoost) {
    SampleBox box = evolution_box({"x"}, 17).with_interval("v_x", {0.5, 2});
    LagrangianData ld = lagrangian_analyze(P("v_x^4/4"), {"x"}, false, opts_for(box));
    LagrangianInvariant li = hojman_invariant_lagrangian(PointField{P("0"), {P("t")}}, ld, opts_for(box));
    expect_same(li.result.invariant, P("2/v_x"), box);
}

TEST(LagrangianInvariant, RejectsNonSymmetry) {
    LagrangianData ld = analyze("v_x^2/2 - x^2/2", false);
    try {
        hojman_invariant_lagrangian(PointField{P("0"), {P("x^2")}}, ld, opts_for(evolution_box({"x"}, 18)));
        FAIL();
    } catch (const PreconditionViolation& e) {
        EXPECT_EQ(e.which(), "normalizer");
    }
}

TEST(Hamiltonian, OscillatorDilation) {
    VectorField x = hamiltonian_field(P("(p^2 + q^2)/2"), {"q"}, {"p"});
    EXPECT_EQ(render(x[0]), "p");
    EXPECT_EQ(render(x[1]), "-q");
    VectorField y(x.chart(), {P("q"), P("p")});
    InvariantResult r = hamiltonian_invariant(x, y, std::nullopt, std::nullopt, opts_for(uniform_box({"q", "p"}, -2, 2, 19)));
    EXPECT_EQ(render(r.invariant), "2");
    EXPECT_EQ(r.construction, Construction::DivergenceFree);
}

TEST(Hamiltonian, DispatchesOnIngredients) {
    VectorField x = hamiltonian_field(P("p^2/2"), {"q"}, {"p"}, true);
    EXPECT_TRUE(x.nsode());
    VectorField y(x.chart(), {P("0"), P("q"), P("p")});
    SampleBox box = uniform_box({"t", "q", "p"}, -1, 1, 20);
    InvariantResult r = hamiltonian_invariant(x, y, std::nullopt, std::nullopt, opts_for(box));
    EXPECT_EQ(r.construction, Construction::NonautonomousDivergenceFree);
    EXPECT_EQ(render(r.invariant), "2");
}

TEST(Hamiltonian, NonautonomousFormulaAgrees) {
    // R = 1 + p^2 is a multiplier of the free flow since it depends on p only
    VectorField x = hamiltonian_field(P("p^2/2"), {"q"}, {"p"}, true);
    VectorField y(x.chart(), {P("0"), P("q"), P("p")});
    SampleBox box = uniform_box({"t", "q", "p"}, -1, 1, 21);
    Multiplier r(x.chart(), P("1 + p^2"), box);
    InvariantResult res = hamiltonian_invariant(x, y, r, std::nullopt, opts_for(box));
    EXPECT_EQ(res.construction, Construction::NonautonomousMultiplier);
    expect_same(res.invariant, P("2 + 2*p^2/(1 + p^2)"), box);
    expect_same(res.invariant, hamiltonian_nonautonomous_formula(x, y, r.value()), box);
}

// Properties over generated Lagrangians and point fields.

class RandomLagrangian : public ::testing::TestWithParam<int> {};

TEST_P(RandomLagrangian, EulerLagrangeMultiplierAndEnergy) {
    Gen g(900 + GetParam());
    std::size_t n = static_cast<std::size_t>(1 + GetParam() % 3);
    bool timed = GetParam() % 2 == 1;
    std::vector<std::string> base = numbered("q", n);
    Expr l = g.kinetic_lagrangian(base, timed);
    SampleBox box = evolution_box(base, 1000 + GetParam());
    CheckOptions o = opts_for(box);
    LagrangianData ld = lagrangian_analyze(l, base, timed, o);

    // d/dt dL/dv = dL/dx along the lifted flow, computed independently
    VectorField gamma = sode_lift(ld.system.with_time());
    for (std::size_t i = 0; i < n; ++i) {
        Expr lhs = lie_derivative(gamma, diff(l, velocity_name(base[i])));
        expect_same(lhs, diff(l, base[i]), box, 1e-8);
    }

    LagrangianMultiplier lm = lagrangian_multiplier(ld, o, gamma.chart());
    EXPECT_FALSE(lm.negated);
    Expr scaled_div(0.0);
    const auto& coords = gamma.chart().coords();
    for (std::size_t k = 0; k < coords.size(); ++k) scaled_div = scaled_div + diff(lm.multiplier.value() * gamma[k], coords[k]);
    EXPECT_TRUE(is_zero_numeric(scaled_div, box, 1e-8).equal) << "n=" << n;

    if (!timed) EXPECT_TRUE(is_zero_numeric(lie_derivative(gamma, ld.energy), box, 1e-8).equal);
}

INSTANTIATE_TEST_SUITE_P(Generated, RandomLagrangian, ::testing::Range(0, 12));

class RandomPointField : public ::testing::TestWithParam<int> {};

TEST_P(RandomPointField, ProlongationIgnoresForcesAndDivergenceExpands) {
    Gen g(1100 + GetParam());
    std::size_t n = static_cast<std::size_t>(1 + GetParam() % 3);
    std::vector<std::string> base = numbered("q", n);
    PointField pf = g.point_field(base, 2);
    std::vector<std::string> vars{kTimeName};
    for (const auto& b : base) vars.push_back(b);
    for (const auto& b : base) vars.push_back(velocity_name(b));
    std::vector<Expr> f1, f2;
    for (std::size_t i = 0; i < n; ++i) {
        f1.push_back(g.smooth(vars, 2));
        f2.push_back(g.smooth(vars, 2));
    }
    SecondOrderSystem s1(base, f1, true), s2(base, f2, true);
    VectorField p1 = prolong(pf, s1), p2 = prolong(pf, s2);
    SampleBox box = evolution_box(base, 1200 + GetParam());
    for (std::size_t k = 0; k < p1.dim(); ++k) expect_same(p1[k], p2[k], box);
    expect_same(divergence(p1), prolonged_divergence_formula(pf, s1), box);
}

INSTANTIATE_TEST_SUITE_P(Generated, RandomPointField, ::testing::Range(0, 20));

class FreeParticleFamily : public ::testing::TestWithParam<int> {};

// Point symmetries of the free particle: a d/dt + b (2t d/dt + x d/dx)
// + c (t^2 d/dt + t x d/dx) + k x d/dx + boosts and translations; I = 2 n k.
TEST_P(FreeParticleFamily, RoutesAgree) {
    Gen g(1300 + GetParam());
    std::size_t n = static_cast<std::size_t>(1 + GetParam() % 2);
    std::vector<std::string> base = numbered("q", n);
    Expr l(0.0);
    for (const auto& b : base) l = l + pow(Expr::variable(velocity_name(b)), Expr(2.0)) / Expr(2.0);
    double a = g.real(-1, 1), b = g.real(-1, 1), c = g.real(-1, 1), k = g.real(-1, 1);
    Expr t = Expr::variable(kTimeName);
    PointField pf{Expr(a) + Expr(2 * b) * t + Expr(c) * t * t, {}};
    for (const auto& q : base) {
        pf.components.push_back((Expr(b + k) + Expr(c) * t) * Expr::variable(q) + Expr(g.real(-1, 1)) * t +
                                Expr(g.real(-1, 1)));
    }
    SampleBox box = evolution_box(base, 1400 + GetParam());
    LagrangianData ld = lagrangian_analyze(l, base, false, opts_for(box));
    LagrangianInvariant li = hojman_invariant_lagrangian(pf, ld, opts_for(box));
    EXPECT_TRUE(li.route_agreement.equal);
    ASSERT_TRUE(li.result.constant_value);
    EXPECT_NEAR(*li.result.constant_value, 2.0 * static_cast<double>(n) * k, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Generated, FreeParticleFamily, ::testing::Range(0, 20));
