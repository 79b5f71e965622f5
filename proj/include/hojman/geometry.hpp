#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hojman/expr.hpp"
#include "hojman/sampling.hpp"

namespace hojman {

/// Ordered coordinate list. The volume form is always the coordinate volume
/// form dx^1 ^ ... ^ dx^n of the chart. When a time coordinate is present it
/// is the first coordinate.
class Chart {
public:
    /// Throws std::invalid_argument on empty, duplicate or invalid names.
    explicit Chart(std::vector<std::string> coords, bool has_time = false);

    const std::vector<std::string>& coords() const noexcept { return coords_; }
    std::size_t dim() const noexcept { return coords_.size(); }
    bool has_time() const noexcept { return has_time_; }
    /// Name of the time coordinate; throws MissingTimeCoordinate.
    const std::string& time() const;
    bool contains(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;

    friend bool operator==(const Chart&, const Chart&) = default;

private:
    std::vector<std::string> coords_;
    bool has_time_;
};

/// Components in chart order. The field is flagged NSODE-like when the chart
/// has a time coordinate and its time component is structurally 1.
class VectorField {
public:
    /// Throws std::invalid_argument when the component count does not match
    /// the chart or a component uses a variable outside the chart.
    VectorField(Chart chart, std::vector<Expr> components);

    static VectorField zero(const Chart& chart);

    const Chart& chart() const noexcept { return chart_; }
    const std::vector<Expr>& components() const noexcept { return components_; }
    const Expr& operator[](std::size_t i) const { return components_[i]; }
    const Expr& component(const std::string& coord) const { return components_[chart_.index_of(coord)]; }
    std::size_t dim() const noexcept { return components_.size(); }
    bool nsode() const noexcept { return nsode_; }

    /// f X, componentwise.
    VectorField scaled(const Expr& f) const;

private:
    Chart chart_;
    std::vector<Expr> components_;
    bool nsode_ = false;
};

VectorField operator+(const VectorField& a, const VectorField& b);

/// Positive function R on a chart. Positivity is enforced by sampling the
/// positivity box at construction.
class Multiplier {
public:
    /// Throws PositivityViolation with a witness point, or
    /// InsufficientSamplesError.
    Multiplier(Chart chart, Expr r, SampleBox positivity_box);

    const Chart& chart() const noexcept { return chart_; }
    const Expr& value() const noexcept { return r_; }
    const SampleBox& positivity_box() const noexcept { return box_; }
    /// log R, simplified.
    Expr log_value() const;
    /// c R for a constant c > 0.
    Multiplier rescaled(double c) const;

private:
    Chart chart_;
    Expr r_;
    SampleBox box_;
};

/// Sum over all chart coordinates of d X^i / d x^i, simplified.
Expr divergence(const VectorField& x);

/// X(f) = sum X^i df/dx^i, simplified.
Expr lie_derivative(const VectorField& x, const Expr& f);

/// [X,Y]^i = X(Y^i) - Y(X^i). Throws ChartMismatchError.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// div(fX) against X(f) + f div(X).
EqualityReport scale_divergence_check(const VectorField& x, const Expr& f, const SampleBox& box,
                                      double rtol = kDefaultRtol);

/// X(div Y) - Y(div X) against div([X,Y]).
EqualityReport bracket_divergence_residual(const VectorField& x, const VectorField& y, const SampleBox& box,
                                           double rtol = kDefaultRtol);

/// div(X) + X(log R); identically zero iff R is a Jacobi multiplier of X.
Expr multiplier_residual(const VectorField& x, const Multiplier& r);

EqualityReport multiplier_report(const VectorField& x, const Multiplier& r, const SampleBox& box,
                                 double rtol = kDefaultRtol);
bool is_multiplier(const VectorField& x, const Multiplier& r, const SampleBox& box, double rtol = kDefaultRtol);

/// Componentwise check that every component of v vanishes on box; the
/// returned report is the worst component.
EqualityReport vanishes(const VectorField& v, const SampleBox& box, double rtol = kDefaultRtol);

struct NormalizerResult {
    enum class Kind { Commuting, Normalizer, NotNormalizer };

    Kind kind = Kind::NotNormalizer;
    /// Closed form of h, when one could be derived exactly.
    std::optional<Expr> h;
    /// Per-point h = B^i / X^i at the largest |X^i| when no closed form exists.
    std::vector<Point> points;
    std::vector<double> h_values;
    /// Where [Y,X] = h X failed.
    std::optional<Point> witness;
    double worst_residual = 0.0;
    std::string detail;
};

std::string to_string(NormalizerResult::Kind kind);

inline constexpr double kDirectionThreshold = 1e-8;

/// Decides whether [Y,X] = h X.
///
/// With h_expr supplied it is verified. Otherwise, when X has time component
/// 1, h is the time component of [Y,X]. In the remaining case h is
/// estimated pointwise from the largest component of X (ignoring components
/// below eps) and checked for consistency across components.
/// Throws ChartMismatchError, or DegenerateDirectionError when X is below
/// eps in every component at too many sample points.
NormalizerResult normalizer_factor(const VectorField& x, const VectorField& y, const SampleBox& box,
                                   double rtol = kDefaultRtol, const std::optional<Expr>& h_expr = std::nullopt,
                                   double eps = kDirectionThreshold);

}  // namespace hojman
