#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hojman/expr.hpp"

namespace hojman {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Sampling domain for randomized identity checks: one closed interval per
/// variable, a seed and a point count. Points are a pure function of
/// (seed, index), so every report is reproducible bit-for-bit.
class SampleBox {
public:
    /// Throws std::invalid_argument on an empty box, count == 0 or lo >= hi.
    SampleBox(std::map<std::string, Interval> intervals, std::uint64_t seed, std::size_t count);

    const std::map<std::string, Interval>& intervals() const noexcept { return intervals_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t count() const noexcept { return count_; }

    SampleBox with_seed(std::uint64_t seed) const { return SampleBox(intervals_, seed, count_); }
    SampleBox with_count(std::size_t count) const { return SampleBox(intervals_, seed_, count); }
    /// Copy with name's interval replaced or added.
    SampleBox with_interval(const std::string& name, Interval iv) const;

    std::vector<std::string> names() const;
    /// The index-th point of the deterministic sequence.
    Point point(std::size_t index) const;

private:
    std::map<std::string, Interval> intervals_;
    std::uint64_t seed_;
    std::size_t count_;
};

/// Uniform double in [0, 1) from a counter, keyed by seed.
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept;

struct EqualityReport {
    bool equal = true;
    /// Point with the largest scaled residual |a-b| / (1 + max(|a|,|b|)).
    Point worst_point;
    double worst_residual = 0.0;
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
    std::size_t retained = 0;
    std::size_t attempted = 0;
};

inline constexpr double kDefaultRtol = 1e-9;

/// Randomized semantic equality of a and b over box.
///
/// Points where either side raises a DomainError are skipped; up to
/// 10 * count points are drawn to retain count of them. Equal iff
/// |a-b| <= rtol * (1 + max(|a|,|b|)) at every retained point.
/// Throws InsufficientSamplesError, or UnboundVariableError when an
/// expression uses a variable the box does not cover.
EqualityReport equal_numeric(const Expr& a, const Expr& b, const SampleBox& box, double rtol = kDefaultRtol);

/// equal_numeric(e, 0).
EqualityReport is_zero_numeric(const Expr& e, const SampleBox& box, double rtol = kDefaultRtol);

/// Scaled difference between diff(e, var) and a central difference with step h.
double fd_check(const Expr& e, const std::string& var, const Bindings& b, double h);

/// The first count points of box at which every expression evaluates.
/// Throws InsufficientSamplesError if fewer than count are found in
/// 10 * count draws.
std::vector<Point> retained_points(const std::vector<Expr>& exprs, const SampleBox& box);

}  // namespace hojman
