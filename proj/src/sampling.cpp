#include "hojman/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hojman {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::size_t kResampleFactor = 10;

struct CompiledSet {
    std::vector<std::string> names;
    std::vector<CompiledExpr> exprs;
};

CompiledSet compile_all(const std::vector<Expr>& exprs, const SampleBox& box) {
    CompiledSet set{box.names(), {}};
    set.exprs.reserve(exprs.size());
    for (const auto& e : exprs) set.exprs.emplace_back(e, set.names);
    return set;
}

std::vector<double> values_of(const Point& p) {
    std::vector<double> v;
    v.reserve(p.size());
    for (const auto& [name, value] : p) v.push_back(value);
    return v;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
    std::uint64_t bits = splitmix64(splitmix64(seed) ^ counter);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

SampleBox::SampleBox(std::map<std::string, Interval> intervals, std::uint64_t seed, std::size_t count)
    : intervals_(std::move(intervals)), seed_(seed), count_(count) {
    if (count_ == 0) throw std::invalid_argument("sample box count must be positive");
    for (const auto& [name, iv] : intervals_) {
        if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
            throw std::invalid_argument("degenerate interval for '" + name + "'");
        }
    }
}

SampleBox SampleBox::with_interval(const std::string& name, Interval iv) const {
    auto copy = intervals_;
    copy[name] = iv;
    return SampleBox(std::move(copy), seed_, count_);
}

std::vector<std::string> SampleBox::names() const {
    std::vector<std::string> out;
    out.reserve(intervals_.size());
    for (const auto& [name, iv] : intervals_) out.push_back(name);
    return out;
}

Point SampleBox::point(std::size_t index) const {
    Point p;
    std::uint64_t counter = static_cast<std::uint64_t>(index) * intervals_.size();
    for (const auto& [name, iv] : intervals_) {
        double u = counter_uniform(seed_, counter++);
        p[name] = iv.lo + u * (iv.hi - iv.lo);
    }
    return p;
}

std::vector<Point> retained_points(const std::vector<Expr>& exprs, const SampleBox& box) {
    CompiledSet set = compile_all(exprs, box);
    std::vector<Point> out;
    std::size_t budget = kResampleFactor * box.count();
    for (std::size_t i = 0; i < budget && out.size() < box.count(); ++i) {
        Point p = box.point(i);
        auto values = values_of(p);
        try {
            for (const auto& c : set.exprs) c(values);
        } catch (const DomainError&) {
            continue;
        }
        out.push_back(std::move(p));
    }
    if (out.size() < box.count()) throw InsufficientSamplesError(out.size(), box.count());
    return out;
}

EqualityReport equal_numeric(const Expr& a, const Expr& b, const SampleBox& box, double rtol) {
    if (!(rtol > 0.0)) throw std::invalid_argument("rtol must be positive");
    CompiledSet set = compile_all({a, b}, box);
    EqualityReport report;
    std::size_t budget = kResampleFactor * box.count();
    bool have_worst = false;
    for (std::size_t i = 0; i < budget && report.retained < box.count(); ++i) {
        ++report.attempted;
        Point p = box.point(i);
        auto values = values_of(p);
        double va = 0.0;
        double vb = 0.0;
        try {
            va = set.exprs[0](values);
            vb = set.exprs[1](values);
        } catch (const DomainError&) {
            continue;
        }
        ++report.retained;
        double scale = 1.0 + std::max(std::abs(va), std::abs(vb));
        double residual = std::abs(va - vb) / scale;
        if (residual > rtol) report.equal = false;
        if (!have_worst || residual > report.worst_residual) {
            have_worst = true;
            report.worst_residual = residual;
            report.worst_point = std::move(p);
            report.worst_lhs = va;
            report.worst_rhs = vb;
        }
    }
    if (report.retained < box.count()) throw InsufficientSamplesError(report.retained, box.count());
    return report;
}

EqualityReport is_zero_numeric(const Expr& e, const SampleBox& box, double rtol) {
    return equal_numeric(e, Expr(0.0), box, rtol);
}

double fd_check(const Expr& e, const std::string& var, const Bindings& b, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    double exact = eval(diff(e, var), b);
    Bindings plus = b;
    Bindings minus = b;
    double x = b.contains(var) ? b.at(var) : 0.0;
    plus.set(var, x + h);
    minus.set(var, x - h);
    double central = (eval(e, plus) - eval(e, minus)) / (2.0 * h);
    return std::abs(exact - central) / (1.0 + std::abs(exact));
}

}  // namespace hojman
