#include "hojman/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hojman {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool runaway(const std::vector<double>& s) {
    for (double c : s) {
        if (!std::isfinite(c) || std::abs(c) > kBlowUpBound) return true;
    }
    return false;
}

}  // namespace

VectorField reversed(const VectorField& x) {
    std::vector<Expr> comps;
    for (const auto& c : x.components()) comps.push_back(simplify(-c));
    return VectorField(x.chart(), std::move(comps));
}

Trajectory integrate(const VectorField& x, const Bindings& x0, double t0, double t1, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("integration step must be positive");
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
        throw std::invalid_argument("integration span must satisfy t0 < t1");
    }
    const auto& coords = x.chart().coords();
    const std::size_t dim = coords.size();
    std::vector<CompiledExpr> f;
    for (const auto& c : x.components()) f.emplace_back(c, coords);

    Trajectory traj{x.chart(), {}, {}, step, "rk4", false, std::nullopt};
    std::vector<double> state(dim);
    for (std::size_t i = 0; i < dim; ++i) state[i] = x0.at(coords[i]);
    if (runaway(state)) throw std::invalid_argument("initial state is not finite");

    double s = t0;
    auto rhs = [&](const std::vector<double>& y, std::vector<double>& out) {
        for (std::size_t i = 0; i < dim; ++i) {
            try {
                out[i] = f[i](y);
            } catch (const DomainError& e) {
                throw DomainError(e.subexpression(), std::string(e.what()) + " at t_param=" + format_double(s));
            }
        }
    };

    traj.times.push_back(t0);
    traj.states.push_back(state);
    const auto total = static_cast<std::size_t>(std::ceil((t1 - t0) / step * (1.0 - 1e-12)));
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (std::size_t n = 1; n <= total; ++n) {
        double next = n == total ? t1 : t0 + static_cast<double>(n) * step;
        double h = next - s;
        rhs(state, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + h * k3[i];
        rhs(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (runaway(tmp)) {
            traj.truncated = true;
            traj.truncation_time = next;
            break;
        }
        state.swap(tmp);
        s = next;
        traj.times.push_back(s);
        traj.states.push_back(state);
    }
    return traj;
}

DriftReport drift(const Trajectory& traj, const Expr& invariant, const std::string& name) {
    CompiledExpr f(invariant, traj.chart.coords());
    DriftReport out;
    out.invariant_name = name;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        double value = 0.0;
        try {
            value = f(traj.states[k]);
        } catch (const DomainError& e) {
            throw DomainError(e.subexpression(), std::string(e.what()) + " at state index " + std::to_string(k));
        }
        if (k == 0) out.initial_value = value;
        out.max_abs_drift = std::max(out.max_abs_drift, std::abs(value - out.initial_value));
    }
    out.samples = traj.states.size();
    out.relative_drift = out.max_abs_drift / std::max(std::abs(out.initial_value), 1.0);
    return out;
}

double drift_floor(double initial_value, std::size_t steps) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    return 16.0 * eps * std::sqrt(static_cast<double>(std::max<std::size_t>(steps, 1))) *
           (1.0 + std::abs(initial_value));
}

DriftReport drift_with_halving(const VectorField& x, const Expr& invariant, const Bindings& x0, double t0, double t1,
                               double step, const std::string& name) {
    Trajectory coarse = integrate(x, x0, t0, t1, step);
    DriftReport out = drift(coarse, invariant, name);
    if (coarse.truncated) return out;
    Trajectory fine = integrate(x, x0, t0, t1, step / 2.0);
    if (fine.truncated) return out;
    DriftReport finer = drift(fine, invariant, name);
    if (finer.max_abs_drift > drift_floor(finer.initial_value, fine.states.size())) {
        out.per_halving_ratio = out.max_abs_drift / finer.max_abs_drift;
    }
    return out;
}

Certification certify_invariant(const VectorField& x, const Expr& invariant, const CertifySuite& suite) {
    Certification out;
    out.pointwise_ok = true;
    Expr flow_derivative;
    try {
        flow_derivative = lie_derivative(x, invariant);
    } catch (const std::exception& e) {
        out.pointwise_ok = false;
        out.reason = e.what();
        return out;
    }
    for (const auto& box : suite.boxes) {
        try {
            EqualityReport r = is_zero_numeric(flow_derivative, box, suite.rtol);
            if (!r.equal && out.pointwise_ok) {
                out.pointwise_ok = false;
                out.witness = r.worst_point;
                out.reason = "X(I) does not vanish";
            }
            out.pointwise.push_back(std::move(r));
        } catch (const Error& e) {
            out.pointwise_ok = false;
            if (out.reason.empty()) out.reason = e.what();
        }
    }

    out.drift_ok = true;
    for (const auto& run : suite.runs) {
        DriftOutcome o;
        o.run = run;
        try {
            Trajectory traj = integrate(x, run.x0, run.t0, run.t1, run.step);
            o.truncated = traj.truncated;
            o.truncation_time = traj.truncation_time;
            o.report = drift_with_halving(x, invariant, run.x0, run.t0, run.t1, run.step);
            o.drift_ok = !o.truncated && o.report.relative_drift <= suite.drift_tolerance;
            if (o.report.per_halving_ratio) {
                double r = *o.report.per_halving_ratio;
                o.ratio_ok = r >= suite.ratio_lo && (r <= suite.ratio_hi || suite.accept_superconvergence);
            }
        } catch (const std::exception& e) {
            o.error = e.what();
        }
        bool ok = !o.error && o.drift_ok && o.ratio_ok.value_or(true);
        if (!ok && out.drift_ok) {
            out.drift_ok = false;
            if (out.reason.empty()) {
                if (o.error) {
                    out.reason = *o.error;
                } else if (o.truncated) {
                    out.reason = "trajectory blew up at t_param=" + format_double(*o.truncation_time);
                } else if (!o.drift_ok) {
                    out.reason = "relative drift " + format_double(o.report.relative_drift) + " exceeds tolerance";
                } else {
                    out.reason = "drift halving ratio " + format_double(*o.report.per_halving_ratio) +
                                 " is below the fourth-order band";
                }
            }
            if (!out.witness) out.witness = run.x0.values();
        }
        out.drift.push_back(std::move(o));
    }
    out.pass = out.pointwise_ok && out.drift_ok;
    return out;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
    out << "t_param";
    for (const auto& c : traj.chart.coords()) out << ',' << c;
    out << '\n';
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out << format_double(traj.times[k]);
        for (double v : traj.states[k]) out << ',' << format_double(v);
        out << '\n';
    }
}

}  // namespace hojman
