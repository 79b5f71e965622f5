#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hojman/geometry.hpp"

namespace hojman {

/// Sampled integral curve of a vector field. times are the flow parameter;
/// each row of states holds the chart coordinates in chart order.
struct Trajectory {
    Chart chart;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    double step = 0.0;
    std::string method = "rk4";
    /// Integration stopped early on a non-finite or runaway state.
    bool truncated = false;
    std::optional<double> truncation_time;
};

inline constexpr double kBlowUpBound = 1e12;

/// Classic fixed-step RK4 from t0 to t1 > t0; the last step is shortened to
/// land on t1. x0 must bind every chart coordinate. On a non-finite state or
/// a coordinate beyond kBlowUpBound the partial trajectory is returned with
/// truncated set. DomainError from a component propagates with the flow
/// parameter appended to the reason.
Trajectory integrate(const VectorField& x, const Bindings& x0, double t0, double t1, double step);

/// -X, for integrating backwards in the flow parameter.
VectorField reversed(const VectorField& x);

struct DriftReport {
    std::string invariant_name;
    double initial_value = 0.0;
    double max_abs_drift = 0.0;
    /// max_abs_drift / max(|initial_value|, 1).
    double relative_drift = 0.0;
    /// coarse drift / fine drift on step halving; unset when the fine drift
    /// is below the round-off floor and the ratio carries no information.
    std::optional<double> per_halving_ratio;
    std::size_t samples = 0;
};

/// max |I(t) - I(t0)| along traj. Throws DomainError naming the state index.
DriftReport drift(const Trajectory& traj, const Expr& invariant, const std::string& name = "I");

/// Round-off level below which drift differences are noise: sqrt(steps)
/// accumulated unit errors, scaled by the invariant's magnitude.
double drift_floor(double initial_value, std::size_t steps);

/// Drift at step and at step / 2, with per_halving_ratio filled in when the
/// finer drift clears drift_floor.
DriftReport drift_with_halving(const VectorField& x, const Expr& invariant, const Bindings& x0, double t0, double t1,
                               double step, const std::string& name = "I");

struct DriftRun {
    Bindings x0;
    double t0 = 0.0;
    double t1 = 10.0;
    double step = 1e-3;
};

struct CertifySuite {
    std::vector<SampleBox> boxes;
    std::vector<DriftRun> runs;
    double rtol = kDefaultRtol;
    double drift_tolerance = 1e-6;
    double ratio_lo = 12.0;
    double ratio_hi = 20.0;
    /// Ratios above ratio_hi still pass: faster-than-fourth-order decay of
    /// the drift (32 for quadratic invariants of linear flows) is
    /// consistent with a true invariant.
    bool accept_superconvergence = true;
};

struct DriftOutcome {
    DriftRun run;
    DriftReport report;
    bool truncated = false;
    std::optional<double> truncation_time;
    bool drift_ok = false;
    /// Unset when the ratio is not applicable.
    std::optional<bool> ratio_ok;
    std::optional<std::string> error;
};

struct Certification {
    bool pass = false;
    std::vector<EqualityReport> pointwise;
    bool pointwise_ok = false;
    std::vector<DriftOutcome> drift;
    bool drift_ok = false;
    std::optional<Point> witness;
    std::string reason;
};

/// X(I) = 0 on every box and bounded drift on every run. Failures are
/// reported in the verdict, never thrown.
Certification certify_invariant(const VectorField& x, const Expr& invariant, const CertifySuite& suite);

/// Header "t_param,<coords>", one row per state, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& out);

}  // namespace hojman
