#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hojman/geometry.hpp"
#include "hojman/invariants.hpp"

namespace hojman {

using ExprMatrix = std::vector<std::vector<Expr>>;

inline constexpr const char* kTimeName = "t";
inline constexpr std::size_t kMaxLagrangianDimension = 4;

/// Velocity name paired with a base coordinate: "v_" + base.
std::string velocity_name(const std::string& base);

/// x''^i = F^i(t?, x, v).
class SecondOrderSystem {
public:
    /// Velocity names default to velocity_name(base). Throws
    /// std::invalid_argument when a force uses a variable outside
    /// (t?, x, v) or the name lists are inconsistent.
    SecondOrderSystem(std::vector<std::string> base, std::vector<Expr> forces, bool time_dependent,
                      std::vector<std::string> velocities = {});

    std::size_t n() const noexcept { return base_.size(); }
    const std::vector<std::string>& base() const noexcept { return base_; }
    const std::vector<std::string>& velocities() const noexcept { return velocities_; }
    const std::vector<Expr>& forces() const noexcept { return forces_; }
    bool time_dependent() const noexcept { return time_dependent_; }

    /// (t?, x..., v...).
    Chart chart() const;
    /// Same forces viewed on the evolution space (t, x, v).
    SecondOrderSystem with_time() const;

private:
    std::vector<std::string> base_;
    std::vector<std::string> velocities_;
    std::vector<Expr> forces_;
    bool time_dependent_;
};

/// Gamma = [d/dt +] v^i d/dx^i + F^i d/dv^i.
VectorField sode_lift(const SecondOrderSystem& sys);

struct LagrangianData {
    Expr lagrangian;
    SecondOrderSystem system;  ///< forces derived from the Euler-Lagrange equations
    ExprMatrix hessian;        ///< W_ij = d^2 L / dv^i dv^j
    ExprMatrix mixed;          ///< A_ij = d^2 L / dx^i dv^j
    Expr hessian_det;
    Expr energy;               ///< sum v^i dL/dv^i - L
};

/// Symbolic determinant by cofactor expansion.
Expr determinant(const ExprMatrix& m);

/// Derives W, A, det W, the Euler-Lagrange forces and the energy. Forces
/// solve sum_j W_ij F^j = dL/dx^i - sum_j A_ji v^j - d^2L/dt dv^i by the
/// adjugate. Throws DimensionTooLarge for more than four degrees of freedom,
/// DegenerateLagrangian when det W is numerically zero somewhere on the box,
/// and CertificationFailure if the forces fail the Euler-Lagrange identity.
LagrangianData lagrangian_analyze(const Expr& lagrangian, std::vector<std::string> base, bool time_dependent,
                                  const CheckOptions& opts);

/// Residual of the Euler-Lagrange equations for the given forces, per i.
std::vector<Expr> euler_lagrange_residuals(const LagrangianData& ld);

struct LagrangianMultiplier {
    Multiplier multiplier;
    /// det W was negative on the box and -det W is used instead.
    bool negated = false;
};

/// det W as a Jacobi multiplier of the lifted dynamics, on chart (or on the
/// system's own chart when none is given). Throws DegenerateLagrangian when
/// det W changes sign on the box, CertificationFailure when the multiplier
/// check fails.
LagrangianMultiplier lagrangian_multiplier(const LagrangianData& ld, const CheckOptions& opts,
                                           const std::optional<Chart>& chart = std::nullopt);

/// X = X^0 d/dt + X^i d/dx^i on (t, x), with no velocity dependence.
struct PointField {
    Expr time_component;
    std::vector<Expr> components;
};

/// First prolongation to (t, x, v): velocity components
/// Gamma(X^i) - v^i Gamma(X^0). Autonomous systems are embedded in the
/// evolution space first. Throws std::invalid_argument when the point field
/// depends on velocities or has the wrong size.
VectorField prolong(const PointField& pf, const SecondOrderSystem& sys);

/// div(X1) by the closed expansion 2 sum(dX^i/dx^i - v^i dX^0/dx^i) - (n-1) Gamma(X^0).
Expr prolonged_divergence_formula(const PointField& pf, const SecondOrderSystem& sys);

struct NamedCheck {
    std::string name;
    EqualityReport report;
};

struct SodeSymmetryReport {
    std::vector<NamedCheck> commuting_checks;
    std::vector<NamedCheck> normalizer_checks;
    bool commuting = false;
    bool normalizer = false;
    Expr h;  ///< -Gamma(Y^0)
    NormalizerResult bracket_route;
    /// Component conditions and the direct bracket computation agree.
    bool routes_agree = false;
};

/// Component conditions for [Y, Gamma] = 0 and [Y, Gamma] = h Gamma, each
/// checked separately, then cross-checked against normalizer_factor.
/// Gamma must be an NSODE lift on (t, x, v). Throws ChartMismatchError or
/// std::invalid_argument when Gamma does not have that shape.
SodeSymmetryReport sode_symmetry_conditions(const VectorField& y, const VectorField& gamma, const SampleBox& box,
                                            double rtol = kDefaultRtol);

struct LagrangianInvariant {
    InvariantResult result;
    VectorField prolonged;
    /// Closed-form route against the generic normalizer route.
    EqualityReport route_agreement;
};

/// I = 2 sum(dX^i/dx^i - v^i dX^0/dx^i) - n Gamma(X^0) + X1(log det W),
/// for a prolonged point field X1 normalizing the Lagrangian dynamics.
/// Throws PreconditionViolation, DegenerateLagrangian, or
/// CertificationFailure when the two routes disagree.
LagrangianInvariant hojman_invariant_lagrangian(const PointField& pf, const LagrangianData& ld,
                                                const CheckOptions& opts);

/// Hamiltonian vector field (dH/dp, -dH/dq) on (t?, q, p).
VectorField hamiltonian_field(const Expr& h, const std::vector<std::string>& q, const std::vector<std::string>& p,
                              bool time_dependent = false);

/// Phase-space first integral. Dispatches on the ingredients: time chart
/// with unit time component -> nonautonomous, h -> normalizer, R ->
/// multiplier, otherwise divergence-free (R constant for Hamiltonian X).
InvariantResult hamiltonian_invariant(const VectorField& x, const VectorField& y, const std::optional<Multiplier>& r,
                                      const std::optional<Expr>& h, const CheckOptions& opts);

/// (1/R) d(R sigma)/dt + (1/R) sum(d(R xi^i)/dq^i + d(R eta_i)/dp_i) - X(sigma),
/// the expanded time-dependent phase-space form.
Expr hamiltonian_nonautonomous_formula(const VectorField& x, const VectorField& y, const Expr& r);

}  // namespace hojman
