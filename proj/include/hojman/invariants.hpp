#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hojman/geometry.hpp"

namespace hojman {

/// Which construction produced a first integral.
enum class Construction {
    DivergenceFree,               ///< div(Y), X divergence-free, [Y,X] = 0
    Multiplier,                   ///< div(Y) + Y(log R), [X,Y] = 0
    Normalizer,                   ///< div(Y) + Y(log R) + h, [Y,X] = h X
    NonautonomousDivergenceFree,  ///< div(Y) - X(Y^0), X = d/dt + ...
    NonautonomousMultiplier,      ///< div(Y) + Y(log R) - X(Y^0)
    ProlongedPointSymmetry,       ///< prolonged point field of a Lagrangian system
};

std::string to_string(Construction c);

/// Working domain and tolerance for precondition and certification checks.
struct CheckOptions {
    SampleBox box;
    double rtol = kDefaultRtol;
};

struct InvariantResult {
    Expr invariant;
    Construction construction = Construction::DivergenceFree;
    VectorField x;
    VectorField y;
    std::optional<Expr> multiplier;
    std::optional<Expr> h;
    /// Set when the invariant is numerically constant on the box.
    std::optional<double> constant_value;
    /// X(I) against 0 on the box.
    EqualityReport certification;
};

/// div(Y) for divergence-free X and a symmetry Y.
/// Throws PreconditionViolation ("div_free", "commuting", "certification").
InvariantResult invariant_divfree(const VectorField& x, const VectorField& y, const CheckOptions& opts);

/// div(Y) + Y(log R) for a Jacobi multiplier R and a symmetry Y.
/// Throws PreconditionViolation ("multiplier", "commuting", "certification").
InvariantResult invariant_multiplier(const VectorField& x, const VectorField& y, const Multiplier& r,
                                     const CheckOptions& opts);

/// div(Y) + Y(log R) + h for a normalizer Y with [Y,X] = h X. Without R,
/// X must be divergence-free. Throws InconsistentFactorError when h fails the
/// bracket check, PreconditionViolation otherwise.
InvariantResult invariant_normalizer(const VectorField& x, const VectorField& y, const std::optional<Multiplier>& r,
                                     const Expr& h, const CheckOptions& opts);

/// div(Y) [+ Y(log R)] - X(Y^0) for a field X with time component 1 and a
/// normalizer Y of the distribution it spans. The divergence includes the
/// dY^0/dt term. Throws MissingTimeCoordinate or PreconditionViolation.
InvariantResult invariant_nonautonomous(const VectorField& x, const VectorField& y,
                                        const std::optional<Multiplier>& r, const CheckOptions& opts);

/// Shared tail of every constructor: certifies X(I) = 0 and detects
/// constant invariants. Throws PreconditionViolation("certification").
InvariantResult certify_result(InvariantResult result, const CheckOptions& opts);

}  // namespace hojman
