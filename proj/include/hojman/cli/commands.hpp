#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hojman/cli/problem.hpp"
#include "hojman/cli/report.hpp"
#include "hojman/invariants.hpp"

namespace hojman::cli {

/// A construction needs a field the problem file does not supply.
class MissingIngredient : public Error {
public:
    explicit MissingIngredient(std::string field)
        : Error("insufficient ingredients: missing " + field), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// auto | t21 | t22 | t23 | t41 | lagrangian | hamiltonian. t21: divergence-free
/// X with a symmetry; t22: Jacobi multiplier with a symmetry; t23: normalizer
/// with factor h; t41: time-dependent system with unit time component;
/// lagrangian: prolonged point field of a regular Lagrangian; hamiltonian:
/// phase-space dispatch.
inline const std::vector<std::string> kTheorems{"auto", "t21", "t22", "t23", "t41", "lagrangian", "hamiltonian"};
inline const std::vector<std::string> kShowItems{"hessian", "forces", "multiplier", "energy"};

struct RunOptions {
    std::string theorem = "auto";
    std::optional<double> step;
    std::optional<std::pair<double, double>> span;
    std::optional<std::uint64_t> seed;
    std::optional<double> rtol;
    std::optional<std::string> csv;
    std::vector<std::string> show;
};

struct ConstructedInvariant {
    InvariantResult result;
    std::string theorem;
    /// Closed form against the normalizer route, for the lagrangian theorem.
    std::optional<EqualityReport> route_agreement;
};

/// The first integral the invariant command builds for p.
ConstructedInvariant construct_invariant(const ProblemFile& p, const RunOptions& opts = {});

/// Structural checks for every supplied ingredient.
void cmd_check(const ProblemFile& p, const RunOptions& opts, Report& report);
/// Builds and certifies a first integral.
void cmd_invariant(const ProblemFile& p, const RunOptions& opts, Report& report);
/// Pointwise and trajectory certification of the file's candidate (or the
/// constructed) invariant.
void cmd_verify(const ProblemFile& p, const RunOptions& opts, Report& report);
/// Derived Lagrangian objects and the det W multiplier check.
void cmd_lagrangian(const ProblemFile& p, const RunOptions& opts, Report& report);

/// Loads path, dispatches command and converts every library error into a
/// report with the matching verdict.
Report run_command(const std::string& command, const std::string& path, const RunOptions& opts);

/// Entry point of the hojman tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hojman::cli
