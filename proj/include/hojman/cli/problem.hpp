#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hojman/geometry.hpp"
#include "hojman/mechanics.hpp"

namespace hojman::cli {

/// Malformed problem file: bad JSON, a schema violation or an unparseable
/// expression. line/column are 1-based and set for JSON syntax errors.
class ProblemError : public Error {
public:
    explicit ProblemError(const std::string& what, std::optional<std::size_t> line = std::nullopt,
                          std::optional<std::size_t> column = std::nullopt)
        : Error(what), line_(line), column_(column) {}
    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::size_t> column() const noexcept { return column_; }
    /// Byte offset within a malformed expression string.
    std::optional<std::size_t> offset() const noexcept { return offset_; }
    ProblemError& with_offset(std::size_t offset) {
        offset_ = offset;
        return *this;
    }

private:
    std::optional<std::size_t> line_;
    std::optional<std::size_t> column_;
    std::optional<std::size_t> offset_;
};

struct LagrangianSpec {
    Expr lagrangian;
    std::size_t n = 0;
    bool time_dependent = false;
};

struct NumericSpec {
    std::optional<double> step;
    std::optional<std::pair<double, double>> span;
    std::optional<Bindings> x0;
};

/// Parsed problem file. Expressions are parsed and checked against the
/// chart, but no analysis has run yet.
struct ProblemFile {
    std::string source;
    std::string sha256;
    std::string description;
    Chart chart{{"x"}};
    std::optional<std::vector<Expr>> vector_field;
    std::optional<std::vector<Expr>> symmetry;
    std::optional<Expr> multiplier;
    std::optional<Expr> h;
    std::optional<LagrangianSpec> lagrangian;
    std::optional<PointField> point_field;
    std::optional<std::vector<Expr>> forces;
    std::map<std::string, Interval> intervals;
    std::uint64_t seed = 0;
    std::size_t count = 32;
    NumericSpec numeric;
    /// Candidate first integral for verify.
    std::optional<Expr> invariant;

    SampleBox box() const { return SampleBox(intervals, seed, count); }
    /// Base coordinates of a second-order chart (t?, x..., v_x...).
    std::vector<std::string> base_coordinates() const;
};

/// Parses problem JSON. source is used in messages only.
ProblemFile parse_problem(const std::string& text, const std::string& source = "<input>");

/// Reads and parses a problem file. Throws ProblemError.
ProblemFile load_problem(const std::string& path);

/// Lowercase hex SHA-256 of bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace hojman::cli
