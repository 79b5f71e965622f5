#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hojman {

/// A point in variable space, keyed by variable name.
using Point = std::map<std::string, double>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownFunction };

    ParseError(Kind kind, std::size_t offset, std::vector<std::string> expected, const std::string& what)
        : Error(what), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

    Kind kind() const noexcept { return kind_; }
    /// Byte offset into the source text.
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    Kind kind_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnboundVariableError : public Error {
public:
    explicit UnboundVariableError(std::string name)
        : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Raised when evaluation hits log/sqrt of an invalid argument, a division by
/// zero, or any non-finite intermediate.
class DomainError : public Error {
public:
    DomainError(std::string subexpression, const std::string& reason)
        : Error("domain error in '" + subexpression + "': " + reason), subexpression_(std::move(subexpression)) {}
    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class InsufficientSamplesError : public Error {
public:
    InsufficientSamplesError(std::size_t retained, std::size_t required)
        : Error("only " + std::to_string(retained) + " of " + std::to_string(required) +
                " sample points were evaluable (domain too singular)"),
          retained_(retained), required_(required) {}
    std::size_t retained() const noexcept { return retained_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t retained_;
    std::size_t required_;
};

class ChartMismatchError : public Error {
public:
    using Error::Error;
};

/// Multiplier candidate was not positive at a sample point.
class PositivityViolation : public Error {
public:
    PositivityViolation(Point witness, double value)
        : Error("multiplier is not positive at a sample point (value " + std::to_string(value) + ")"),
          witness_(std::move(witness)), value_(value) {}
    const Point& witness() const noexcept { return witness_; }
    double value() const noexcept { return value_; }

private:
    Point witness_;
    double value_;
};

/// Too many sample points where every component of X is below the threshold.
class DegenerateDirectionError : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    PreconditionViolation(std::string which, Point witness, const std::string& detail)
        : Error("precondition '" + which + "' violated: " + detail), which_(std::move(which)),
          witness_(std::move(witness)) {}
    const std::string& which() const noexcept { return which_; }
    const Point& witness() const noexcept { return witness_; }

private:
    std::string which_;
    Point witness_;
};

/// A user-supplied h does not satisfy [Y,X] = h X.
class InconsistentFactorError : public PreconditionViolation {
public:
    InconsistentFactorError(Point witness, const std::string& detail)
        : PreconditionViolation("h_consistent", std::move(witness), detail) {}
};

class MissingTimeCoordinate : public Error {
public:
    MissingTimeCoordinate() : Error("chart has no time coordinate") {}
};

class DegenerateLagrangian : public Error {
public:
    DegenerateLagrangian(Point witness, const std::string& detail)
        : Error("degenerate Lagrangian: " + detail), witness_(std::move(witness)) {}
    const Point& witness() const noexcept { return witness_; }

private:
    Point witness_;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

/// An internal consistency check failed on inputs that passed validation.
class CertificationFailure : public Error {
public:
    CertificationFailure(Point witness, const std::string& detail)
        : Error("certification failure: " + detail), witness_(std::move(witness)) {}
    const Point& witness() const noexcept { return witness_; }

private:
    Point witness_;
};

}  // namespace hojman
