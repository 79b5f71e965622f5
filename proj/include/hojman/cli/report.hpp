#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hojman/errors.hpp"

namespace hojman::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Verdict { Pass, Fail, Error };

std::string to_string(Verdict v);
/// 0 pass, 1 fail, 2 input error.
int exit_code(Verdict v);

struct CheckEntry {
    std::string name;
    bool passed = true;
    /// Informational checks do not affect the verdict.
    bool required = true;
    std::optional<double> worst_residual;
    std::optional<Point> witness;
    std::string detail;
};

struct DriftEntry {
    Point x0;
    double t0 = 0.0;
    double t1 = 0.0;
    double step = 0.0;
    double initial_value = 0.0;
    double max_abs_drift = 0.0;
    double relative_drift = 0.0;
    std::optional<double> per_halving_ratio;
    bool truncated = false;
    std::optional<double> truncation_time;
    bool passed = false;
};

struct ErrorInfo {
    std::string kind;
    std::string message;
    std::optional<Point> witness;
    std::optional<std::size_t> offset;
    std::optional<std::size_t> line;
    std::optional<std::size_t> column;
};

struct Report {
    std::string command;
    std::string file;
    Verdict verdict = Verdict::Pass;
    std::optional<std::string> theorem;
    std::optional<std::string> construction;
    std::optional<std::string> invariant;
    std::optional<bool> trivial;
    std::optional<std::string> normalizer;
    std::vector<std::pair<std::string, std::string>> derived;
    std::vector<CheckEntry> checks;
    std::vector<DriftEntry> drift;
    std::optional<ErrorInfo> error;
    std::string file_sha256;
    std::optional<std::uint64_t> seed;

    /// Pass iff every required check and drift entry passed.
    void settle();
};

/// One line of compact JSON with a trailing newline.
std::string to_json_line(const Report& r);
/// Human-readable multi-line text.
std::string to_text(const Report& r);

}  // namespace hojman::cli
