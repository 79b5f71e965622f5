#include "hojman/cli/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace hojman::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string point_text(const Point& p) {
    std::string out = "(";
    bool first = true;
    for (const auto& [name, v] : p) {
        if (!first) out += ", ";
        first = false;
        out += name + "=" + num(v);
    }
    return out + ")";
}

json point_json(const Point& p) {
    json out = json::object();
    for (const auto& [name, v] : p) out[name] = v;
    return out;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass:
            return "pass";
        case Verdict::Fail:
            return "fail";
        case Verdict::Error:
            return "error";
    }
    return "error";
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::Pass:
            return 0;
        case Verdict::Fail:
            return 1;
        case Verdict::Error:
            return 2;
    }
    return 2;
}

void Report::settle() {
    if (error) {
        verdict = Verdict::Error;
        return;
    }
    verdict = Verdict::Pass;
    for (const auto& c : checks) {
        if (c.required && !c.passed) verdict = Verdict::Fail;
    }
    for (const auto& d : drift) {
        if (!d.passed) verdict = Verdict::Fail;
    }
}

std::string to_json_line(const Report& r) {
    json j;
    j["command"] = r.command;
    j["file"] = r.file;
    j["verdict"] = to_string(r.verdict);
    if (r.theorem) j["theorem"] = *r.theorem;
    if (r.construction) j["construction"] = *r.construction;
    if (r.invariant) j["invariant"] = *r.invariant;
    if (r.trivial) j["trivial"] = *r.trivial;
    if (r.normalizer) j["normalizer"] = *r.normalizer;
    if (!r.derived.empty()) {
        json d = json::array();
        for (const auto& [name, value] : r.derived) d.push_back({{"name", name}, {"value", value}});
        j["derived"] = d;
    }
    json checks = json::array();
    for (const auto& c : r.checks) {
        json e{{"name", c.name}, {"passed", c.passed}, {"required", c.required}};
        if (c.worst_residual) e["worst_residual"] = *c.worst_residual;
        if (c.witness) e["witness"] = point_json(*c.witness);
        if (!c.detail.empty()) e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    j["checks"] = checks;
    if (!r.drift.empty()) {
        json drift = json::array();
        for (const auto& d : r.drift) {
            json e{{"x0", point_json(d.x0)},
                   {"span", {d.t0, d.t1}},
                   {"step", d.step},
                   {"initial_value", d.initial_value},
                   {"max_abs_drift", d.max_abs_drift},
                   {"relative_drift", d.relative_drift},
                   {"per_halving_ratio", d.per_halving_ratio ? json(*d.per_halving_ratio) : json(nullptr)},
                   {"truncated", d.truncated},
                   {"passed", d.passed}};
            if (d.truncation_time) e["truncation_time"] = *d.truncation_time;
            drift.push_back(std::move(e));
        }
        j["drift"] = drift;
    }
    if (r.error) {
        json e{{"kind", r.error->kind}, {"message", r.error->message}};
        if (r.error->witness) e["witness"] = point_json(*r.error->witness);
        if (r.error->offset) e["offset"] = *r.error->offset;
        if (r.error->line) e["line"] = *r.error->line;
        if (r.error->column) e["column"] = *r.error->column;
        j["error"] = e;
    }
    json prov{{"file_sha256", r.file_sha256}, {"version", kToolVersion}};
    prov["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["provenance"] = prov;
    return j.dump() + "\n";
}

std::string to_text(const Report& r) {
    std::ostringstream out;
    out << r.command << " " << r.file << "\n";
    if (r.theorem) {
        out << "  theorem: " << *r.theorem;
        if (r.construction) out << " (" << *r.construction << ")";
        out << "\n";
    }
    if (r.normalizer) out << "  relation: " << *r.normalizer << "\n";
    if (r.invariant) out << "  invariant: " << *r.invariant << "\n";
    if (r.trivial) out << "  trivial: " << (*r.trivial ? "yes (constant)" : "no") << "\n";
    for (const auto& [name, value] : r.derived) out << "  " << name << ": " << value << "\n";
    for (const auto& c : r.checks) {
        out << "  [" << (c.passed ? "ok" : (c.required ? "FAIL" : "no")) << "] " << c.name;
        if (c.worst_residual) out << "  residual " << num(*c.worst_residual);
        if (!c.detail.empty()) out << "  " << c.detail;
        if (!c.passed && c.witness) out << "  at " << point_text(*c.witness);
        out << "\n";
    }
    for (const auto& d : r.drift) {
        out << "  [" << (d.passed ? "ok" : "FAIL") << "] drift from " << point_text(d.x0) << " over [" << num(d.t0)
            << ", " << num(d.t1) << "] step " << num(d.step) << ": relative " << num(d.relative_drift);
        if (d.per_halving_ratio) {
            out << ", halving ratio " << num(*d.per_halving_ratio);
        } else {
            out << ", halving ratio n/a (round-off level)";
        }
        if (d.truncated) out << ", blew up at t_param=" << num(d.truncation_time.value_or(0.0));
        out << "\n";
    }
    if (r.error) {
        out << "  error (" << r.error->kind << "): " << r.error->message;
        if (r.error->witness && !r.error->witness->empty()) out << " at " << point_text(*r.error->witness);
        out << "\n";
    }
    out << "verdict: " << to_string(r.verdict) << "\n";
    return out.str();
}

}  // namespace hojman::cli
