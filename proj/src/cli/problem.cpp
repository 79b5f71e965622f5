#include "hojman/cli/problem.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hojman::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys{"schema_version", "description", "chart",    "vector_field",
                                          "symmetry",       "multiplier",  "h",        "lagrangian",
                                          "point_field",    "forces",      "box",      "numeric",
                                          "invariant"};

[[noreturn]] void schema(const std::string& what) { throw ProblemError("schema violation: " + what); }

const json& member(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) schema("missing field " + where + key);
    return *it;
}

std::string as_string(const json& j, const std::string& field) {
    if (!j.is_string()) schema(field + " must be a string");
    return j.get<std::string>();
}

double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) schema(field + " must be a number");
    return j.get<double>();
}

Expr as_expr(const json& j, const std::string& field, const Chart& chart) {
    std::string text = as_string(j, field);
    Expr e;
    try {
        e = parse_expr(text);
    } catch (const ParseError& err) {
        throw ProblemError(field + ": " + err.what()).with_offset(err.offset());
    }
    for (const auto& v : e.variables()) {
        if (!chart.contains(v)) schema(field + " uses '" + v + "', which is not a chart coordinate");
    }
    return e;
}

std::vector<Expr> as_expr_list(const json& j, const std::string& field, const Chart& chart) {
    if (!j.is_array()) schema(field + " must be an array of expression strings");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_expr(j[i], field + "[" + std::to_string(i) + "]", chart));
    return out;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

Chart parse_chart(const json& j) {
    if (!j.is_object()) schema("chart must be an object");
    const json& coords = member(j, "coords", "chart.");
    if (!coords.is_array() || coords.empty()) schema("chart.coords must be a non-empty array of names");
    std::vector<std::string> names;
    for (const auto& c : coords) names.push_back(as_string(c, "chart.coords[]"));
    bool time = false;
    if (auto it = j.find("time"); it != j.end()) {
        if (!it->is_boolean()) schema("chart.time must be a boolean");
        time = it->get<bool>();
    }
    try {
        return Chart(std::move(names), time);
    } catch (const std::invalid_argument& e) {
        schema(std::string("chart: ") + e.what());
    }
}

void parse_box(const json& j, ProblemFile& p) {
    if (!j.is_object()) schema("box must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "seed") {
            if (!value.is_number_unsigned()) schema("box.seed must be a non-negative integer");
            p.seed = value.get<std::uint64_t>();
        } else if (key == "count") {
            if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0) {
                schema("box.count must be a positive integer");
            }
            p.count = value.get<std::size_t>();
        } else {
            if (!p.chart.contains(key)) schema("box." + key + " is not a chart coordinate");
            if (!value.is_array() || value.size() != 2) schema("box." + key + " must be [lo, hi]");
            Interval iv{as_number(value[0], "box." + key + "[0]"), as_number(value[1], "box." + key + "[1]")};
            if (!(iv.lo < iv.hi)) schema("box." + key + " must satisfy lo < hi");
            p.intervals[key] = iv;
        }
    }
    for (const auto& c : p.chart.coords()) {
        if (!p.intervals.count(c)) schema("box has no interval for coordinate '" + c + "'");
    }
}

void parse_numeric(const json& j, ProblemFile& p) {
    if (!j.is_object()) schema("numeric must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "step") {
            p.numeric.step = as_number(value, "numeric.step");
        } else if (key == "span") {
            if (!value.is_array() || value.size() != 2) schema("numeric.span must be [t0, t1]");
            p.numeric.span = std::pair{as_number(value[0], "numeric.span[0]"), as_number(value[1], "numeric.span[1]")};
        } else if (key == "x0") {
            if (!value.is_object()) schema("numeric.x0 must map every chart coordinate to a number");
            Bindings b;
            for (const auto& [name, v] : value.items()) {
                if (!p.chart.contains(name)) schema("numeric.x0." + name + " is not a chart coordinate");
                b.set(name, as_number(v, "numeric.x0." + name));
            }
            for (const auto& c : p.chart.coords()) {
                if (!b.contains(c)) schema("numeric.x0 has no value for '" + c + "'");
            }
            p.numeric.x0 = std::move(b);
        } else {
            schema("unknown field numeric." + key);
        }
    }
}

void check_second_order_chart(const ProblemFile& p, std::size_t n, const std::string& what) {
    const auto& coords = p.chart.coords();
    std::size_t offset = p.chart.has_time() ? 1 : 0;
    if (p.chart.has_time() && coords[0] != kTimeName) schema(what + " needs the time coordinate to be named 't'");
    if (coords.size() != offset + 2 * n) {
        schema(what + " with n = " + std::to_string(n) + " needs chart (t?, x1..xn, v_x1..v_xn)");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (coords[offset + n + i] != velocity_name(coords[offset + i])) {
            schema("chart coordinate '" + coords[offset + n + i] + "' should be '" +
                   velocity_name(coords[offset + i]) + "'");
        }
    }
}

}  // namespace

std::vector<std::string> ProblemFile::base_coordinates() const {
    const auto& coords = chart.coords();
    std::size_t offset = chart.has_time() ? 1 : 0;
    std::size_t n = (coords.size() - offset) / 2;
    return {coords.begin() + static_cast<std::ptrdiff_t>(offset),
            coords.begin() + static_cast<std::ptrdiff_t>(offset + n)};
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

ProblemFile parse_problem(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ProblemError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON", line,
                           column);
    }
    if (!j.is_object()) schema("top level must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!kTopLevelKeys.count(key)) schema("unknown field " + key);
    }

    ProblemFile p;
    p.source = source;
    p.sha256 = sha256_hex(text);
    const json& version = member(j, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != 1) schema("schema_version must be 1");
    if (auto it = j.find("description"); it != j.end()) p.description = as_string(*it, "description");
    p.chart = parse_chart(member(j, "chart", ""));

    if (auto it = j.find("vector_field"); it != j.end()) p.vector_field = as_expr_list(*it, "vector_field", p.chart);
    if (auto it = j.find("symmetry"); it != j.end()) p.symmetry = as_expr_list(*it, "symmetry", p.chart);
    if (auto it = j.find("multiplier"); it != j.end()) p.multiplier = as_expr(*it, "multiplier", p.chart);
    if (auto it = j.find("h"); it != j.end()) p.h = as_expr(*it, "h", p.chart);
    if (auto it = j.find("forces"); it != j.end()) p.forces = as_expr_list(*it, "forces", p.chart);
    if (auto it = j.find("invariant"); it != j.end()) p.invariant = as_expr(*it, "invariant", p.chart);
    if (auto it = j.find("lagrangian"); it != j.end()) {
        if (!it->is_object()) schema("lagrangian must be an object");
        for (const auto& [key, value] : it->items()) {
            if (key != "L" && key != "n" && key != "time_dependent") schema("unknown field lagrangian." + key);
        }
        LagrangianSpec spec;
        spec.lagrangian = as_expr(member(*it, "L", "lagrangian."), "lagrangian.L", p.chart);
        const json& n = member(*it, "n", "lagrangian.");
        if (!n.is_number_unsigned() || n.get<std::size_t>() == 0) schema("lagrangian.n must be a positive integer");
        spec.n = n.get<std::size_t>();
        if (auto td = it->find("time_dependent"); td != it->end()) {
            if (!td->is_boolean()) schema("lagrangian.time_dependent must be a boolean");
            spec.time_dependent = td->get<bool>();
        }
        if (spec.time_dependent && !p.chart.has_time()) schema("a time-dependent Lagrangian needs chart.time = true");
        check_second_order_chart(p, spec.n, "lagrangian");
        p.lagrangian = std::move(spec);
    }
    if (auto it = j.find("point_field"); it != j.end()) {
        if (!it->is_object()) schema("point_field must be an object");
        PointField pf;
        pf.time_component = as_expr(member(*it, "X0", "point_field."), "point_field.X0", p.chart);
        pf.components = as_expr_list(member(*it, "Xi", "point_field."), "point_field.Xi", p.chart);
        p.point_field = std::move(pf);
    }
    if (p.forces) {
        if (p.forces->empty()) schema("forces must not be empty");
        check_second_order_chart(p, p.forces->size(), "forces");
    }

    int dynamics = (p.vector_field ? 1 : 0) + (p.lagrangian ? 1 : 0) + (p.forces ? 1 : 0);
    if (dynamics != 1) schema("exactly one of vector_field, lagrangian, forces must define the dynamics");
    if (p.vector_field && p.vector_field->size() != p.chart.dim()) {
        schema("vector_field has " + std::to_string(p.vector_field->size()) + " components for " +
               std::to_string(p.chart.dim()) + " coordinates");
    }
    if (p.symmetry && p.symmetry->size() != p.chart.dim()) {
        schema("symmetry has " + std::to_string(p.symmetry->size()) + " components for " +
               std::to_string(p.chart.dim()) + " coordinates");
    }
    if (p.point_field) {
        if (!p.lagrangian && !p.forces) schema("point_field needs lagrangian or forces dynamics");
        if (!p.chart.has_time()) schema("point_field needs chart.time = true");
        if (p.point_field->components.size() != p.base_coordinates().size()) {
            schema("point_field.Xi needs one component per base coordinate");
        }
    }

    parse_box(member(j, "box", ""), p);
    if (auto it = j.find("numeric"); it != j.end()) parse_numeric(*it, p);
    return p;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProblemError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str(), path);
}

}  // namespace hojman::cli
