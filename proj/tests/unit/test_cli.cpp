#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "hojman/cli/commands.hpp"

using namespace hojman;
using namespace hojman::cli;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

std::string source(const std::string& rel) { return std::string(HOJMAN_SOURCE_DIR) + "/" + rel; }

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "hojman");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args, int* code = nullptr) {
    args.push_back("--json");
    Outcome r = run(std::move(args));
    if (code) *code = r.code;
    return json::parse(r.out);
}

// Runs the installed binary through the shell.
Outcome run_binary(const std::string& args) {
    std::string cmd = std::string(HOJMAN_BINARY) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    Outcome r;
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("hojman_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        fs::path p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
    static inline int counter_ = 0;
};

const char* kOscillatorLagrangian = R"({
  "schema_version": 1,
  "chart": {"coords": ["t", "x", "v_x"], "time": true},
  "lagrangian": {"L": "v_x^2/2 - x^2/2", "n": 1, "time_dependent": false},
  "point_field": {"X0": "0", "Xi": ["x"]},
  "box": {"t": [0, 1], "x": [-1, 1], "v_x": [-1, 1], "seed": 1, "count": 32}
})";

const char* kDegenerateLagrangian = R"({
  "schema_version": 1,
  "chart": {"coords": ["t", "x", "v_x"], "time": true},
  "lagrangian": {"L": "x*v_x", "n": 1, "time_dependent": false},
  "box": {"t": [0, 1], "x": [-1, 1], "v_x": [-1, 1], "seed": 1, "count": 32}
})";

}  // namespace

TEST(Fixtures, ExitCodes) {
    EXPECT_EQ(run_binary("check " + source("tests/fixtures/pass.json")).code, 0);
    EXPECT_EQ(run_binary("invariant " + source("tests/fixtures/fail.json") + " --theorem t22").code, 1);
    EXPECT_EQ(run_binary("check " + source("tests/fixtures/error.json")).code, 2);
}

TEST(Fixtures, Verdicts) {
    int code = 0;
    json pass = run_json({"verify", source("tests/fixtures/pass.json")}, &code);
    EXPECT_EQ(pass["verdict"], "pass");
    EXPECT_EQ(code, 0);

    json fail = run_json({"invariant", source("tests/fixtures/fail.json")}, &code);
    EXPECT_EQ(fail["verdict"], "fail");
    EXPECT_EQ(code, 1);
    bool witnessed = false;
    for (const auto& c : fail["checks"]) {
        if (!c["passed"].get<bool>() && c.contains("witness")) witnessed = true;
    }
    EXPECT_TRUE(witnessed) << fail.dump();

    json err = run_json({"check", source("tests/fixtures/error.json")}, &code);
    EXPECT_EQ(err["verdict"], "error");
    EXPECT_EQ(err["error"]["kind"], "positivity_violation");
    EXPECT_TRUE(err["error"].contains("witness"));
    EXPECT_EQ(code, 2);
}

TEST(Output, JsonIsDeterministic) {
    for (const char* cmd : {"check", "invariant", "verify"}) {
        std::string args = std::string(cmd) + " " + source("problems/dilation_xy.json") + " --json";
        Outcome a = run_binary(args), b = run_binary(args);
        EXPECT_EQ(a.out, b.out) << cmd;
        EXPECT_EQ(a.out.back(), '\n');
        EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 1) << cmd;
    }
}

TEST(Output, TextEndsWithVerdict) {
    Outcome r = run({"invariant", source("problems/oscillator.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verdict: pass"), std::string::npos) << r.out;
}

TEST(Output, Provenance) {
    json j = run_json({"check", source("problems/oscillator.json")});
    std::ifstream in(source("problems/oscillator.json"), std::ios::binary);
    std::stringstream bytes;
    bytes << in.rdbuf();
    EXPECT_EQ(j["provenance"]["file_sha256"], sha256_hex(bytes.str()));
    EXPECT_EQ(j["provenance"]["version"], "0.1.0");
    EXPECT_EQ(j["provenance"]["seed"], 1);
}

TEST(Hashing, KnownVectors) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Invariant, ShippedProblems) {
    json d = run_json({"invariant", source("problems/dilation_xy.json")});
    EXPECT_EQ(d["invariant"], "-(y/x)");
    EXPECT_EQ(d["construction"], "multiplier-symmetry");
    EXPECT_EQ(d["trivial"], false);

    json ck = run_json({"invariant", source("problems/caldirola_kanai.json")});
    EXPECT_EQ(ck["invariant"], "2");
    EXPECT_EQ(ck["theorem"], "lagrangian");

    json osc = run_json({"invariant", source("problems/oscillator.json")});
    EXPECT_EQ(osc["invariant"], "2");
    EXPECT_EQ(osc["trivial"], true);

    json na = run_json({"invariant", source("problems/nonautonomous.json")});
    EXPECT_EQ(na["invariant"], "2");
    EXPECT_EQ(na["theorem"], "t41");

    json q = run_json({"invariant", source("problems/quartic.json")});
    EXPECT_EQ(q["verdict"], "pass");
    SampleBox box({{"v_x", {0.5, 2.0}}}, 1, 32);
    EXPECT_TRUE(equal_numeric(parse_expr(q["invariant"].get<std::string>()), parse_expr("2/v_x"), box).equal)
        << q["invariant"];
}

TEST(Invariant, TheoremSelection) {
    int code = 0;
    json t21 = run_json({"invariant", source("problems/oscillator.json"), "--theorem", "t21"}, &code);
    EXPECT_EQ(t21["verdict"], "pass");
    // without h in the file the factor is derived from the bracket
    json t23 = run_json({"invariant", source("problems/oscillator.json"), "--theorem", "t23"}, &code);
    EXPECT_EQ(t23["verdict"], "pass");
    EXPECT_EQ(t23["invariant"], "2");
    json t22 = run_json({"invariant", source("problems/oscillator.json"), "--theorem", "t22"}, &code);
    EXPECT_EQ(t22["verdict"], "error");
    EXPECT_EQ(t22["error"]["kind"], "insufficient_ingredients");
    EXPECT_EQ(code, 2);
    json t41 = run_json({"invariant", source("problems/dilation_xy.json"), "--theorem", "t41"}, &code);
    EXPECT_EQ(t41["verdict"], "error");
}

TEST(Lagrangian, ShowDerivedObjects) {
    TempDir dir;
    std::string osc = dir.write("osc.json", kOscillatorLagrangian);
    json j = run_json({"lagrangian", osc, "--show", "hessian", "forces", "multiplier", "energy"});
    EXPECT_EQ(j["verdict"], "pass");
    std::map<std::string, std::string> derived;
    for (const auto& d : j["derived"]) derived[d["name"]] = d["value"];
    EXPECT_EQ(derived["F_x"], "-x");
    EXPECT_EQ(derived["det W"], "1");
    EXPECT_EQ(derived["W"], "[[1]]");
    EXPECT_EQ(derived["R"], "1");
    ASSERT_TRUE(derived.count("E"));
    SampleBox box({{"x", {-1, 1}}, {"v_x", {-1, 1}}}, 2, 32);
    EXPECT_TRUE(equal_numeric(parse_expr(derived["E"]), parse_expr("(v_x^2 + x^2)/2"), box).equal);

    json inv = run_json({"invariant", osc});
    EXPECT_EQ(inv["invariant"], "2");
}

TEST(Lagrangian, CaldirolaKanaiMultiplier) {
    json j = run_json({"lagrangian", source("problems/caldirola_kanai.json"), "--show", "hessian", "forces", "multiplier"});
    std::map<std::string, std::string> derived;
    for (const auto& d : j["derived"]) derived[d["name"]] = d["value"];
    EXPECT_EQ(derived["det W"], "exp(2*t)");
    EXPECT_EQ(derived["F_x"], "-x - 2*v_x");
    EXPECT_EQ(derived["R"], "exp(2*t)");
}

TEST(Lagrangian, DegenerateIsAnError) {
    TempDir dir;
    int code = 0;
    json j = run_json({"lagrangian", dir.write("deg.json", kDegenerateLagrangian)}, &code);
    EXPECT_EQ(code, 2);
    EXPECT_EQ(j["error"]["kind"], "degenerate_lagrangian");
}

TEST(Verify, CsvTrajectory) {
    TempDir dir;
    std::string csv = dir.file("traj.csv");
    int code = 0;
    json j = run_json({"verify", source("problems/oscillator.json"), "--csv", csv, "--span", "0", "1", "--step", "0.01"},
                      &code);
    EXPECT_EQ(code, 0) << j.dump();
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t_param,x,v");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 101u);
}

TEST(Verify, CandidateFromFileIsChecked) {
    TempDir dir;
    std::ifstream in(source("problems/oscillator.json"));
    std::stringstream text;
    text << in.rdbuf();
    std::string wrong = text.str();
    wrong.replace(wrong.find("x^2 + v^2"), 9, "x^2 - v^2");
    int code = 0;
    json j = run_json({"verify", dir.write("wrong.json", wrong)}, &code);
    EXPECT_EQ(j["verdict"], "fail");
    EXPECT_EQ(code, 1);
}

TEST(Errors, MalformedExpressionReportsOffset) {
    TempDir dir;
    std::ifstream in(source("tests/fixtures/pass.json"));
    std::stringstream text;
    text << in.rdbuf();
    std::string bad = text.str();
    bad.replace(bad.find("[\"v\", \"-x\"]"), 11, "[\"v +* x\", \"-x\"]");
    int code = 0;
    json j = run_json({"check", dir.write("bad.json", bad)}, &code);
    EXPECT_EQ(code, 2);
    EXPECT_EQ(j["error"]["kind"], "invalid_problem");
    EXPECT_EQ(j["error"]["offset"], 3);
}

TEST(Errors, MalformedJsonReportsLineAndColumn) {
    TempDir dir;
    int code = 0;
    json j = run_json({"check", dir.write("j.json", "{\"schema_version\": 1,\n  \"chart\": }")}, &code);
    EXPECT_EQ(code, 2);
    EXPECT_EQ(j["error"]["line"], 2);
    EXPECT_TRUE(j["error"].contains("column"));
}

TEST(Errors, SchemaViolations) {
    TempDir dir;
    std::ifstream in(source("tests/fixtures/pass.json"));
    std::stringstream text;
    text << in.rdbuf();
    std::string base = text.str();

    std::string unknown = base;
    unknown.replace(unknown.find("\"schema_version\""), 0, "\"colour\": 1, ");
    EXPECT_EQ(run({"check", dir.write("u.json", unknown)}).code, 2);

    std::string version = base;
    version.replace(version.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
    EXPECT_EQ(run({"check", dir.write("v.json", version)}).code, 2);

    std::string stray = base;
    stray.replace(stray.find("[\"x\", \"v\"]"), 10, "[\"x\", \"w\"]");
    EXPECT_EQ(run({"check", dir.write("s.json", stray)}).code, 2);

    EXPECT_EQ(run({"check", dir.file("missing.json")}).code, 2);
}

TEST(Arguments, Validation) {
    std::string file = source("problems/oscillator.json");
    EXPECT_EQ(run({"verify", file, "--step", "0"}).code, 2);
    EXPECT_EQ(run({"verify", file, "--step", "-1"}).code, 2);
    EXPECT_EQ(run({"explode", file}).code, 2);
    EXPECT_EQ(run({"invariant", file, "--theorem", "t99"}).code, 2);
    EXPECT_EQ(run({"invariant"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Arguments, SeedPrecedence) {
    std::string file = source("problems/oscillator.json");
    ::unsetenv("HOJMAN_SEED");
    EXPECT_EQ(run_json({"check", file})["provenance"]["seed"], 1);
    ::setenv("HOJMAN_SEED", "9", 1);
    EXPECT_EQ(run_json({"check", file})["provenance"]["seed"], 9);
    EXPECT_EQ(run_json({"check", file, "--seed", "7"})["provenance"]["seed"], 7);
    ::unsetenv("HOJMAN_SEED");
}

TEST(RunCommand, ReportsCarryCommandAndFile) {
    Report r = run_command("check", source("problems/nonautonomous.json"), RunOptions{});
    EXPECT_EQ(r.command, "check");
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_EQ(exit_code(r.verdict), 0);
    EXPECT_EQ(exit_code(Verdict::Fail), 1);
    EXPECT_EQ(exit_code(Verdict::Error), 2);
    EXPECT_EQ(to_string(Verdict::Fail), "fail");
}
