#include "hojman/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "hojman/numeric.hpp"

namespace hojman::cli {

namespace {

struct Dynamics {
    VectorField x;
    std::optional<LagrangianData> ld;
    std::optional<SecondOrderSystem> sys;
};

CheckOptions check_options(const ProblemFile& p, const RunOptions& opts) {
    return {p.box(), opts.rtol.value_or(kDefaultRtol)};
}

Dynamics build_dynamics(const ProblemFile& p, const CheckOptions& o) {
    if (p.vector_field) return {VectorField(p.chart, *p.vector_field), std::nullopt, std::nullopt};
    if (p.forces) {
        SecondOrderSystem sys(p.base_coordinates(), *p.forces, p.chart.has_time());
        return {sode_lift(sys), std::nullopt, sys};
    }
    const LagrangianSpec& spec = *p.lagrangian;
    LagrangianData ld = lagrangian_analyze(spec.lagrangian, p.base_coordinates(), spec.time_dependent, o);
    SecondOrderSystem sys = p.chart.has_time() ? ld.system.with_time() : ld.system;
    VectorField x = sode_lift(sys);
    return {std::move(x), std::move(ld), std::move(sys)};
}

// Explicit multiplier, else |det W| for Lagrangian dynamics.
std::optional<Multiplier> file_multiplier(const ProblemFile& p, const Dynamics& d, const CheckOptions& o) {
    if (p.multiplier) return Multiplier(p.chart, *p.multiplier, o.box);
    if (d.ld) return lagrangian_multiplier(*d.ld, o, p.chart).multiplier;
    return std::nullopt;
}

// The symmetry field, or the prolonged point field when only that is given.
std::optional<VectorField> file_symmetry(const ProblemFile& p, const Dynamics& d) {
    if (p.symmetry) return VectorField(p.chart, *p.symmetry);
    if (p.point_field && d.sys) return prolong(*p.point_field, *d.sys);
    return std::nullopt;
}

CheckEntry entry(std::string name, const EqualityReport& r, bool required = true) {
    CheckEntry e;
    e.name = std::move(name);
    e.passed = r.equal;
    e.required = required;
    e.worst_residual = r.worst_residual;
    if (!r.equal) e.witness = r.worst_point;
    return e;
}

std::string h_text(const NormalizerResult& nf) {
    if (nf.h) return render(*nf.h);
    return "sampled pointwise";
}

std::string resolve_theorem(const ProblemFile& p, const RunOptions& opts, const Dynamics& d) {
    if (opts.theorem != "auto") return opts.theorem;
    if (p.lagrangian && p.point_field) return "lagrangian";
    if (p.chart.has_time() && d.x.nsode()) return "t41";
    if (p.h) return "t23";
    if (p.multiplier || d.ld) return "t22";
    return "t21";
}

using Constructed = ConstructedInvariant;

Constructed construct(const ProblemFile& p, const RunOptions& opts, const Dynamics& d, const CheckOptions& o) {
    std::string theorem = resolve_theorem(p, opts, d);
    if (theorem == "lagrangian") {
        if (!p.lagrangian) throw MissingIngredient("lagrangian");
        if (!p.point_field) throw MissingIngredient("point_field");
        LagrangianInvariant li = hojman_invariant_lagrangian(*p.point_field, *d.ld, o);
        return {std::move(li.result), theorem, li.route_agreement};
    }

    auto y = file_symmetry(p, d);
    if (!y) throw MissingIngredient("symmetry");
    if (theorem == "t21") return {invariant_divfree(d.x, *y, o), theorem, std::nullopt};
    if (theorem == "t22") {
        auto r = file_multiplier(p, d, o);
        if (!r) throw MissingIngredient("multiplier");
        return {invariant_multiplier(d.x, *y, *r, o), theorem, std::nullopt};
    }
    if (theorem == "t23") {
        std::optional<Expr> h = p.h;
        if (!h) {
            NormalizerResult nf = normalizer_factor(d.x, *y, o.box, o.rtol);
            if (!nf.h) throw MissingIngredient("h");
            h = nf.h;
        }
        return {invariant_normalizer(d.x, *y, file_multiplier(p, d, o), *h, o), theorem, std::nullopt};
    }
    if (theorem == "t41") {
        if (!p.chart.has_time()) throw MissingIngredient("chart.time");
        return {invariant_nonautonomous(d.x, *y, file_multiplier(p, d, o), o), theorem, std::nullopt};
    }
    if (!p.vector_field) throw MissingIngredient("vector_field");
    return {hamiltonian_invariant(d.x, *y, file_multiplier(p, d, o), p.h, o), theorem, std::nullopt};
}

void describe(Report& report, const Constructed& c) {
    report.theorem = c.theorem;
    report.construction = to_string(c.result.construction);
    report.invariant = render(c.result.invariant);
    report.trivial = c.result.constant_value.has_value();
}

}  // namespace

ConstructedInvariant construct_invariant(const ProblemFile& p, const RunOptions& opts) {
    CheckOptions o = check_options(p, opts);
    Dynamics d = build_dynamics(p, o);
    return construct(p, opts, d, o);
}

void cmd_check(const ProblemFile& p, const RunOptions& opts, Report& report) {
    CheckOptions o = check_options(p, opts);
    Dynamics d = build_dynamics(p, o);
    if (d.ld) {
        CheckEntry regular;
        regular.name = "Lagrangian is regular (det W nonzero on the box)";
        regular.detail = "det W = " + render(d.ld->hessian_det);
        report.checks.push_back(regular);
    }
    report.checks.push_back(entry("X is divergence-free", is_zero_numeric(divergence(d.x), o.box, o.rtol), false));

    auto r = file_multiplier(p, d, o);
    if (r) report.checks.push_back(entry("R is a Jacobi multiplier of X", multiplier_report(d.x, *r, o.box, o.rtol)));

    auto y = file_symmetry(p, d);
    if (y) {
        report.checks.push_back(
            entry("X(div Y) - Y(div X) = div [X,Y]", bracket_divergence_residual(d.x, *y, o.box, o.rtol)));
        NormalizerResult nf = normalizer_factor(d.x, *y, o.box, o.rtol, p.h);
        report.normalizer = to_string(nf.kind);
        CheckEntry rel;
        rel.name = "[Y,X] = h X";
        rel.passed = nf.kind != NormalizerResult::Kind::NotNormalizer;
        rel.worst_residual = nf.worst_residual;
        rel.witness = nf.witness;
        rel.detail = rel.passed ? "h = " + h_text(nf) : nf.detail;
        report.checks.push_back(rel);

        if (d.sys && d.x.nsode()) {
            SodeSymmetryReport sr = sode_symmetry_conditions(*y, d.x, o.box, o.rtol);
            for (const auto& c : sr.commuting_checks) report.checks.push_back(entry("commuting: " + c.name, c.report, false));
            for (const auto& c : sr.normalizer_checks) {
                report.checks.push_back(entry("normalizer: " + c.name, c.report, false));
            }
            CheckEntry agree;
            agree.name = "component conditions agree with the bracket";
            agree.passed = sr.routes_agree;
            report.checks.push_back(agree);
        }
    }
    if (p.point_field && d.sys) {
        VectorField x1 = prolong(*p.point_field, *d.sys);
        report.checks.push_back(entry("div X1 matches the prolongation expansion",
                                      equal_numeric(divergence(x1), prolonged_divergence_formula(*p.point_field, *d.sys),
                                                    o.box, o.rtol)));
    }
}

void cmd_invariant(const ProblemFile& p, const RunOptions& opts, Report& report) {
    CheckOptions o = check_options(p, opts);
    Dynamics d = build_dynamics(p, o);
    report.theorem = resolve_theorem(p, opts, d);
    Constructed c = construct(p, opts, d, o);
    describe(report, c);
    report.checks.push_back(entry("X(I) = 0", c.result.certification));
    if (c.route_agreement) report.checks.push_back(entry("closed form matches the normalizer route", *c.route_agreement));
}

void cmd_verify(const ProblemFile& p, const RunOptions& opts, Report& report) {
    CheckOptions o = check_options(p, opts);
    Dynamics d = build_dynamics(p, o);
    Expr candidate;
    if (p.invariant) {
        candidate = *p.invariant;
        report.invariant = render(candidate);
    } else {
        report.theorem = resolve_theorem(p, opts, d);
        Constructed c = construct(p, opts, d, o);
        describe(report, c);
        candidate = c.result.invariant;
    }
    if (!p.numeric.x0) throw MissingIngredient("numeric.x0");
    DriftRun run;
    run.x0 = *p.numeric.x0;
    auto span = opts.span ? opts.span : p.numeric.span;
    if (span) {
        run.t0 = span->first;
        run.t1 = span->second;
    }
    run.step = opts.step.value_or(p.numeric.step.value_or(run.step));
    if (!(run.step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(run.t1 > run.t0)) throw std::invalid_argument("span must satisfy t0 < t1");

    CertifySuite suite;
    suite.boxes = {o.box};
    suite.runs = {run};
    suite.rtol = o.rtol;
    Certification cert = certify_invariant(d.x, candidate, suite);
    for (const auto& pw : cert.pointwise) report.checks.push_back(entry("X(I) = 0 on the box", pw));
    if (cert.pointwise.empty()) {
        CheckEntry e;
        e.name = "X(I) = 0 on the box";
        e.passed = false;
        e.detail = cert.reason;
        report.checks.push_back(e);
    }
    for (const auto& out : cert.drift) {
        if (out.error) {
            CheckEntry e;
            e.name = "trajectory evaluation";
            e.passed = false;
            e.witness = out.run.x0.values();
            e.detail = *out.error;
            report.checks.push_back(e);
            continue;
        }
        DriftEntry de;
        de.x0 = out.run.x0.values();
        de.t0 = out.run.t0;
        de.t1 = out.run.t1;
        de.step = out.run.step;
        de.initial_value = out.report.initial_value;
        de.max_abs_drift = out.report.max_abs_drift;
        de.relative_drift = out.report.relative_drift;
        de.per_halving_ratio = out.report.per_halving_ratio;
        de.truncated = out.truncated;
        de.truncation_time = out.truncation_time;
        de.passed = out.drift_ok && out.ratio_ok.value_or(true);
        report.drift.push_back(de);
    }
    if (opts.csv) {
        Trajectory traj = integrate(d.x, run.x0, run.t0, run.t1, run.step);
        std::ofstream csv(*opts.csv);
        if (!csv) throw std::invalid_argument("cannot write " + *opts.csv);
        write_csv(traj, csv);
    }
}

void cmd_lagrangian(const ProblemFile& p, const RunOptions& opts, Report& report) {
    if (!p.lagrangian) throw MissingIngredient("lagrangian");
    CheckOptions o = check_options(p, opts);
    Dynamics d = build_dynamics(p, o);
    const LagrangianData& ld = *d.ld;
    std::vector<std::string> show = opts.show.empty() ? kShowItems : opts.show;
    auto wants = [&](const std::string& item) { return std::find(show.begin(), show.end(), item) != show.end(); };

    if (wants("hessian")) {
        std::string m = "[";
        for (std::size_t i = 0; i < ld.hessian.size(); ++i) {
            m += i ? ", [" : "[";
            for (std::size_t j = 0; j < ld.hessian[i].size(); ++j) m += (j ? ", " : "") + render(ld.hessian[i][j]);
            m += "]";
        }
        report.derived.emplace_back("W", m + "]");
        report.derived.emplace_back("det W", render(ld.hessian_det));
    }
    if (wants("forces")) {
        for (std::size_t i = 0; i < ld.system.n(); ++i) {
            report.derived.emplace_back("F_" + ld.system.base()[i], render(ld.system.forces()[i]));
        }
    }
    LagrangianMultiplier lm = lagrangian_multiplier(ld, o, p.chart);
    if (wants("multiplier")) report.derived.emplace_back("R", render(lm.multiplier.value()));
    if (wants("energy")) report.derived.emplace_back("E", render(ld.energy));

    CheckEntry el;
    el.name = "forces satisfy the Euler-Lagrange equations";
    report.checks.push_back(el);
    report.checks.push_back(entry("det W is a Jacobi multiplier", multiplier_report(d.x, lm.multiplier, o.box, o.rtol)));
    if (!ld.system.time_dependent()) {
        report.checks.push_back(entry("energy is conserved", is_zero_numeric(lie_derivative(d.x, ld.energy), o.box, o.rtol)));
    }
}

Report run_command(const std::string& command, const std::string& path, const RunOptions& opts) {
    Report report;
    report.command = command;
    report.file = path;
    std::optional<ProblemFile> problem;
    auto fail_with = [&](std::string name, const Point& witness, const std::string& detail) {
        CheckEntry e;
        e.name = std::move(name);
        e.passed = false;
        e.detail = detail;
        e.witness = witness;
        report.checks.push_back(e);
    };
    auto error_with = [&](std::string kind, const std::string& message, std::optional<Point> witness = std::nullopt) {
        report.error = ErrorInfo{std::move(kind), message, std::move(witness), std::nullopt, std::nullopt, std::nullopt};
    };
    try {
        problem = load_problem(path);
        report.file_sha256 = problem->sha256;
        if (opts.seed) problem->seed = *opts.seed;
        report.seed = problem->seed;
        if (command == "check") {
            cmd_check(*problem, opts, report);
        } else if (command == "invariant") {
            cmd_invariant(*problem, opts, report);
        } else if (command == "verify") {
            cmd_verify(*problem, opts, report);
        } else if (command == "lagrangian") {
            cmd_lagrangian(*problem, opts, report);
        } else {
            error_with("usage", "unknown command " + command);
        }
    } catch (const PreconditionViolation& e) {
        fail_with("precondition " + e.which(), e.witness(), e.what());
    } catch (const CertificationFailure& e) {
        fail_with("certification", e.witness(), e.what());
    } catch (const ProblemError& e) {
        error_with("invalid_problem", e.what());
        report.error->line = e.line();
        report.error->column = e.column();
        report.error->offset = e.offset();
    } catch (const PositivityViolation& e) {
        error_with("positivity_violation", e.what(), e.witness());
    } catch (const DegenerateLagrangian& e) {
        error_with("degenerate_lagrangian", e.what(), e.witness());
    } catch (const MissingIngredient& e) {
        error_with("insufficient_ingredients", e.what());
    } catch (const DimensionTooLarge& e) {
        error_with("dimension_too_large", e.what());
    } catch (const DomainError& e) {
        error_with("domain_error", e.what());
    } catch (const InsufficientSamplesError& e) {
        error_with("insufficient_samples", e.what());
    } catch (const DegenerateDirectionError& e) {
        error_with("degenerate_direction", e.what());
    } catch (const MissingTimeCoordinate& e) {
        error_with("missing_time_coordinate", e.what());
    } catch (const Error& e) {
        error_with("error", e.what());
    } catch (const std::invalid_argument& e) {
        error_with("invalid_argument", e.what());
    }
    report.settle();

    if (report.verdict == Verdict::Fail && problem) {
        bool has_witness = false;
        for (const auto& c : report.checks) {
            if (!c.passed && c.witness && !c.witness->empty()) has_witness = true;
        }
        for (const auto& d : report.drift) {
            if (!d.passed) has_witness = true;
        }
        if (!has_witness) {
            for (auto& c : report.checks) {
                if (!c.passed && c.required) {
                    c.witness = problem->box().point(0);
                    break;
                }
            }
        }
    }
    return report;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hojman symmetry first integrals: construct and certify conserved quantities", "hojman"};
    std::string command;
    std::string file;
    RunOptions opts;
    bool json = false;
    std::vector<double> span;
    std::optional<double> step;
    std::optional<std::uint64_t> seed;
    std::optional<double> rtol;
    std::optional<std::string> csv;

    app.add_option("command", command, "check | invariant | verify | lagrangian")
        ->required()
        ->check(CLI::IsMember({"check", "invariant", "verify", "lagrangian"}));
    app.add_option("file", file, "Problem file (JSON)")->required();
    app.add_option("--theorem", opts.theorem, "auto | t21 | t22 | t23 | t41 | lagrangian | hamiltonian")
        ->check(CLI::IsMember(kTheorems));
    app.add_flag("--json", json, "Newline-delimited JSON on stdout");
    app.add_option("--csv", csv, "Write the verify trajectory as CSV");
    app.add_option("--step", step, "Integration step")->check(CLI::PositiveNumber);
    app.add_option("--span", span, "Integration span A B")->expected(2);
    app.add_option("--seed", seed, "Sampling seed (overrides HOJMAN_SEED and the file)");
    app.add_option("--rtol", rtol, "Relative tolerance for identity checks")->check(CLI::PositiveNumber);
    app.add_option("--show", opts.show, "hessian | forces | multiplier | energy")->check(CLI::IsMember(kShowItems));

    auto usage_error = [&](const std::string& message) {
        if (json) {
            Report r;
            r.command = command;
            r.file = file;
            r.error = ErrorInfo{"usage", message, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
            r.settle();
            out << to_json_line(r);
        }
        err << "hojman: " << message << "\n";
        return exit_code(Verdict::Error);
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        for (int i = 1; i < argc; ++i) {
            if (std::string(argv[i]) == "--json") json = true;
        }
        return usage_error(e.what());
    }
    if (!span.empty()) {
        if (!(span[0] < span[1])) return usage_error("--span needs A < B");
        opts.span = std::pair{span[0], span[1]};
    }
    opts.step = step;
    opts.rtol = rtol;
    opts.csv = csv;
    opts.seed = seed;
    if (!opts.seed) {
        if (const char* env = std::getenv("HOJMAN_SEED"); env && *env) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (*end != '\0' || env[0] == '-') return usage_error("HOJMAN_SEED must be a non-negative integer");
            opts.seed = v;
        }
    }
    if (!opts.show.empty() && command != "lagrangian") return usage_error("--show applies to the lagrangian command");

    Report report = run_command(command, file, opts);
    out << (json ? to_json_line(report) : to_text(report));
    return exit_code(report.verdict);
}

}  // namespace hojman::cli
