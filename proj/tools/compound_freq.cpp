// compound-freq: frequency-domain verification of compound delay systems.

#include "cfreq/error.hpp"
#include "cfreq/models.hpp"
#include "cfreq/parallel.hpp"
#include "cfreq/report.hpp"
#include "cfreq/spectrum.hpp"
#include "cfreq/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cfreq;

namespace {

enum Exit { kSatisfied = 0, kViolated = 1, kPrecondition = 2, kUsage = 3, kNumeric = 4 };

struct RunConfig {
    std::string command;
    std::string model = "suarez-schopf";
    // suarez-schopf
    double alpha = 0.6;
    /// 0 = model default (0.83 Suarez-Schopf, 4.5 Mackey-Glass, 1 custom)
    double tau = 0.0;
    std::string radius = "auto";
    std::string radius_coefficient = "reported";
    // mackey-glass
    double gamma = 0.1;
    double beta = 0.2;
    double kappa = 10.0;
    double lambda = 0.0;
    // custom
    double a0 = -1.0;
    double a1 = 0.5;
    double tau0 = 0.0;
    double b_tilde = 1.0;
    double lambda_bound = 1.0;
    std::string constraint = "norm";
    // scheme
    SchemeConfig scheme;
    std::string path = "fast";
    bool no_mirror = false;
    // command specific
    int count = 4;
    std::vector<double> alphas{0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> taus{0.9};
    bool tau_fraction = false;
    std::vector<int> Ns{10, 20, 30};
    std::vector<double> Ts{15.0, 25.0};
    // output
    std::string output_dir = ".";
    std::string dump_solutions;
    bool timings = false;
    bool quiet = false;
};

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

template <typename T>
std::string fmt_list(const std::vector<T>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt_real(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out + "]";
}

/// Effective configuration as TOML that --config reads back.
std::string effective_toml(const RunConfig& c) {
    std::ostringstream o;
    auto str = [&](const char* k, const std::string& v) { o << k << " = \"" << v << "\"\n"; };
    auto real = [&](const char* k, double v) { o << k << " = " << fmt_real(v) << "\n"; };
    auto integer = [&](const char* k, long v) { o << k << " = " << v << "\n"; };
    auto flag = [&](const char* k, bool v) { o << k << " = " << (v ? "true" : "false") << "\n"; };
    str("model", c.model);
    if (c.model == "suarez-schopf") {
        real("alpha", c.alpha);
        real("tau", c.tau);
        str("radius", c.radius);
        str("radius-coefficient", c.radius_coefficient);
    } else if (c.model == "mackey-glass") {
        real("gamma", c.gamma);
        real("beta", c.beta);
        real("kappa", c.kappa);
        real("tau", c.tau);
        real("lambda", c.lambda);
    } else {
        real("a0", c.a0);
        real("a1", c.a1);
        real("tau", c.tau);
        real("tau0", c.tau0);
        real("b-tilde", c.b_tilde);
        real("lambda-bound", c.lambda_bound);
        str("constraint", c.constraint);
    }
    integer("m", c.scheme.m);
    integer("N", c.scheme.N);
    real("T", c.scheme.T);
    real("Omega", c.scheme.Omega);
    real("nu0", c.scheme.nu0);
    real("omega-step", c.scheme.omega_step);
    real("h", c.scheme.h);
    integer("theta-stride", c.scheme.theta_stride);
    str("path", c.path);
    flag("no-mirror", c.no_mirror);
    flag("experimental", c.scheme.experimental);
    if (c.command == "roots") integer("count", c.count);
    if (c.command == "scan") {
        o << "alphas = " << fmt_list(c.alphas) << "\n";
        o << "taus = " << fmt_list(c.taus) << "\n";
        flag("tau-fraction", c.tau_fraction);
    }
    if (c.command == "convergence") {
        o << "Ns = " << fmt_list(c.Ns) << "\n";
        o << "Ts = " << fmt_list(c.Ts) << "\n";
    }
    return o.str();
}

RadiusCoefficient radius_coefficient(const RunConfig& c) {
    return c.radius_coefficient == "printed" ? RadiusCoefficient::Printed : RadiusCoefficient::Reported;
}

LinearDelaySystem build_system(const RunConfig& c) {
    if (c.model == "suarez-schopf") {
        double R = 0.0;
        if (c.radius == "auto") {
            R = ss_attractor_radius(c.alpha, c.tau, radius_coefficient(c));
        } else {
            try {
                R = std::stod(c.radius);
            } catch (const std::exception&) {
                fail(ErrorKind::Configuration, "--radius expects 'auto' or a number");
            }
        }
        return suarez_schopf_system({c.alpha, c.tau, R});
    }
    if (c.model == "mackey-glass") return mackey_glass_system({c.gamma, c.beta, c.kappa, c.tau}, c.lambda);
    LinearDelaySystem sys;
    sys.a0 = c.a0;
    sys.a1 = c.a1;
    sys.tau = c.tau;
    sys.tau0 = c.tau0;
    sys.b_tilde = c.b_tilde;
    sys.lambda_bound = c.lambda_bound;
    sys.constraint_kind = c.constraint == "monotone" ? ConstraintKind::MonotoneSector : ConstraintKind::NormBound;
    sys.validate();
    return sys;
}

nlohmann::ordered_json model_json(const RunConfig& c, const LinearDelaySystem& sys) {
    nlohmann::ordered_json j;
    j["model"] = c.model;
    if (c.model == "suarez-schopf") {
        j["alpha"] = c.alpha;
        j["tau"] = c.tau;
        j["radius"] = std::sqrt(sys.lambda_bound / 1.5);
        j["radius_mode"] = c.radius;
        j["radius_coefficient"] = c.radius_coefficient;
    } else if (c.model == "mackey-glass") {
        j["gamma"] = c.gamma;
        j["beta"] = c.beta;
        j["kappa"] = c.kappa;
        j["tau"] = c.tau;
    }
    j["system"] = to_json(sys);
    return j;
}

nlohmann::ordered_json scheme_json(const RunConfig& c) {
    const auto& s = c.scheme;
    return {{"m", s.m},           {"N", s.N},
            {"T", s.T},           {"Omega", s.Omega},
            {"nu0", s.nu0},       {"omega_step", s.omega_step},
            {"h", s.h},           {"theta_stride", s.theta_stride},
            {"path", c.path},     {"mirror", s.mirror},
            {"experimental", s.experimental}};
}

void log(const RunConfig& c, const std::string& msg) {
    if (!c.quiet) std::cerr << msg << '\n';
}

void dump_solutions(const RunConfig& c, const LinearDelaySystem& sys) {
    if (c.dump_solutions.empty()) return;
    fs::create_directories(c.dump_solutions);
    const SolutionSet S = integrate_solutions(sys, c.scheme, resolve_threads(c.scheme.threads));
    for (const auto& tab : S.basis) tab.write_csv((fs::path(c.dump_solutions) / (tab.label().to_string() + ".csv")).string());
    S.fundamental.write_csv((fs::path(c.dump_solutions) / "fundamental.csv").string());
}

int run_sweep(const RunConfig& c, bool verdict_exit, nlohmann::ordered_json extra = {}) {
    const LinearDelaySystem sys = build_system(c);
    dump_solutions(c, sys);
    log(c, "sweeping " + std::to_string(omega_grid(c.scheme).size()) + " frequencies");
    const FrequencySweepReport rep = frequency_sweep(sys, c.scheme);
    fs::create_directories(c.output_dir);
    const fs::path dir(c.output_dir);
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["model"] = model_json(c, sys);
    j["scheme"] = scheme_json(c);
    j["report"] = to_json(rep, c.timings);
    for (auto& [k, v] : extra.items()) j[k] = v;
    write_text((dir / "report.json").string(), j.dump(2) + "\n");
    write_text((dir / "config.toml").string(), effective_toml(c));
    if (rep.verdict != Verdict::PreconditionFailed) write_curve_csv((dir / "curve.csv").string(), rep);

    std::printf("verdict: %s\n", to_string(rep.verdict));
    std::printf("spectral bound: %.6g (need < %.6g)\n", rep.spectral_bound, -c.scheme.nu0);
    if (rep.verdict != Verdict::PreconditionFailed) {
        std::printf("threshold: %.6g  critical alpha: %.6g at omega = %.6g\n", rep.threshold, rep.critical_alpha,
                    rep.critical_omega);
        std::printf("margin: %.6g%s\n", rep.margin, rep.near_threshold ? " (near-threshold)" : "");
        std::printf("tail gap at critical omega: %.3g\n", rep.tail_gap_at_argmax);
    }
    std::printf("wrote %s\n", (dir / "report.json").string().c_str());
    if (!verdict_exit) return rep.verdict == Verdict::PreconditionFailed ? kPrecondition : kSatisfied;
    switch (rep.verdict) {
        case Verdict::Satisfied: return kSatisfied;
        case Verdict::Violated: return kViolated;
        case Verdict::PreconditionFailed: return kPrecondition;
    }
    return kNumeric;
}

int run_roots(const RunConfig& c) {
    const LinearDelaySystem sys = build_system(c);
    const Spectrum spec = leading_roots(sys, c.count);
    nlohmann::ordered_json j;
    j["model"] = model_json(c, sys);
    j["spectrum"] = to_json(spec);
    nlohmann::ordered_json residuals = nlohmann::ordered_json::array();
    for (const auto& r : spec.roots) residuals.push_back(std::abs(characteristic_value(sys, r)));
    j["residuals"] = residuals;
    std::cout << j.dump(2) << '\n';
    return kSatisfied;
}

int run_scan(const RunConfig& c) {
    ParamGrid grid;
    if (c.model == "suarez-schopf") {
        SsGrid g;
        g.alphas = c.alphas;
        g.taus = c.taus;
        g.tau_as_fraction = c.tau_fraction;
        if (c.radius != "auto") g.radius = std::stod(c.radius);
        g.coefficient = radius_coefficient(c);
        grid = g;
    } else if (c.model == "mackey-glass") {
        MgGrid g;
        g.gamma = c.gamma;
        g.beta = c.beta;
        g.kappa = c.kappa;
        g.taus = c.taus;
        if (c.lambda > 0.0) g.lambda = c.lambda;
        grid = g;
    } else {
        fail(ErrorKind::Configuration, "scan supports the suarez-schopf and mackey-glass models");
    }
    const auto pts = region_scan(grid, c.scheme, [&](std::size_t done, std::size_t total) {
        log(c, "point " + std::to_string(done) + "/" + std::to_string(total));
    });
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["model"] = c.model;
    j["scheme"] = scheme_json(c);
    j["points"] = to_json(pts);
    fs::create_directories(c.output_dir);
    write_text((fs::path(c.output_dir) / "scan.json").string(), j.dump(2) + "\n");
    write_text((fs::path(c.output_dir) / "config.toml").string(), effective_toml(c));
    bool any_error = false;
    for (const auto& p : pts) {
        std::string desc;
        for (const auto& [k, v] : p.params) desc += k + "=" + fmt_real(v) + " ";
        if (p.status == ScanStatus::Evaluated)
            std::printf("%s-> %s (margin %.4g%s)\n", desc.c_str(), to_string(p.verdict), p.margin,
                        p.near_threshold ? ", near-threshold" : "");
        else
            std::printf("%s-> %s: %s\n", desc.c_str(), to_string(p.status), p.message.c_str());
        any_error = any_error || p.status == ScanStatus::Error;
    }
    return any_error ? kNumeric : kSatisfied;
}

int run_convergence(const RunConfig& c) {
    const LinearDelaySystem sys = build_system(c);
    const auto rep = convergence_report(sys, c.scheme, c.Ns, c.Ts, [&](std::size_t done, std::size_t total) {
        log(c, "horizon " + std::to_string(done) + "/" + std::to_string(total));
    });
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["model"] = model_json(c, sys);
    j["scheme"] = scheme_json(c);
    j["convergence"] = to_json(rep);
    fs::create_directories(c.output_dir);
    write_text((fs::path(c.output_dir) / "convergence.json").string(), j.dump(2) + "\n");
    write_text((fs::path(c.output_dir) / "config.toml").string(), effective_toml(c));
    for (const auto& d : rep.differences)
        std::printf("(N=%d, T=%g) vs (N=%d, T=%g): sup diff %.3e%s\n", d.N_a, d.T_a, d.N_b, d.T_b, d.sup_diff,
                    d.stabilized ? " stabilized" : "");
    return kSatisfied;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Configuration:
        case ErrorKind::Domain:
        case ErrorKind::Contract: return kUsage;
        case ErrorKind::Precondition: return kPrecondition;
        default: return kNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"Frequency-domain verification for compound cocycles of scalar delay equations"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "TOML file with option values (flags win)");
    app.add_option("command", c.command, "roots | sweep | verify | scan | convergence | demo-ss | demo-mg")
        ->required()
        ->check(CLI::IsMember({"roots", "sweep", "verify", "scan", "convergence", "demo-ss", "demo-mg"}));
    app.add_option("--model", c.model)->check(CLI::IsMember({"suarez-schopf", "mackey-glass", "custom"}));
    app.add_option("--alpha", c.alpha, "Suarez-Schopf delayed feedback");
    app.add_option("--tau", c.tau, "delay in model units (0 = model default)");
    app.add_option("--radius", c.radius, "attractor radius: auto or a value");
    app.add_option("--radius-coefficient", c.radius_coefficient)->check(CLI::IsMember({"reported", "printed"}));
    app.add_option("--gamma", c.gamma);
    app.add_option("--beta", c.beta);
    app.add_option("--kappa", c.kappa);
    app.add_option("--lambda", c.lambda, "Mackey-Glass sector bound override (0 = formula)");
    app.add_option("--a0", c.a0);
    app.add_option("--a1", c.a1);
    app.add_option("--tau0", c.tau0);
    app.add_option("--b-tilde", c.b_tilde);
    app.add_option("--lambda-bound", c.lambda_bound);
    app.add_option("--constraint", c.constraint)->check(CLI::IsMember({"norm", "monotone"}));
    app.add_option("--m", c.scheme.m, "compound order");
    app.add_option("--N", c.scheme.N, "basis cutoff");
    app.add_option("--T", c.scheme.T, "time horizon");
    app.add_option("--Omega", c.scheme.Omega, "frequency range");
    app.add_option("--nu0", c.scheme.nu0);
    app.add_option("--omega-step", c.scheme.omega_step);
    app.add_option("--h", c.scheme.h, "target integration step");
    app.add_option("--theta-stride", c.scheme.theta_stride, "theta grid stride (0 = auto)");
    app.add_option("--path", c.path)->check(CLI::IsMember({"fast", "paper"}));
    app.add_flag("--no-mirror", c.no_mirror, "evaluate negative frequencies too");
    app.add_flag("--experimental", c.scheme.experimental, "allow m >= 3");
    app.add_option("--threads", c.scheme.threads, "worker threads (0 = auto)");
    app.add_option("--count", c.count, "roots: number of leading roots");
    app.add_option("--alphas", c.alphas, "scan: alpha values")->delimiter(',');
    app.add_option("--taus", c.taus, "scan: tau values (fractions of 1/(2 alpha) with --tau-fraction)")->delimiter(',');
    app.add_flag("--tau-fraction", c.tau_fraction);
    app.add_option("--Ns", c.Ns, "convergence: N values")->delimiter(',');
    app.add_option("--Ts", c.Ts, "convergence: T values")->delimiter(',');
    app.add_option("--output-dir,-o", c.output_dir);
    app.add_option("--dump-solutions", c.dump_solutions, "write every solution table as CSV into this directory");
    app.add_flag("--timings", c.timings, "include wall-clock timings in the report");
    app.add_flag("--quiet,-q", c.quiet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (c.command == "demo-ss") {
        c.model = "suarez-schopf";
        c.alpha = 0.6;
        c.tau = 0.83;
        c.radius = "auto";
    } else if (c.command == "demo-mg") {
        c.model = "mackey-glass";
        c.gamma = 0.1;
        c.beta = 0.2;
        c.kappa = 10.0;
        c.tau = 4.5;
        c.lambda = 0.0;
    }
    if (c.tau == 0.0) c.tau = c.model == "suarez-schopf" ? 0.83 : c.model == "mackey-glass" ? 4.5 : 1.0;
    c.scheme.path = c.path == "paper" ? SchemePath::PaperFaithful : SchemePath::FubiniFast;
    c.scheme.mirror = !c.no_mirror;

    try {
        if (c.command == "roots") return run_roots(c);
        if (c.command == "scan") return run_scan(c);
        if (c.command == "convergence") return run_convergence(c);
        if (c.command == "sweep") return run_sweep(c, false);
        if (c.command == "demo-mg") {
            const double printed = mg_paper_tau0();
            const double crossing = mg_hopf_crossing_delay(c.gamma, c.beta, c.kappa);
            std::printf("tau0 (printed formula): %.6f\ntau0 (root crossing):   %.6f\n", printed, crossing);
            return run_sweep(c, true, {{"tau0_printed_formula", printed}, {"tau0_root_crossing", crossing}});
        }
        return run_sweep(c, true);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
}
