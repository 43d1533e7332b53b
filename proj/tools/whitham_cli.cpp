// Command-line front end: simulate / sweep / check / verify.
//
// Exit codes: 0 = clean verdict (including "breaking"), 1 = numeric
// failure, 2 = usage or configuration error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "whitham/characteristics.hpp"
#include "whitham/hypothesis.hpp"
#include "whitham/io.hpp"
#include "whitham/singular_integral.hpp"
#include "whitham/solver.hpp"

namespace fs = std::filesystem;
using namespace whitham;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct ProfileSpec {
    DatumKind kind = DatumKind::scaled_sine;
    double amplitude = 1.0;
    double width = 1.0;
};

ProfileSpec profile_from_json(const json& j) {
    ProfileSpec p;
    const std::string kind = j.value("kind", "scaled-sine");
    if (kind == "scaled-sine") p.kind = DatumKind::scaled_sine;
    else if (kind == "bump-derivative") p.kind = DatumKind::bump_derivative;
    else throw std::invalid_argument("config: unknown profile kind \"" + kind + "\"");
    p.amplitude = j.value("amplitude", 1.0);
    p.width = j.value("width", 1.0);
    return p;
}

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    f >> j;
    return j;
}

struct RunArtifacts {
    Trajectory traj;
    BreakingReport report;
    SolverConfig config;
};

RunArtifacts execute_run(const SolverConfig& config, const GridFunction& u0, double eps,
                         const fs::path& outdir, const std::string& tag,
                         std::optional<SolverState> resume_state = std::nullopt) {
    fs::create_directories(outdir);
    CheckpointHook hook;
    if (config.checkpoint_every > 0) {
        hook = [&, tag](const SolverState& s) {
            io::write_file((outdir / (tag + "_checkpoint.json")).string(),
                           io::checkpoint_to_json(config, s).dump(2));
        };
    }
    Trajectory traj = resume_state ? run_from(config, *resume_state, hook)
                                   : run(config, u0, hook);
    BreakingReport rep = breaking_detect(traj, eps);
    io::write_file((outdir / (tag + "_trajectory.csv")).string(), io::trajectory_csv(traj));
    io::write_file((outdir / (tag + "_report.json")).string(),
                   io::breaking_report_to_json(rep).dump(2));
    io::write_file((outdir / (tag + "_final_field.csv")).string(),
                   io::field_csv(traj.snapshots.back().u));
    return {std::move(traj), rep, config};
}

void write_manifest(const fs::path& outdir, const std::string& command_line,
                    const SolverConfig& config, const std::vector<std::string>& outputs,
                    double wall_seconds, const std::string& verdict) {
    json j;
    j["command_line"] = command_line;
    j["config"] = io::config_to_json(config);
    j["code_version"] = "whitham 1.0";
    j["outputs"] = outputs;
    j["wall_clock_seconds"] = wall_seconds;
    j["verdict"] = verdict;
    io::write_file((outdir / "manifest.json").string(), j.dump(2));
}

GridFunction build_datum(const ProfileSpec& p, const SolverConfig& c) {
    return datum_factory(p.kind, p.amplitude, p.width, c.domain_length, c.n_points).grid;
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 const std::string& resume, double eps, const std::string& cmdline) {
    const auto t0 = std::chrono::steady_clock::now();
    const json j = load_json(config_path);
    const SolverConfig config = io::config_from_json(j);
    config.validate();
    const ProfileSpec prof = profile_from_json(j.value("profile", json::object()));
    const fs::path outdir(out);

    std::optional<SolverState> resume_state;
    if (!resume.empty()) resume_state = io::checkpoint_to_state(load_json(resume));

    const GridFunction u0 = build_datum(prof, config);
    const RunArtifacts art = execute_run(config, u0, eps, outdir, "run", resume_state);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(outdir, cmdline, config,
                   {"run_trajectory.csv", "run_report.json", "run_final_field.csv"}, wall,
                   to_string(art.report.verdict));
    std::cout << "verdict: " << to_string(art.report.verdict) << "  T_est: " << art.report.T_est
              << "  bracket: [" << art.report.T_lower << ", " << art.report.T_upper << "]\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& alphas,
              const std::string& out, double eps, const std::string& cmdline) {
    if (alphas.empty()) {
        std::cerr << "sweep: empty alpha list\n";
        return kExitUsage;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const json j = load_json(config_path);
    const SolverConfig base = io::config_from_json(j);
    const ProfileSpec prof = profile_from_json(j.value("profile", json::object()));
    const fs::path outdir(out);
    fs::create_directories(outdir);

    struct Row {
        double alpha;
        std::string verdict;
        double t_est = std::nan("");
        bool bracket = false;
        int n_points = 0;
        std::string error;
    };
    auto one = [&](double a) {
        Row row;
        row.alpha = a;
        try {
            SolverConfig c = base;
            c.alpha = a;
            const GridFunction u0 = build_datum(prof, c);
            std::ostringstream tag;
            tag << "alpha_" << a;
            const RunArtifacts art = execute_run(c, u0, eps, outdir, tag.str());
            row.verdict = to_string(art.report.verdict);
            row.t_est = art.report.T_est;
            row.bracket = art.report.bracket_contains;
            row.n_points = art.traj.snapshots.back().u.n_points();
        } catch (const std::exception& e) {
            row.verdict = "error";
            row.error = e.what();
        }
        return row;
    };

    std::vector<std::future<Row>> futs;
    for (double a : alphas) futs.push_back(std::async(std::launch::async, one, a));
    std::ostringstream csv;
    csv << "alpha,verdict,T_est,bracket_contains,n_points,error\r\n";
    for (auto& f : futs) {
        const Row r = f.get();
        csv << io::fmt(r.alpha) << ',' << r.verdict << ',' << io::fmt(r.t_est) << ','
            << (r.bracket ? "true" : "false") << ',' << r.n_points << ',' << r.error << "\r\n";
    }
    io::write_file((outdir / "sweep.csv").string(), csv.str());
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(outdir, cmdline, base, {"sweep.csv"}, wall, "sweep-complete");
    std::cout << csv.str();
    return kExitOk;
}

int cmd_check(const std::string& profile, double A, double width, double L, int n_points,
              double alpha, double eps, const std::string& theorem, bool bisect,
              const std::string& out) {
    const DatumKind kind =
        profile == "bump-derivative" ? DatumKind::bump_derivative : DatumKind::scaled_sine;
    const TheoremId tid = theorem == "1.2" ? TheoremId::thm_12 : TheoremId::thm_11;
    const Alpha a(alpha);
    const DatumProfile phi = datum_factory(kind, A, width, L, n_points);
    const auto windows = constants_feasible(phi, eps, a);
    const auto picked = pick_constants(windows);
    const HypothesisReport rep =
        tid == TheoremId::thm_11
            ? check_theorem_11(phi, a, eps, picked.C0, picked.C1, picked.C2)
            : check_theorem_12(phi, a, eps, picked.C0, picked.C1, picked.C2);
    std::cout << io::hypothesis_report_table(rep);
    if (!out.empty())
        io::write_file(out, io::hypothesis_report_to_json(rep).dump(2));
    if (bisect) {
        const auto thr = amplitude_threshold(kind, width, L, n_points, a, eps, tid);
        if (thr)
            std::cout << "amplitude threshold A* ~ " << *thr << "\n";
        else
            std::cout << "amplitude threshold A* not found below 1e9\n";
    }
    return kExitOk;
}

int verify_operators() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "  PASS  " : "  FAIL  ") << name << "\n";
        if (!ok) ++failures;
    };
    const double L = 2 * M_PI;
    std::vector<double> v(128);
    for (int j = 0; j < 128; ++j) v[j] = std::cos(2.0 * L * j / 128);
    const GridFunction u = GridFunction::from_values(L, v);
    const Alpha a(0.35);
    const auto d = dispersion_apply(u, a).values();
    double err = 0.0;
    for (int j = 0; j < 128; ++j)
        err = std::max(err, std::fabs(d[j] - std::pow(2.0, 0.35) * std::sin(2.0 * L * j / 128)));
    check("dispersion on cos(2x)", err < 1e-10);
    const double c = calibration_constant(a);
    const double direct = kernel_apply_direct(u, a, 0, 0.9, 0.5).total;
    const double spectral = interpolate(dispersion_apply(u, a), 0.9);
    check("kernel/spectral reconciliation", std::fabs(c * direct - spectral) <
                                                1e-6 * std::fabs(spectral));
    check("antisymmetry", std::fabs(inner_product(u, dispersion_apply(u, a))) <
                              1e-10 * l2_norm(u) * l2_norm(u));
    return failures;
}

int verify_lemmas() {
    int failures = 0;
    for (double a : {0.1, 0.2, 0.3, 0.45})
        for (int n = 3; n <= 40; ++n) {
            const auto r = stirling_lemma_check(n, Alpha(a));
            if (!r.holds) {
                std::cout << "  FAIL  stirling n=" << n << " alpha=" << a << "\n";
                ++failures;
            }
        }
    std::cout << (failures == 0 ? "  PASS  " : "  FAIL  ")
              << "stirling lemma sweep n=3..40\n";
    return failures;
}

SolverConfig burgers_config() {
    SolverConfig c;
    c.alpha = 0.5;
    c.enable_dispersion = false;
    c.n_points = 256;
    c.t_end = 0.5;
    c.dt_initial = 2e-3;
    c.slope_stop = -1e3;
    return c;
}

int verify_energy() {
    int failures = 0;
    SolverConfig c = burgers_config();
    c.enable_dispersion = true;
    c.alpha = 0.3;
    c.t_end = 0.2;
    std::vector<double> v(c.n_points);
    for (int j = 0; j < c.n_points; ++j) v[j] = -std::sin(2 * M_PI * j / c.n_points);
    const Trajectory traj = run(c, GridFunction::from_values(c.domain_length, v));
    const auto mid = traj.snapshots[traj.snapshots.size() / 2];
    const auto e = energy_identity_check(mid, Alpha(c.alpha), 1e-4);
    std::cout << (e.residual < 1e-4 ? "  PASS  " : "  FAIL  ")
              << "energy identity residual = " << e.residual << "\n";
    if (e.residual >= 1e-4) ++failures;
    return failures;
}

int verify_scaling() {
    int failures = 0;
    const double lambda = 2.0;
    for (double a : {0.3, 0.5}) {
        SolverConfig base;
        base.alpha = a;
        base.domain_length = 4 * M_PI;
        base.n_points = 256;
        base.t_end = 0.4;
        base.adaptive_dt = false;
        base.dt_initial = 1e-3;
        std::vector<double> v(base.n_points);
        for (int j = 0; j < base.n_points; ++j)
            v[j] = 0.5 * std::sin(2.0 * 2 * M_PI * j / base.n_points);
        const GridFunction u0 = GridFunction::from_values(base.domain_length, v);

        SolverConfig scaled = base;
        scaled.domain_length = base.domain_length / lambda;
        scaled.t_end = base.t_end / std::pow(lambda, a);
        scaled.dt_initial = base.dt_initial / std::pow(lambda, a);
        std::vector<double> w(scaled.n_points);
        for (int j = 0; j < scaled.n_points; ++j)
            w[j] = std::pow(lambda, a - 1.0) *
                   interpolate(u0, lambda * scaled.domain_length * j / scaled.n_points);
        const GridFunction w0 = GridFunction::from_values(scaled.domain_length, w);

        const Trajectory tb = run(base, u0);
        const Trajectory ts = run(scaled, w0);
        const GridFunction& ub = tb.snapshots.back().u;
        const GridFunction& us = ts.snapshots.back().u;
        double errmax = 0.0, scale = 0.0;
        for (int j = 0; j < 64; ++j) {
            const double x = scaled.domain_length * j / 64.0;
            const double expect = std::pow(lambda, a - 1.0) * interpolate(ub, lambda * x);
            errmax = std::max(errmax, std::fabs(interpolate(us, x) - expect));
            scale = std::max(scale, std::fabs(expect));
        }
        const bool ok = errmax < 1e-6 * std::max(scale, 1e-3);
        std::cout << (ok ? "  PASS  " : "  FAIL  ") << "scaling symmetry alpha=" << a
                  << " rel err " << errmax / std::max(scale, 1e-300) << "\n";
        if (!ok) ++failures;
    }
    return failures;
}

int cmd_verify(const std::string& suite) {
    int failures = 0;
    if (suite == "operators") failures = verify_operators();
    else if (suite == "lemmas") failures = verify_lemmas();
    else if (suite == "energy") failures = verify_energy();
    else if (suite == "scaling") failures = verify_scaling();
    else {
        std::cerr << "unknown suite: " << suite << "\n";
        return kExitUsage;
    }
    return failures == 0 ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudospectral simulator and verification harness for the "
                 "fractional-dispersion Whitham equation"};
    app.require_subcommand(1);

    std::string config_path, out = "out", resume, theorem = "1.1", suite, report_out;
    std::string profile = "scaled-sine";
    std::vector<double> alphas;
    double eps = 0.1, amplitude = 1.0, width = 1.0, alpha = 0.2, domain_length = 2 * M_PI;
    int n_points = 256;
    bool bisect = false;

    auto* sim = app.add_subcommand("simulate", "run one simulation from a config file");
    sim->add_option("--config", config_path, "JSON config file")->required();
    sim->add_option("--out", out, "output directory");
    sim->add_option("--resume", resume, "checkpoint file to resume from");
    sim->add_option("--eps", eps, "epsilon for the breaking bracket");

    auto* swp = app.add_subcommand("sweep", "run a sweep over alpha values");
    swp->add_option("--config", config_path, "JSON base config file")->required();
    swp->add_option("--alphas", alphas, "alpha values")->delimiter(',');
    swp->add_option("--out", out, "output directory");
    swp->add_option("--eps", eps, "epsilon for the breaking bracket");

    auto* chk = app.add_subcommand("check", "machine-check theorem hypotheses for a datum");
    chk->add_option("--profile", profile, "scaled-sine | bump-derivative");
    chk->add_option("--amplitude", amplitude, "datum amplitude");
    chk->add_option("--width", width, "bump width");
    chk->add_option("--domain-length", domain_length, "period");
    chk->add_option("--n-points", n_points, "grid points");
    chk->add_option("--alpha", alpha, "dispersion exponent")->required();
    chk->add_option("--eps", eps, "epsilon")->check(CLI::Range(1e-12, 0.999999));
    chk->add_option("--theorem", theorem, "1.1 | 1.2");
    chk->add_flag("--bisect", bisect, "bisection for the threshold amplitude");
    chk->add_option("--out", report_out, "write the JSON report here");

    auto* ver = app.add_subcommand("verify", "run a built-in verification suite");
    ver->add_option("suite", suite, "operators | lemmas | energy | scaling")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::ostringstream cmdline;
    for (int i = 0; i < argc; ++i) cmdline << (i ? " " : "") << argv[i];

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out, resume, eps, cmdline.str());
        if (swp->parsed()) return cmd_sweep(config_path, alphas, out, eps, cmdline.str());
        if (chk->parsed())
            return cmd_check(profile, amplitude, width, domain_length, n_points, alpha, eps,
                             theorem, bisect, report_out);
        if (ver->parsed()) return cmd_verify(suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
