// Command-line front end: run scenarios, verify stored results.

#include <CLI11.hpp>

#include <iostream>

#include "qclock/runner.hpp"

namespace {

using namespace qclock;

struct RunFlags {
    std::string config_path;
    std::string out;
    double dt = 0.0;
    int n = 0;
    double t_max = 0.0;
    std::uint64_t seed = 0;
    bool emit_plot = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config_path, "configuration file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--dt", f.dt, "time step")->check(CLI::PositiveNumber);
    cmd->add_option("--n", f.n, "grid points (power of two)")->check(CLI::PositiveNumber);
    cmd->add_option("--t-max", f.t_max, "last sample time");
    cmd->add_option("--seed", f.seed, "seed for the random probe states");
    cmd->add_flag("--emit-plot", f.emit_plot, "also write a gnuplot script");
}

ConfigOverrides overrides_from(const CLI::App* cmd, const RunFlags& f, const std::string& scenario) {
    ConfigOverrides o;
    o.scenario = scenario;
    if (cmd->count("--dt")) o.dt = f.dt;
    if (cmd->count("--n")) o.n = f.n;
    if (cmd->count("--t-max")) o.t_max = f.t_max;
    if (cmd->count("--seed")) o.seed = f.seed;
    if (cmd->count("--out")) o.out_dir = f.out;
    if (f.emit_plot) o.emit_plot = true;
    return o;
}

int report(const VerifyOutcome& v) {
    for (const std::string& name : v.failed) std::cout << "FAIL " << name << "\n";
    for (const std::string& name : v.inconclusive) std::cout << "INCONCLUSIVE " << name << " (no applicable samples)\n";
    switch (v.status) {
    case ExitStatus::Pass: std::cout << "verdict: pass\n"; break;
    case ExitStatus::Violation: std::cout << "verdict: violation\n"; break;
    default: std::cout << "verdict: inconclusive\n"; break;
    }
    return static_cast<int>(v.status);
}

int run(const CLI::App* cmd, const RunFlags& f, const std::string& scenario) {
    const ConfigOverrides o = overrides_from(cmd, f, scenario);
    ExperimentConfig cfg = f.config_path.empty() ? resolve_config(nlohmann::json::object(), o)
                                                 : load_config(f.config_path, o);
    RunHooks hooks;
    hooks.on_manifest = [&](const RunManifest& m) { write_manifest(m, cfg.output.dir); };
    const ScenarioResult result = run_scenario(cfg, hooks);
    write_outputs(result, cfg.output.dir, cfg.output.emit_plot);

    std::cout << "scenario " << cfg.scenario << ": dH_c = " << result.manifest.energy_spread
              << ", window end = " << result.manifest.window_end
              << ", propagation error = " << result.manifest.propagation_error << "\n";
    for (const CheckSummary& c : result.checks) {
        std::cout << (c.informational ? "  info " : c.applicable_samples == 0 ? "  n/a  " : c.passed ? "  ok   " : "  FAIL ")
                  << c.name << "  worst margin " << c.worst_margin << " (" << c.applicable_samples << " samples)\n";
    }
    for (const std::string& note : result.notes) std::cout << "  note: " << note << "\n";
    std::cout << "outputs in " << cfg.output.dir.string() << "\n";
    return report(verify(result.checks));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum clock control simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunFlags run_flags;
    std::string scenario;
    CLI::App* run_cmd = app.add_subcommand("run", "run a named scenario");
    run_cmd->add_option("scenario", scenario, "scenario name (see list-scenarios)")->required();
    add_run_flags(run_cmd, run_flags);

    RunFlags sweep_flags;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the bound sweep over coupling strengths");
    add_run_flags(sweep_cmd, sweep_flags);

    std::string verify_path;
    double verify_tol = 0.0;
    CLI::App* verify_cmd = app.add_subcommand("verify", "re-evaluate a verdict JSON or time-series CSV");
    verify_cmd->add_option("path", verify_path, "verdict.json or timeseries CSV")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--tol", verify_tol, "override the tolerance of every check");

    CLI::App* list_cmd = app.add_subcommand("list-scenarios", "print the scenario catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (*list_cmd) {
            for (const ScenarioInfo& s : scenario_catalog()) std::cout << s.name << "\t" << s.description << "\n";
            return 0;
        }
        if (*run_cmd) {
            if (!is_known_scenario(scenario)) {
                std::cerr << "error: unknown scenario '" << scenario << "'\n";
                return 3;
            }
            return run(run_cmd, run_flags, scenario);
        }
        if (*sweep_cmd) return run(sweep_cmd, sweep_flags, "bound-sweep");
        if (*verify_cmd) {
            std::optional<double> tol;
            if (verify_cmd->count("--tol")) tol = verify_tol;
            return report(verify_file(verify_path, tol));
        }
    } catch (const WrapError& e) {
        std::cerr << "error: " << e.what() << " (minimal admissible x_max " << e.min_x_max() << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
