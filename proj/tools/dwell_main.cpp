#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dwell/config.hpp"
#include "dwell/output.hpp"
#include "dwell/runner.hpp"
#include "dwell/version.hpp"

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Options shared by run and sweep: config source plus field overrides.
// Overrides apply on top of the file or preset in a fixed order: --set pairs
// first (in the order given), then the dedicated flags.
struct CommonRunOptions {
    std::string config_path;
    std::string scenario;
    std::vector<std::string> sets;
    double a = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double sigma = 0.0;
    std::vector<double> mix;
    double dt = 0.0;
    double t_final = 0.0;
    double tol = 0.0;
    int max_inner = 0;
    double blowup_threshold = 0.0;
    double threshold = 0.0;
    std::string out;
    CLI::Option* opt_a = nullptr;
    CLI::Option* opt_gamma1 = nullptr;
    CLI::Option* opt_gamma2 = nullptr;
    CLI::Option* opt_sigma = nullptr;
    CLI::Option* opt_mix = nullptr;
    CLI::Option* opt_dt = nullptr;
    CLI::Option* opt_t_final = nullptr;
    CLI::Option* opt_tol = nullptr;
    CLI::Option* opt_max_inner = nullptr;
    CLI::Option* opt_blowup = nullptr;
    CLI::Option* opt_threshold = nullptr;
    CLI::Option* opt_out = nullptr;
    CLI::Option* opt_snapshots = nullptr;
    CLI::Option* opt_no_snapshots = nullptr;
};

void add_common_options(CLI::App& cmd, CommonRunOptions& o) {
    cmd.add_option("--config", o.config_path, "config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd.add_option("--scenario", o.scenario,
                   "named preset (see --help-presets) or a bare scenario name");
    cmd.add_option("--set", o.sets, "generic override key=value, repeatable");
    o.opt_a = cmd.add_option("--a", o.a, "well half-separation");
    o.opt_gamma1 = cmd.add_option("--gamma1", o.gamma1, "left well strength (< 0)");
    o.opt_gamma2 = cmd.add_option("--gamma2", o.gamma2, "right well strength (< 0)");
    o.opt_sigma = cmd.add_option("--sigma", o.sigma, "nonlinearity power");
    o.opt_mix = cmd.add_option("--mix", o.mix, "mix_alpha mix_beta")->expected(2);
    o.opt_dt = cmd.add_option("--dt", o.dt, "time step (0 = beat period / 2000)");
    o.opt_t_final = cmd.add_option("--t-final", o.t_final, "horizon (0 = 6 beat periods)");
    o.opt_tol = cmd.add_option("--tol", o.tol, "fixed-point tolerance per step");
    o.opt_max_inner = cmd.add_option("--max-inner", o.max_inner, "inner iteration cap");
    o.opt_blowup = cmd.add_option("--blowup-threshold", o.blowup_threshold,
                                  "|q| that declares blow-up");
    o.opt_threshold = cmd.add_option("--threshold", o.threshold,
                                     "suppression contrast fraction in (0, 1)");
    o.opt_out = cmd.add_option("--out", o.out, "output directory");
    o.opt_snapshots = cmd.add_flag("--snapshots", "write grid snapshots");
    o.opt_no_snapshots = cmd.add_flag("--no-snapshots", "skip grid snapshots");
}

dwell::RunConfig build_config(const CommonRunOptions& o) {
    if (!o.config_path.empty() && !o.scenario.empty())
        throw dwell::ConfigError("choose either --config or --scenario, not both");
    dwell::RunConfig cfg;
    if (!o.config_path.empty())
        cfg = dwell::load_config(o.config_path);
    else if (!o.scenario.empty())
        cfg = dwell::preset(o.scenario);
    for (const std::string& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw dwell::ConfigError("--set expects key=value, got '" + kv + "'");
        dwell::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto apply = [&cfg](CLI::Option* opt, const std::string& key, const std::string& v) {
        if (opt != nullptr && opt->count() > 0) dwell::apply_override(cfg, key, v);
    };
    apply(o.opt_a, "a", format_g17(o.a));
    apply(o.opt_gamma1, "gamma1", format_g17(o.gamma1));
    apply(o.opt_gamma2, "gamma2", format_g17(o.gamma2));
    apply(o.opt_sigma, "sigma", format_g17(o.sigma));
    if (o.opt_mix->count() > 0) {
        dwell::apply_override(cfg, "mix_alpha", format_g17(o.mix.at(0)));
        dwell::apply_override(cfg, "mix_beta", format_g17(o.mix.at(1)));
    }
    apply(o.opt_dt, "dt", format_g17(o.dt));
    apply(o.opt_t_final, "t_final", format_g17(o.t_final));
    apply(o.opt_tol, "fixed_point_tol", format_g17(o.tol));
    apply(o.opt_max_inner, "max_inner_iter", std::to_string(o.max_inner));
    apply(o.opt_blowup, "blowup_threshold", format_g17(o.blowup_threshold));
    apply(o.opt_threshold, "suppression_threshold", format_g17(o.threshold));
    if (o.opt_out->count() > 0) dwell::apply_override(cfg, "output_dir", o.out);
    if (o.opt_snapshots->count() > 0) cfg.grid_snapshots = true;
    if (o.opt_no_snapshots->count() > 0) cfg.grid_snapshots = false;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two delta-well beating dynamics"};
    app.set_version_flag("--version", dwell::kVersion);
    app.require_subcommand(1);

    auto* spectrum_cmd =
        app.add_subcommand("spectrum", "eigenvalue report for a well pair (JSON to stdout)");
    double sp_a = 3.0, sp_g1 = -0.5, sp_g2 = -0.5;
    std::string sp_out;
    spectrum_cmd->add_option("--a", sp_a, "well half-separation");
    spectrum_cmd->add_option("--gamma1", sp_g1, "left well strength");
    spectrum_cmd->add_option("--gamma2", sp_g2, "right well strength");
    spectrum_cmd->add_option("--out", sp_out, "also write the report to this file");

    auto* run_cmd = app.add_subcommand("run", "execute one scenario and write artifacts");
    CommonRunOptions run_opts;
    add_common_options(*run_cmd, run_opts);

    auto* sweep_cmd =
        app.add_subcommand("sweep", "one run per value of one parameter axis");
    CommonRunOptions sweep_opts;
    add_common_options(*sweep_cmd, sweep_opts);
    std::string sweep_axis;
    std::vector<double> sweep_values;
    int sweep_jobs = 1;
    sweep_cmd->add_option("--axis", sweep_axis, "sigma, gamma1, gamma2, a, or dt")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "axis values, one run each")
        ->required()
        ->expected(-1);
    sweep_cmd->add_option("--jobs", sweep_jobs, "parallel workers");

    auto* validate_cmd = app.add_subcommand(
        "validate-config", "parse and check a config file, print its canonical form");
    std::string validate_path;
    validate_cmd->add_option("file", validate_path, "config file")->required();

    auto* presets_cmd = app.add_subcommand("presets", "list the named presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // malformed command line is a config error
    }

    try {
        if (spectrum_cmd->parsed()) {
            const auto report = dwell::spectrum_report({sp_a, sp_g1, sp_g2});
            const std::string text = report.dump(2) + "\n";
            std::cout << text;
            if (!sp_out.empty()) dwell::write_text_file(sp_out, text);
            return 0;
        }
        if (run_cmd->parsed()) {
            const dwell::RunConfig cfg = build_config(run_opts);
            const dwell::RunResult res = dwell::run_scenario(cfg, std::cout);
            return res.exit_code;
        }
        if (sweep_cmd->parsed()) {
            const dwell::RunConfig base = build_config(sweep_opts);
            dwell::sweep(base, sweep_axis, sweep_values, sweep_jobs, std::cout);
            return 0;
        }
        if (validate_cmd->parsed()) {
            const dwell::RunConfig cfg = dwell::load_config(validate_path);
            dwell::validate(cfg);
            std::cout << dwell::serialize_config(cfg);
            return 0;
        }
        if (presets_cmd->parsed()) {
            for (const auto& name : dwell::preset_names()) std::cout << name << "\n";
            return 0;
        }
    } catch (const dwell::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
