#include "dwell/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "dwell/dynamics.hpp"
#include "dwell/output.hpp"
#include "dwell/version.hpp"

namespace dwell {

namespace {

using cplx = std::complex<double>;

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* existence_name(Existence e) {
    switch (e) {
        case Existence::TwoEigenvalues: return "two_eigenvalues";
        case Existence::OneEigenvalue: return "one_eigenvalue";
        case Existence::None: return "none";
    }
    return "none";
}

// Two-mode sampler shared by the asymmetric trajectory, its snapshots, and
// the marched-run error column: alpha e^{i lambda0 t} phi_f + beta
// e^{i lambda1 t} phi_e evaluated through the bound states already in hand.
struct TwoModeSampler {
    const BoundState* ground;
    const BoundState* excited;
    double alpha;
    double beta;

    cplx at(double t, double x) const {
        return alpha * eval_state(*ground, x) * std::polar(1.0, ground->lambda * t) +
               beta * eval_state(*excited, x) * std::polar(1.0, excited->lambda * t);
    }
};

ChargeTrajectory exact_trajectory(const TwoModeSampler& sampler, double a,
                                  const SolverParams& sp) {
    const int n_steps = static_cast<int>(std::floor(sp.t_final / sp.dt + 1e-9));
    ChargeTrajectory traj;
    traj.times.reserve(static_cast<size_t>(n_steps) + 1);
    traj.q1.reserve(static_cast<size_t>(n_steps) + 1);
    traj.q2.reserve(static_cast<size_t>(n_steps) + 1);
    traj.inner_iterations.assign(static_cast<size_t>(n_steps) + 1, 0);
    traj.residuals.assign(static_cast<size_t>(n_steps) + 1, 0.0);
    for (int n = 0; n <= n_steps; ++n) {
        const double t = n * sp.dt;
        traj.times.push_back(t);
        traj.q1.push_back(sampler.at(t, -a));
        traj.q2.push_back(sampler.at(t, a));
    }
    return traj;
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["scenario"] = to_string(cfg.scenario);
    j["a"] = cfg.well.a;
    j["gamma1"] = cfg.well.gamma1;
    j["gamma2"] = cfg.well.gamma2;
    j["mix_alpha"] = cfg.mix_alpha;
    j["mix_beta"] = cfg.mix_beta;
    j["sigma"] = cfg.sigma;
    j["dt"] = cfg.solver.dt;
    j["t_final"] = cfg.solver.t_final;
    j["fixed_point_tol"] = cfg.solver.fixed_point_tol;
    j["max_inner_iter"] = cfg.solver.max_inner_iter;
    j["blowup_threshold"] = cfg.solver.blowup_threshold;
    j["suppression_threshold"] = cfg.suppression_threshold;
    j["output_dir"] = cfg.output_dir;
    j["grid_snapshots"] = cfg.grid_snapshots;
    return j;
}

template <typename T>
nlohmann::ordered_json json_or_null(const std::optional<T>& v) {
    if (v) return *v;
    return nullptr;
}

}  // namespace

RunResult run_scenario(const RunConfig& cfg, std::ostream& log) {
    const auto wall_start = std::chrono::steady_clock::now();
    const std::string started_at = iso_utc_now();
    validate(cfg);

    const auto spectrum = solve_eigenvalues(cfg.well);
    if (spectrum.existence != Existence::TwoEigenvalues || !spectrum.pair)
        throw ConfigError(std::string("run: the well pair must support two bound states, got ") +
                          existence_name(spectrum.existence) +
                          " (inspect with the spectrum verb)");
    const EigenPair pair = *spectrum.pair;
    const BoundState ground = bound_state(cfg.well, pair.lambda0, StateLabel::fundamental);
    const BoundState excited = bound_state(cfg.well, pair.lambda1, StateLabel::excited);
    const InitialState psi0 =
        beating_state(ground, excited, cplx{cfg.mix_alpha, 0.0}, cplx{cfg.mix_beta, 0.0});
    const double period = beating_period(pair);
    if (!std::isfinite(period))
        throw ConfigError("run: beating period is not finite (degenerate splitting); "
                          "set dt and t_final explicitly");

    SolverParams sp = cfg.solver;
    if (sp.dt == 0.0) sp.dt = period / 2000.0;
    if (sp.t_final == 0.0) sp.t_final = 6.0 * period;
    if (sp.t_final < sp.dt)
        throw ConfigError("run: resolved t_final " + format_g17(sp.t_final) +
                          " is shorter than dt " + format_g17(sp.dt));

    log << "spectrum: lambda0=" << format_g17(pair.lambda0)
        << " lambda1=" << format_g17(pair.lambda1)
        << " delta_lambda=" << format_g17(pair.delta_lambda)
        << " beat_period=" << format_g17(period) << "\n";

    RunResult res;
    res.dt = sp.dt;
    res.t_final = sp.t_final;
    res.delta_lambda = pair.delta_lambda;
    res.beat_period = period;

    const TwoModeSampler sampler{&ground, &excited, cfg.mix_alpha, cfg.mix_beta};
    Nonlinearity nl{cfg.well.gamma1, cfg.sigma};
    ChargeTrajectory traj;
    const char* evolution = "product_integration";
    if (cfg.scenario == Scenario::linear_asymmetric) {
        evolution = "exact_spectral";
        traj = exact_trajectory(sampler, cfg.well.a, sp);
        log << "evolution: exact_spectral, steps=" << traj.times.size() - 1
            << " dt=" << format_g17(sp.dt) << " t_final=" << format_g17(sp.t_final) << "\n";
    } else {
        if (cfg.scenario == Scenario::nonlinear) nl.gamma = effective_gamma(nl, psi0, cfg.well);
        res.gamma_bare = nl.gamma;
        log << "evolution: product_integration, gamma_bare=" << format_g17(nl.gamma)
            << " sigma=" << format_g17(nl.sigma) << " dt=" << format_g17(sp.dt)
            << " t_final=" << format_g17(sp.t_final) << "\n";
        traj = solve_charges(cfg.well, nl, psi0, sp);
    }

    res.status = traj.status;
    res.exit_code = traj.status == SolveStatus::blow_up ? 4 : 0;
    if (traj.status == SolveStatus::blow_up) res.blowup_time = traj.blowup_time;
    if (!traj.inner_iterations.empty())
        res.max_inner_iterations =
            *std::max_element(traj.inner_iterations.begin(), traj.inner_iterations.end());

    const std::filesystem::path out_dir(cfg.output_dir);
    write_text_file(out_dir / "charges.csv", charges_csv(traj));
    write_text_file(out_dir / "config.cfg", serialize_config(cfg));

    std::string suppression_note;
    try {
        const SuppressionReport rep =
            suppression_report(traj, pair, cfg.suppression_threshold);
        write_text_file(out_dir / "suppression.json", suppression_json(rep).dump(2) + "\n");
        res.suppression_time = rep.suppression_time;
    } catch (const std::domain_error& e) {
        suppression_note = e.what();
    }

    // rel Linf distance of the marched linear run from the two-mode solution;
    // the self-convergence handle for dt sweeps
    if (cfg.scenario == Scenario::linear_symmetric &&
        traj.status == SolveStatus::completed) {
        double max_err = 0.0;
        double max_ref = 0.0;
        for (size_t n = 0; n < traj.times.size(); ++n) {
            const double t = traj.times[n];
            const cplx e1 = sampler.at(t, -cfg.well.a);
            const cplx e2 = sampler.at(t, cfg.well.a);
            max_err = std::max({max_err, std::abs(traj.q1[n] - e1), std::abs(traj.q2[n] - e2)});
            max_ref = std::max({max_ref, std::abs(e1), std::abs(e2)});
        }
        if (max_ref > 0.0) res.linear_error = max_err / max_ref;
    }

    std::vector<double> snapshot_times;
    std::vector<double> masses;
    if (cfg.grid_snapshots && traj.status == SolveStatus::completed) {
        double kappa_max = 0.0;
        for (const auto& term : psi0.terms) kappa_max = std::max(kappa_max, term.kappa);
        const std::vector<double> grid = resolution_grid(cfg.well.a, kappa_max, sp.t_final);
        const size_t last = traj.times.size() - 1;
        std::vector<size_t> indices{0, last / 2, last};
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
        int file_no = 0;
        for (const size_t n : indices) {
            const double t = traj.times[n];
            GridFunction g;
            if (cfg.scenario == Scenario::linear_asymmetric) {
                g.grid = grid;
                g.t = t;
                g.values.reserve(grid.size());
                for (const double x : grid) g.values.push_back(sampler.at(t, x));
            } else {
                g = reconstruct(traj, cfg.well, nl, psi0, t, grid);
            }
            write_text_file(out_dir / ("grid_" + std::to_string(file_no) + ".csv"),
                            grid_csv(g));
            snapshot_times.push_back(t);
            masses.push_back(mass(g));
            ++file_no;
        }
        double drift = 0.0;
        for (const double m : masses) drift = std::max(drift, std::abs(m - masses.front()));
        res.mass_drift = drift;
    }

    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    nlohmann::ordered_json meta;
    meta["version"] = kVersion;
    meta["started_at"] = started_at;
    meta["wall_seconds"] = wall_seconds;
    meta["config"] = config_json(cfg);
    meta["evolution"] = evolution;
    meta["lambda0"] = pair.lambda0;
    meta["lambda1"] = pair.lambda1;
    meta["delta_lambda"] = pair.delta_lambda;
    meta["beat_period"] = period;
    meta["gamma_bare"] = json_or_null(res.gamma_bare);
    meta["psi0_norm"] = psi0.norm();
    meta["dt"] = sp.dt;
    meta["t_final"] = sp.t_final;
    meta["steps"] = traj.times.empty() ? 0 : traj.times.size() - 1;
    meta["status"] = traj.status == SolveStatus::blow_up ? "blow_up" : "completed";
    meta["blowup_time"] = json_or_null(res.blowup_time);
    meta["max_inner_iterations"] = res.max_inner_iterations;
    meta["max_residual"] =
        traj.residuals.empty()
            ? 0.0
            : *std::max_element(traj.residuals.begin(), traj.residuals.end());
    meta["suppression_time"] = json_or_null(res.suppression_time);
    if (!suppression_note.empty()) meta["suppression_note"] = suppression_note;
    meta["linear_error"] = json_or_null(res.linear_error);
    meta["snapshot_times"] = snapshot_times;
    meta["mass_drift"] = json_or_null(res.mass_drift);
    write_text_file(out_dir / "metadata.json", meta.dump(2) + "\n");

    log << "status: " << (traj.status == SolveStatus::blow_up ? "blow_up" : "completed");
    if (res.blowup_time) log << " at t=" << format_g17(*res.blowup_time);
    log << "\n";
    log << "suppression_time: "
        << (res.suppression_time ? format_g17(*res.suppression_time) : "none") << "\n";
    log << "wrote " << (out_dir / "charges.csv").string() << ", metadata.json, config.cfg";
    if (!snapshot_times.empty()) log << ", " << snapshot_times.size() << " grid snapshots";
    log << "\n";
    return res;
}

namespace {

struct SweepRow {
    double value = 0.0;
    std::string status;
    std::string error;
    RunResult result;
};

}  // namespace

std::filesystem::path sweep(const RunConfig& base, const std::string& axis,
                            const std::vector<double>& values, int jobs,
                            std::ostream& log) {
    static const std::set<std::string> kAxes = {"sigma", "gamma1", "gamma2", "a", "dt"};
    if (!kAxes.count(axis))
        throw ConfigError("sweep: unknown axis '" + axis +
                          "' (expected sigma, gamma1, gamma2, a, or dt)");
    if (values.empty()) throw ConfigError("sweep: needs at least one value");
    if (jobs < 1) throw ConfigError("sweep: jobs must be >= 1");

    const std::filesystem::path root(base.output_dir);
    const double base_ratio = base.well.ratio_alpha();
    std::vector<SweepRow> rows(values.size());
    std::atomic<size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= values.size()) break;
            const double v = values[i];
            RunConfig c = base;
            c.grid_snapshots = true;  // the summary's mass drift column
            if (axis == "sigma")
                c.sigma = v;
            else if (axis == "gamma1") {
                c.well.gamma1 = v;
                c.well.gamma2 = v * base_ratio;
            } else if (axis == "gamma2")
                c.well.gamma2 = v;
            else if (axis == "a")
                c.well.a = v;
            else
                c.solver.dt = v;
            c.output_dir = (root / ("run_" + axis + "_" + std::to_string(i))).string();
            rows[i].value = v;
            std::ostringstream local;
            try {
                rows[i].result = run_scenario(c, local);
                rows[i].status =
                    rows[i].result.status == SolveStatus::blow_up ? "blow_up" : "completed";
            } catch (const std::exception& e) {
                rows[i].status = "error";
                rows[i].error = e.what();
            }
        }
    };
    const size_t n_workers = std::min<size_t>(static_cast<size_t>(jobs), values.size());
    std::vector<std::thread> pool;
    for (size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const auto opt_cell = [](const std::optional<double>& v, const char* absent) {
        return v ? format_sci(*v) : std::string(absent);
    };
    std::string csv =
        "value,delta_lambda,beat_period,suppression_time,mass_drift,"
        "max_inner_iterations,linear_error,status\n";
    for (const SweepRow& row : rows) {
        csv += format_g17(row.value);
        if (row.status == "error") {
            csv += ",,,,,,,error\n";
        } else {
            const RunResult& r = row.result;
            csv += ',';
            csv += format_sci(r.delta_lambda);
            csv += ',';
            csv += format_sci(r.beat_period);
            csv += ',';
            csv += opt_cell(r.suppression_time, "none");
            csv += ',';
            csv += opt_cell(r.mass_drift, "");
            csv += ',';
            csv += std::to_string(r.max_inner_iterations);
            csv += ',';
            csv += opt_cell(r.linear_error, "");
            csv += ',';
            csv += row.status;
            csv += '\n';
        }
        log << "sweep " << axis << "=" << format_g17(row.value) << ": " << row.status;
        if (!row.error.empty()) log << " (" << row.error << ")";
        log << "\n";
    }
    const std::filesystem::path summary = root / "sweep_summary.csv";
    write_text_file(summary, csv);
    log << "wrote " << summary.string() << "\n";
    return summary;
}

nlohmann::ordered_json spectrum_report(const WellConfig& cfg) {
    nlohmann::ordered_json j;
    j["a"] = cfg.a;
    j["gamma1"] = cfg.gamma1;
    j["gamma2"] = cfg.gamma2;
    const auto sol = solve_eigenvalues(cfg);
    j["existence"] = existence_name(sol.existence);
    const auto state_json = [&cfg](const BoundState& st) {
        nlohmann::ordered_json s;
        s["lambda"] = st.lambda;
        s["coeff_left"] = st.coeff_left;
        s["coeff_right"] = st.coeff_right;
        s["det_residual"] = std::abs(det_gamma(cfg, st.lambda));
        const double lo = std::min(std::abs(st.coeff_left), std::abs(st.coeff_right));
        const double hi = std::max(std::abs(st.coeff_left), std::abs(st.coeff_right));
        s["localization_ratio"] = hi > 0.0 ? lo / hi : 0.0;
        return s;
    };
    if (sol.pair) {
        j["lambda0"] = sol.pair->lambda0;
        j["lambda1"] = sol.pair->lambda1;
        j["delta_lambda"] = sol.pair->delta_lambda;
        const double period = beating_period(*sol.pair);
        if (std::isfinite(period))
            j["beat_period"] = period;
        else
            j["beat_period"] = nullptr;
        j["fundamental"] =
            state_json(bound_state(cfg, sol.pair->lambda0, StateLabel::fundamental));
        j["excited"] = state_json(bound_state(cfg, sol.pair->lambda1, StateLabel::excited));
    }
    if (sol.single_lambda) {
        j["lambda"] = *sol.single_lambda;
        j["state"] = state_json(bound_state(cfg, *sol.single_lambda, StateLabel::fundamental));
    }
    if (sol.degenerate) {
        j["degenerate"] = {{"lambda_mid", sol.degenerate->lambda_mid},
                           {"split_bound", sol.degenerate->split_bound}};
    }
    return j;
}

}  // namespace dwell
