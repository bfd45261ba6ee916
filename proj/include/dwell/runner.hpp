#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dwell/config.hpp"

namespace dwell {

// What a run leaves behind besides files, for callers that aggregate
// (sweep) or map to process exit codes (main). Config and solver failures
// arrive as exceptions instead: ConfigError -> 2, std::runtime_error -> 3.
struct RunResult {
    int exit_code = 0;  // 0 completed, 4 blow-up
    SolveStatus status = SolveStatus::completed;
    double dt = 0.0;
    double t_final = 0.0;
    double delta_lambda = 0.0;
    double beat_period = 0.0;
    std::optional<double> gamma_bare;       // absent for the asymmetric path
    std::optional<double> suppression_time;
    std::optional<double> mass_drift;       // needs grid snapshots
    std::optional<double> linear_error;     // marched sigma = 0 runs only
    std::optional<double> blowup_time;
    int max_inner_iterations = 0;
};

// Validates, solves the spectrum, marches (or samples the exact two-mode
// evolution for linear_asymmetric), and writes into cfg.output_dir:
// charges.csv always, suppression.json when a full beating window exists,
// grid_<k>.csv + mass drift when snapshots are on, config.cfg (canonical
// echo), metadata.json. Data files are byte-deterministic for a given
// config; metadata carries wall time and timestamp separately.
RunResult run_scenario(const RunConfig& cfg, std::ostream& log);

// One run per value on a worker pool, each in <output_dir>/run_<axis>_<i>
// with snapshots forced on so the summary can report mass drift. Per-run
// failures become summary rows and the sweep continues. Returns the path of
// the summary CSV. axis is one of sigma, gamma1, gamma2, a, dt; a gamma1
// sweep rescales gamma2 to keep the strength ratio of the base config, so
// deepening the wells preserves their asymmetry.
std::filesystem::path sweep(const RunConfig& base, const std::string& axis,
                            const std::vector<double>& values, int jobs,
                            std::ostream& log);

// Existence verdict, eigenvalues, splitting, beating period, bound-state
// coefficients with determinant residuals and localization ratios.
nlohmann::ordered_json spectrum_report(const WellConfig& cfg);

}  // namespace dwell
