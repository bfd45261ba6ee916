#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwell/charges.hpp"
#include "dwell/spectral.hpp"

namespace dwell {

// Which evolution path a run takes. The symmetric linear and nonlinear
// scenarios march the memory equations, which carry a single coupling
// strength; the asymmetric linear scenario samples the exact two-mode
// evolution instead, the only closed form available once gamma1 != gamma2.
enum class Scenario { linear_symmetric, linear_asymmetric, nonlinear };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// Everything a run needs, in one serializable bag. solver.dt = 0 and
// solver.t_final = 0 mean "derive from the beating period": T_B/2000 and
// 6 T_B, resolved once the spectrum is known and recorded in the metadata.
// For the nonlinear scenario gamma1 (= gamma2) is the initial point strength
// gamma |psi0|^{2 sigma} at the wells; the bare coupling handed to the
// solver is derived from it, so linear and nonlinear runs start from the
// same effective wells.
struct RunConfig {
    Scenario scenario = Scenario::linear_symmetric;
    WellConfig well{3.0, -0.5, -0.5};
    double mix_alpha = 1.0;
    double mix_beta = 0.0;
    double sigma = 0.0;
    SolverParams solver{};
    double suppression_threshold = 0.5;
    std::string output_dir = ".";
    bool grid_snapshots = false;
};

// Parse and validation failures carry "origin:line: what" so the CLI can
// print them verbatim; mapped to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// key = value lines; '#' starts a comment, blank lines are skipped. Unknown
// or repeated keys and malformed values are errors naming origin and line.
RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);

// Set one field from its config-file spelling. Shared by --set and the
// config parser so every override follows the same value grammar.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Canonical form: every key once, fixed order, %.17g doubles (round-trip
// exact). parse_config(serialize_config(c)) reproduces c field for field.
std::string serialize_config(const RunConfig& cfg);

// Structural checks that need no spectral work: positive geometry,
// attractive wells, unit mix, scenario/field consistency, sane solver
// limits. Throws ConfigError.
void validate(const RunConfig& cfg);

// Named starting points for the shipped experiments (figure3, figure4,
// figure5 and its sigma variants) or a bare scenario name on the default
// symmetric well. Throws ConfigError for unknown names.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace dwell
