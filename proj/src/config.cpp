#include "dwell/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace dwell {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& value, const std::string& where) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || !std::isfinite(out))
        throw ConfigError(where + ": expected a finite number, got '" + value + "'");
    return out;
}

int parse_int(const std::string& value, const std::string& where) {
    int out = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& value, const std::string& where) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(where + ": expected true or false, got '" + value + "'");
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One row per key keeps the parser, --set, and the canonical serialization
// in lockstep; kKeys order is the canonical file order.
constexpr std::array<const char*, 15> kKeys = {
    "scenario",        "a",          "gamma1",
    "gamma2",          "mix_alpha",  "mix_beta",
    "sigma",           "dt",         "t_final",
    "fixed_point_tol", "max_inner_iter", "blowup_threshold",
    "suppression_threshold", "output_dir", "grid_snapshots",
};

void set_key(RunConfig& cfg, const std::string& key, const std::string& value,
             const std::string& where) {
    if (key == "scenario") {
        try {
            cfg.scenario = scenario_from_string(value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    } else if (key == "a") {
        cfg.well.a = parse_double(value, where);
    } else if (key == "gamma1") {
        cfg.well.gamma1 = parse_double(value, where);
    } else if (key == "gamma2") {
        cfg.well.gamma2 = parse_double(value, where);
    } else if (key == "mix_alpha") {
        cfg.mix_alpha = parse_double(value, where);
    } else if (key == "mix_beta") {
        cfg.mix_beta = parse_double(value, where);
    } else if (key == "sigma") {
        cfg.sigma = parse_double(value, where);
    } else if (key == "dt") {
        cfg.solver.dt = parse_double(value, where);
    } else if (key == "t_final") {
        cfg.solver.t_final = parse_double(value, where);
    } else if (key == "fixed_point_tol") {
        cfg.solver.fixed_point_tol = parse_double(value, where);
    } else if (key == "max_inner_iter") {
        cfg.solver.max_inner_iter = parse_int(value, where);
    } else if (key == "blowup_threshold") {
        cfg.solver.blowup_threshold = parse_double(value, where);
    } else if (key == "suppression_threshold") {
        cfg.suppression_threshold = parse_double(value, where);
    } else if (key == "output_dir") {
        if (value.empty()) throw ConfigError(where + ": output_dir must not be empty");
        cfg.output_dir = value;
    } else if (key == "grid_snapshots") {
        cfg.grid_snapshots = parse_bool(value, where);
    } else {
        std::string known;
        for (const char* k : kKeys) {
            if (!known.empty()) known += ", ";
            known += k;
        }
        throw ConfigError(where + ": unknown key '" + key + "' (known keys: " + known + ")");
    }
}

std::string get_key(const RunConfig& cfg, const std::string& key) {
    if (key == "scenario") return to_string(cfg.scenario);
    if (key == "a") return format_g17(cfg.well.a);
    if (key == "gamma1") return format_g17(cfg.well.gamma1);
    if (key == "gamma2") return format_g17(cfg.well.gamma2);
    if (key == "mix_alpha") return format_g17(cfg.mix_alpha);
    if (key == "mix_beta") return format_g17(cfg.mix_beta);
    if (key == "sigma") return format_g17(cfg.sigma);
    if (key == "dt") return format_g17(cfg.solver.dt);
    if (key == "t_final") return format_g17(cfg.solver.t_final);
    if (key == "fixed_point_tol") return format_g17(cfg.solver.fixed_point_tol);
    if (key == "max_inner_iter") return std::to_string(cfg.solver.max_inner_iter);
    if (key == "blowup_threshold") return format_g17(cfg.solver.blowup_threshold);
    if (key == "suppression_threshold") return format_g17(cfg.suppression_threshold);
    if (key == "output_dir") return cfg.output_dir;
    if (key == "grid_snapshots") return cfg.grid_snapshots ? "true" : "false";
    throw ConfigError("serialize: unknown key '" + key + "'");
}

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::linear_symmetric: return "linear_symmetric";
        case Scenario::linear_asymmetric: return "linear_asymmetric";
        case Scenario::nonlinear: return "nonlinear";
    }
    throw ConfigError("to_string: invalid scenario value");
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "linear_symmetric") return Scenario::linear_symmetric;
    if (name == "linear_asymmetric") return Scenario::linear_asymmetric;
    if (name == "nonlinear") return Scenario::nonlinear;
    throw ConfigError("unknown scenario '" + name +
                      "' (expected linear_symmetric, linear_asymmetric, or nonlinear)");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError(where + ": duplicate key '" + key + "'");
        set_key(cfg, key, value, where);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value, "override " + key);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const char* key : kKeys) {
        out += key;
        out += " = ";
        out += get_key(cfg, key);
        out += '\n';
    }
    return out;
}

void validate(const RunConfig& cfg) {
    const auto fail = [](const std::string& msg) { throw ConfigError("validate: " + msg); };
    if (!(cfg.well.a > 0.0)) fail("a must be > 0, got " + format_g17(cfg.well.a));
    if (!(cfg.well.gamma1 < 0.0))
        fail("gamma1 must be < 0 (attractive well), got " + format_g17(cfg.well.gamma1));
    if (!(cfg.well.gamma2 < 0.0))
        fail("gamma2 must be < 0 (attractive well), got " + format_g17(cfg.well.gamma2));
    const double mix_norm = cfg.mix_alpha * cfg.mix_alpha + cfg.mix_beta * cfg.mix_beta;
    if (std::abs(mix_norm - 1.0) > 1e-12)
        fail("mix_alpha^2 + mix_beta^2 must be 1 within 1e-12, got " + format_g17(mix_norm));
    if (!(cfg.sigma >= 0.0)) fail("sigma must be >= 0, got " + format_g17(cfg.sigma));
    switch (cfg.scenario) {
        case Scenario::linear_symmetric:
            if (cfg.sigma != 0.0) fail("linear_symmetric requires sigma = 0");
            if (cfg.well.gamma1 != cfg.well.gamma2)
                fail("linear_symmetric requires gamma1 = gamma2");
            break;
        case Scenario::linear_asymmetric:
            if (cfg.sigma != 0.0) fail("linear_asymmetric requires sigma = 0");
            break;
        case Scenario::nonlinear:
            if (!(cfg.sigma > 0.0)) fail("nonlinear requires sigma > 0");
            if (cfg.well.gamma1 != cfg.well.gamma2)
                fail("nonlinear requires gamma1 = gamma2 (one coupling strength)");
            break;
    }
    if (!(cfg.solver.dt >= 0.0)) fail("dt must be >= 0 (0 means automatic)");
    if (!(cfg.solver.t_final >= 0.0)) fail("t_final must be >= 0 (0 means automatic)");
    if (cfg.solver.dt > 0.0 && cfg.solver.t_final > 0.0 && cfg.solver.t_final < cfg.solver.dt)
        fail("t_final must be >= dt");
    if (!(cfg.solver.fixed_point_tol > 0.0)) fail("fixed_point_tol must be > 0");
    if (cfg.solver.max_inner_iter < 1) fail("max_inner_iter must be >= 1");
    if (!(cfg.solver.blowup_threshold > 0.0)) fail("blowup_threshold must be > 0");
    if (!(cfg.suppression_threshold > 0.0 && cfg.suppression_threshold < 1.0))
        fail("suppression_threshold must lie in (0, 1), got " +
             format_g17(cfg.suppression_threshold));
    if (cfg.output_dir.empty()) fail("output_dir must not be empty");
}

RunConfig preset(const std::string& name) {
    RunConfig base;  // symmetric default well a = 3, gamma = -0.5, pure ground state
    if (name == "figure3") {
        // Eigenfunction snapshot run: stationary ground state with grids on;
        // grid_0.csv's re_psi column at t = 0 is the fundamental profile
        // (rerun with mix 0 1 for the excited one).
        base.grid_snapshots = true;
        return base;
    }
    if (name == "figure4") {
        base.mix_alpha = 0.1;
        base.mix_beta = std::sqrt(0.99);
        return base;
    }
    if (name == "figure5" || name == "figure5_sigma03" || name == "figure5_sigma07" ||
        name == "figure5_sigma09") {
        base.scenario = Scenario::nonlinear;
        base.mix_alpha = 0.1;
        base.mix_beta = std::sqrt(0.99);
        base.sigma = name == "figure5_sigma07" ? 0.7 : name == "figure5_sigma09" ? 0.9 : 0.3;
        return base;
    }
    if (name == "linear_symmetric") return base;
    if (name == "linear_asymmetric") {
        base.scenario = Scenario::linear_asymmetric;
        return base;
    }
    if (name == "nonlinear") {
        base.scenario = Scenario::nonlinear;
        base.sigma = 0.3;
        return base;
    }
    std::string known;
    for (const auto& n : preset_names()) {
        if (!known.empty()) known += ", ";
        known += n;
    }
    throw ConfigError("unknown scenario preset '" + name + "' (known: " + known + ")");
}

std::vector<std::string> preset_names() {
    return {"figure3",          "figure4",          "figure5",
            "figure5_sigma03",  "figure5_sigma07",  "figure5_sigma09",
            "linear_symmetric", "linear_asymmetric", "nonlinear"};
}

}  // namespace dwell
