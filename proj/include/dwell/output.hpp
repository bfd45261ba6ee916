#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dwell/charges.hpp"
#include "dwell/dynamics.hpp"

namespace dwell {

// All numeric columns use one fixed format so identical runs emit
// byte-identical files on any locale or platform.
std::string format_sci(double v);

// Header t,re_q1,im_q1,abs2_q1,re_q2,im_q2,abs2_q2,inner_iters,residual;
// one row per accepted sample, including the final partial sample of a
// blown-up trajectory.
std::string charges_csv(const ChargeTrajectory& traj);

// Header x,re_psi,im_psi,abs2_psi.
std::string grid_csv(const GridFunction& g);

// Keys threshold, window_centers, contrasts, suppression_time (null when
// the beating never drops below threshold * first-window contrast).
nlohmann::ordered_json suppression_json(const SuppressionReport& rep);

// Creates parent directories as needed; throws std::runtime_error on I/O
// failure so the CLI surfaces it with a nonzero exit.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace dwell
