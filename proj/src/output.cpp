#include "dwell/output.hpp"

#include <cstdio>
#include <fstream>

namespace dwell {

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string charges_csv(const ChargeTrajectory& traj) {
    std::string out = "t,re_q1,im_q1,abs2_q1,re_q2,im_q2,abs2_q2,inner_iters,residual\n";
    for (size_t n = 0; n < traj.times.size(); ++n) {
        out += format_sci(traj.times[n]);
        for (const auto& q : {traj.q1[n], traj.q2[n]}) {
            out += ',';
            out += format_sci(q.real());
            out += ',';
            out += format_sci(q.imag());
            out += ',';
            out += format_sci(std::norm(q));
        }
        out += ',';
        out += std::to_string(traj.inner_iterations[n]);
        out += ',';
        out += format_sci(traj.residuals[n]);
        out += '\n';
    }
    return out;
}

std::string grid_csv(const GridFunction& g) {
    std::string out = "x,re_psi,im_psi,abs2_psi\n";
    for (size_t i = 0; i < g.grid.size(); ++i) {
        out += format_sci(g.grid[i]);
        out += ',';
        out += format_sci(g.values[i].real());
        out += ',';
        out += format_sci(g.values[i].imag());
        out += ',';
        out += format_sci(std::norm(g.values[i]));
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json suppression_json(const SuppressionReport& rep) {
    nlohmann::ordered_json j;
    j["threshold"] = rep.threshold;
    j["window_centers"] = rep.window_centers;
    j["contrasts"] = rep.contrasts;
    if (rep.suppression_time)
        j["suppression_time"] = *rep.suppression_time;
    else
        j["suppression_time"] = nullptr;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace dwell
