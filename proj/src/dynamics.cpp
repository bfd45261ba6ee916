#include "dwell/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwell/kernels.hpp"

namespace dwell {

namespace {

using cplx = std::complex<double>;

cplx nonlinear_f(cplx q, double sigma) {
    if (sigma == 0.0) return q;
    const double n2 = std::norm(q);
    if (n2 == 0.0) return {0.0, 0.0};
    return q * std::pow(n2, sigma);
}

// sum_{k=0}^{n} W_{n,k} F[k] with the row assembled from the interval
// moments: W_{n,0} = b(n), W_{n,k} = b(n-k) + c(n-k+1), W_{n,n} = c(1).
// Same assembly as the charge march, so traces reproduce the solver.
cplx memory_sum(const MomentTable& tbl, const std::vector<cplx>& f, int n) {
    cplx s = tbl.b[static_cast<size_t>(n - 1)] * f[0];
    for (int k = 1; k < n; ++k)
        s += (tbl.b[static_cast<size_t>(n - k - 1)] + tbl.c[static_cast<size_t>(n - k)]) *
             f[static_cast<size_t>(k)];
    s += tbl.c[0] * f[static_cast<size_t>(n)];
    return s;
}

// trapezoid over the sub-interval of one segment lying on the requested side
// of the origin, splitting at the interpolated density when it straddles 0
double segment_share(double xl, double xr, double dl, double dr, WellSide side) {
    if (xr <= 0.0) return side == WellSide::left ? 0.5 * (dl + dr) * (xr - xl) : 0.0;
    if (xl >= 0.0) return side == WellSide::right ? 0.5 * (dl + dr) * (xr - xl) : 0.0;
    const double d0 = dl + (dr - dl) * (0.0 - xl) / (xr - xl);
    if (side == WellSide::left) return 0.5 * (dl + d0) * (0.0 - xl);
    return 0.5 * (d0 + dr) * (xr - 0.0);
}

void check_grid_function(const GridFunction& gf, const char* who) {
    if (gf.grid.size() != gf.values.size())
        throw std::invalid_argument(std::string(who) + ": grid/values size mismatch");
    if (gf.grid.size() < 2)
        throw std::invalid_argument(std::string(who) + ": need at least two grid points");
    for (size_t i = 1; i < gf.grid.size(); ++i)
        if (!(gf.grid[i] > gf.grid[i - 1]))
            throw std::invalid_argument(std::string(who) + ": grid must ascend strictly");
}

}  // namespace

std::vector<double> resolution_grid(double a, double kappa_max, double t_final) {
    if (!(a > 0.0)) throw std::invalid_argument("resolution_grid: need a > 0");
    if (!(kappa_max > 0.0)) throw std::invalid_argument("resolution_grid: need kappa_max > 0");
    if (!(t_final >= 0.0)) throw std::invalid_argument("resolution_grid: need t_final >= 0");
    const double half_width = std::max(10.0 * a, 10.0 * a + 4.0 * std::sqrt(t_final));
    double h = 1.0 / (4.0 * kappa_max);
    if (t_final > 0.0)
        h = std::min(h, std::numbers::pi * std::sqrt(t_final) / (2.0 * half_width));
    const auto segments = static_cast<size_t>(std::ceil(2.0 * half_width / h));
    std::vector<double> grid(segments + 1);
    for (size_t i = 0; i <= segments; ++i)
        grid[i] = -half_width + 2.0 * half_width * static_cast<double>(i) /
                                    static_cast<double>(segments);
    return grid;
}

GridFunction reconstruct(const ChargeTrajectory& traj, const WellConfig& cfg,
                         const Nonlinearity& nl, const InitialState& psi0,
                         double t, std::vector<double> grid) {
    if (!(cfg.a > 0.0)) throw std::invalid_argument("reconstruct: need a > 0");
    if (!(nl.sigma >= 0.0)) throw std::invalid_argument("reconstruct: need sigma >= 0");
    if (traj.times.empty()) throw std::invalid_argument("reconstruct: empty trajectory");
    if (traj.q1.size() != traj.times.size() || traj.q2.size() != traj.times.size())
        throw std::invalid_argument("reconstruct: inconsistent trajectory arrays");
    if (grid.empty()) throw std::invalid_argument("reconstruct: empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("reconstruct: grid must ascend strictly");

    // locate t on the trajectory grid; interpolation is refused because it
    // would contaminate conservation checks with an uncontrolled error
    size_t n = 0;
    if (traj.times.size() >= 2) {
        const double dt = traj.times[1] - traj.times[0];
        const auto idx = std::llround(t / dt);
        if (idx < 0 || idx >= static_cast<long long>(traj.times.size()))
            throw std::invalid_argument("reconstruct: t outside the trajectory grid");
        n = static_cast<size_t>(idx);
    }
    if (std::abs(t - traj.times[n]) > 1e-9)
        throw std::invalid_argument("reconstruct: t is not a trajectory grid time");
    if (traj.status == SolveStatus::blow_up && n + 1 == traj.times.size())
        throw std::invalid_argument(
            "reconstruct: the final sample of a blown-up trajectory is the "
            "offending iterate, not a solution value");

    GridFunction out;
    out.t = traj.times[n];
    out.grid = std::move(grid);
    out.values.resize(out.grid.size());

    if (n == 0) {
        for (size_t i = 0; i < out.grid.size(); ++i)
            out.values[i] = psi0.evaluate(out.grid[i]);
        return out;
    }
    if (nl.gamma == 0.0) {
        for (size_t i = 0; i < out.grid.size(); ++i)
            out.values[i] = free_evolve_at(psi0, out.t, out.grid[i]);
        return out;
    }

    const double dt = traj.times[1] - traj.times[0];
    const cplx mu = nl.gamma / (2.0 * std::sqrt(std::numbers::pi)) *
                    cplx{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
    std::vector<cplx> f1(n + 1), f2(n + 1);
    for (size_t k = 0; k <= n; ++k) {
        f1[k] = nonlinear_f(traj.q1[k], nl.sigma);
        f2[k] = nonlinear_f(traj.q2[k], nl.sigma);
    }
    const int steps = static_cast<int>(n);
    for (size_t i = 0; i < out.grid.size(); ++i) {
        const double x = out.grid[i];
        const double d1 = x + cfg.a;  // distance to the well at -a
        const double d2 = x - cfg.a;
        const auto tbl1 = transient_kernel_moments(dt, d1 * d1 / 4.0, steps);
        const auto tbl2 = transient_kernel_moments(dt, d2 * d2 / 4.0, steps);
        out.values[i] = free_evolve_at(psi0, out.t, x) -
                        mu * (memory_sum(tbl1, f1, steps) + memory_sum(tbl2, f2, steps));
    }
    return out;
}

double beating_density_exact(const WellConfig& cfg, double mix_alpha,
                             double mix_beta, double t, double x) {
    const auto spectrum = solve_eigenvalues(cfg);
    if (!spectrum.pair.has_value())
        throw std::invalid_argument(
            "beating_density_exact: configuration has no eigenvalue pair");
    const auto ground =
        bound_state(cfg, spectrum.pair->lambda0, StateLabel::fundamental);
    const auto excited =
        bound_state(cfg, spectrum.pair->lambda1, StateLabel::excited);
    const double pf = eval_state(ground, x);
    const double pe = eval_state(excited, x);
    return mix_alpha * mix_alpha * pf * pf + mix_beta * mix_beta * pe * pe +
           2.0 * mix_alpha * mix_beta * pf * pe *
               std::cos(spectrum.pair->delta_lambda * t);
}

double beating_period(const EigenPair& pair) {
    if (pair.delta_lambda < 0.0)
        throw std::invalid_argument("beating_period: negative splitting");
    if (pair.delta_lambda == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::numbers::pi / pair.delta_lambda;
}

double well_occupation(const GridFunction& gf, WellSide side) {
    check_grid_function(gf, "well_occupation");
    if (!(gf.grid.front() < 0.0 && gf.grid.back() > 0.0))
        throw std::domain_error("well_occupation: grid must bracket the origin");
    double acc = 0.0;
    for (size_t i = 1; i < gf.grid.size(); ++i)
        acc += segment_share(gf.grid[i - 1], gf.grid[i], std::norm(gf.values[i - 1]),
                             std::norm(gf.values[i]), side);
    return acc;
}

double mass(const GridFunction& gf) {
    check_grid_function(gf, "mass");
    double acc = 0.0;
    for (size_t i = 1; i < gf.grid.size(); ++i)
        acc += 0.5 * (std::norm(gf.values[i - 1]) + std::norm(gf.values[i])) *
               (gf.grid[i] - gf.grid[i - 1]);
    return acc;
}

SuppressionReport suppression_report(const ChargeTrajectory& traj,
                                     const EigenPair& pair, double threshold) {
    if (!(threshold > 0.0))
        throw std::invalid_argument("suppression_report: need threshold > 0");
    size_t count = traj.times.size();
    if (traj.status == SolveStatus::blow_up && count > 0) --count;  // offending iterate
    if (traj.q1.size() < count)
        throw std::invalid_argument("suppression_report: inconsistent trajectory arrays");
    if (count < 2)
        throw std::domain_error("suppression_report: trajectory too short");
    const double dt = traj.times[1] - traj.times[0];
    const double period = beating_period(pair);
    if (!std::isfinite(period))
        throw std::domain_error(
            "suppression_report: degenerate pair has no beating window");
    const auto window = static_cast<size_t>(std::llround(period / dt));
    if (window < 1)
        throw std::domain_error("suppression_report: window shorter than one sample");
    if (count < window + 1)
        throw std::domain_error("suppression_report: window longer than the trajectory");

    std::vector<double> a2(count);
    for (size_t k = 0; k < count; ++k) a2[k] = std::norm(traj.q1[k]);

    SuppressionReport report;
    report.threshold = threshold;
    const size_t starts = count - window;
    report.window_centers.reserve(starts);
    report.contrasts.reserve(starts);
    for (size_t s0 = 0; s0 < starts; ++s0) {
        double mx = a2[s0];
        double mn = a2[s0];
        for (size_t k = s0 + 1; k <= s0 + window; ++k) {
            mx = std::max(mx, a2[k]);
            mn = std::min(mn, a2[k]);
        }
        report.window_centers.push_back(traj.times[s0] + period / 2.0);
        report.contrasts.push_back(mx + mn > 0.0 ? (mx - mn) / (mx + mn) : 0.0);
    }
    // "suppressed" means the beating contrast has dropped well below its own
    // initial value; a run that never beat (initial contrast ~ 0) cannot be
    // suppressed, and a linear run keeps its contrast forever
    const double initial = report.contrasts.front();
    if (initial >= 1e-6) {
        for (size_t i = 0; i < report.contrasts.size(); ++i) {
            if (report.contrasts[i] < threshold * initial) {
                report.suppression_time = report.window_centers[i];
                break;
            }
        }
    }
    return report;
}

}  // namespace dwell
