#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "dwell/charges.hpp"
#include "dwell/freeprop.hpp"
#include "dwell/spectral.hpp"

namespace dwell {

// psi(t, .) sampled on an ascending grid.
struct GridFunction {
    std::vector<double> grid;
    std::vector<std::complex<double>> values;
    double t = 0.0;
};

enum class WellSide { left, right };

// Sliding-window beating contrast of |q1(t)|^2. Each window spans one beating
// period; window_centers[i] is the midpoint time of window i. suppression_time
// is the first center whose contrast falls below threshold times the first
// window's contrast; absent when that never happens, including trajectories
// whose initial contrast is already below 1e-6 (nothing to suppress).
struct SuppressionReport {
    std::vector<double> window_centers;
    std::vector<double> contrasts;
    std::optional<double> suppression_time;
    double threshold = 0.5;
};

// Uniform grid on [-L, L], L = max(10 a, 10 a + 4 sqrt(t_final)), spacing
// h = min(1/(4 kappa_max), pi sqrt(t_final)/(2 L)) rounded down to divide 2L;
// the second bound (the propagator chirp wavelength at the edge) is skipped
// at t_final = 0. Resolves both the e^{-kappa|x|} tails and the phase x^2/4t.
std::vector<double> resolution_grid(double a, double kappa_max, double t_final);

// psi(t, x) = (U(t) psi0)(x) - mu sum_j int_0^t e^{i b_j/(t-s)} f(q_j(s))
// / sqrt(t-s) ds with b_j = (x - y_j)^2 / 4, f(q) = q |q|^{2 sigma} and
// mu = (gamma/2) e^{i pi/4} / sqrt(pi), evaluated by the same
// product-integration rule that marched the charges, so the x = +-a traces
// reproduce the trajectory within the solver tolerance. t must sit on the
// trajectory time grid within 1e-9 (no temporal interpolation), and the
// offending final sample of a blown-up trajectory is not reconstructible;
// violations throw std::invalid_argument.
GridFunction reconstruct(const ChargeTrajectory& traj, const WellConfig& cfg,
                         const Nonlinearity& nl, const InitialState& psi0,
                         double t, std::vector<double> grid);

// Interference density of the mix alpha * fundamental + beta * excited
// (real weights): (alpha phi_f)^2 + (beta phi_e)^2
// + 2 alpha beta phi_f phi_e cos(delta_lambda t). Requires the
// two-eigenvalue regime; throws std::invalid_argument otherwise.
double beating_density_exact(const WellConfig& cfg, double mix_alpha,
                             double mix_beta, double t, double x);

// 2 pi / delta_lambda; +infinity for a degenerate pair (no beating).
// Throws std::invalid_argument on a negative splitting.
double beating_period(const EigenPair& pair);

// Trapezoidal integral of |psi|^2 over x < 0 (left) or x > 0 (right); the
// segment straddling the origin is split at the linearly interpolated
// density. The grid must bracket 0 strictly, else std::domain_error.
double well_occupation(const GridFunction& gf, WellSide side);

// Trapezoidal integral of |psi|^2 over the whole grid.
double mass(const GridFunction& gf);

// Contrast series of |q1|^2 over sliding windows one beating period wide,
// advanced one sample at a time. The window width in samples is
// round(T_B / dt); a trajectory shorter than one window throws
// std::domain_error, as does a degenerate (infinite-period) pair. On a
// blown-up trajectory the offending final sample is ignored.
SuppressionReport suppression_report(const ChargeTrajectory& traj,
                                     const EigenPair& pair,
                                     double threshold = 0.5);

}  // namespace dwell
