#pragma once

#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "dwell/freeprop.hpp"
#include "dwell/spectral.hpp"

namespace dwell {

// Point-interaction strength gamma |psi|^{2 sigma} at each well; gamma < 0 is
// attractive. sigma = 0 is the linear problem, sigma < 1 stays global in
// time, sigma >= 1 admits finite-time blow-up for suitable data.
struct Nonlinearity {
    double gamma = 0.0;
    double sigma = 0.0;
};

struct SolverParams {
    double dt = 0.0;
    double t_final = 0.0;
    double fixed_point_tol = 1e-10;
    int max_inner_iter = 200;
    double blowup_threshold = 1e6;
};

enum class SolveStatus { completed, blow_up };

// q1(t) = psi(t, -a), q2(t) = psi(t, +a) on the uniform grid times[n] = n dt.
// Each accepted step satisfies the discrete system to fixed_point_tol
// (residuals records the achieved value). On blow-up the trajectory stops at
// the offending step; its last entry is the first inner iterate whose
// modulus crossed blowup_threshold, and blowup_time is that grid time.
struct ChargeTrajectory {
    std::vector<double> times;
    std::vector<std::complex<double>> q1;
    std::vector<std::complex<double>> q2;
    std::vector<int> inner_iterations;
    std::vector<double> residuals;
    SolveStatus status = SolveStatus::completed;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
};

// Marches the two coupled memory equations
//   q_i(t) + mu int_0^t f(q_i)/sqrt(t-s) ds
//          + mu int_0^t f(q_j) e^{i a^2/(t-s)}/sqrt(t-s) ds = (U(t) psi0)(y_i)
// with f(q) = q |q|^{2 sigma} and mu = (gamma/2) e^{i pi/4}/sqrt(pi), by
// product integration exact on piecewise-linear data. The per-step
// nonlinearity is resolved by damped fixed-point iteration (factor 1/2,
// linear-extrapolation warm start), escalating to a Newton step after 20
// stalled iterations. Throws std::runtime_error if an inner solve exhausts
// max_inner_iter without reaching fixed_point_tol.
ChargeTrajectory solve_charges(const WellConfig& cfg, const Nonlinearity& nl,
                               const InitialState& psi0, const SolverParams& params);

// Exact linear evolution of mix_alpha * fundamental + mix_beta * excited,
// sampled at the wells: two counter-rotating phases e^{i lambda t}. Requires
// the two-eigenvalue regime, else throws std::invalid_argument.
std::pair<std::complex<double>, std::complex<double>> linear_exact_charges(
    const WellConfig& cfg, std::complex<double> mix_alpha,
    std::complex<double> mix_beta, double t);

// The bare gamma whose initial strengths gamma |psi0(+-a)|^{2 sigma} average
// to nl.gamma: 2 nl.gamma / (|psi0(a)|^{2 sigma} + |psi0(-a)|^{2 sigma}).
// Throws std::domain_error when the denominator vanishes.
double effective_gamma(const Nonlinearity& nl, const InitialState& psi0,
                       const WellConfig& cfg);

}  // namespace dwell
