#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dwell/faddeeva.hpp"
#include "dwell/spectral.hpp"

namespace dwell {

// One atom weight * e^{-kappa |x - center|}.
struct ExponentialTerm {
    std::complex<double> weight;
    double kappa = 0.0;
    double center = 0.0;
};

// Initial data psi0(x) = sum_j w_j e^{-kappa_j |x - c_j|}. A state built from
// two bound states remembers its mixing coefficients (|alpha|^2 + |beta|^2 = 1).
struct InitialState {
    std::vector<ExponentialTerm> terms;
    std::complex<double> mix_alpha{0.0, 0.0};
    std::complex<double> mix_beta{0.0, 0.0};

    std::complex<double> evaluate(double x) const;

    // L2 norm from the closed-form pairwise overlaps of exponential atoms.
    double norm() const;
};

// alpha * fundamental + beta * excited as an InitialState; the bound-state
// kernel coefficients multiply G = e^{-k|x|}/(2k), so each atom weight picks
// up a 1/(2k) factor. Requires |alpha|^2 + |beta|^2 = 1, matching labels, and
// a common well half-separation.
InitialState beating_state(const BoundState& ground, const BoundState& excited,
                           std::complex<double> mix_alpha,
                           std::complex<double> mix_beta);

// U(tau, y) = e^{i y^2 / (4 tau)} / sqrt(4 i pi tau) on the principal branch,
// sqrt(i) = e^{i pi/4}. Throws std::domain_error unless tau > 0.
std::complex<double> propagator_kernel(double tau, double y);

// (U(t) [weight e^{-kappa |. - center|}])(x) in closed form through two
// Faddeeva evaluations, one per half line. Both arguments are kept in the
// upper half plane (the lower-half case is folded through the reflection
// identity analytically), so no overflow region is reachable.
std::complex<double> free_evolve_exponential(double kappa, double center,
                                             std::complex<double> weight,
                                             double t, double x);

// Sum of free_evolve_exponential over the terms of psi0; exactly linear in
// the weights.
std::complex<double> free_evolve_at(const InitialState& psi0, double t, double x);

// Quadrature fallback for initial data supplied as an arbitrary callable
// profile carrying negligible mass outside [lo, hi]. Adaptive; the attached
// error estimate covers the quadrature error, not the [lo, hi] truncation.
ComplexAmplitude free_evolve_profile(
    const std::function<std::complex<double>(double)>& profile, double lo,
    double hi, double t, double x, double tol = 1e-9);

}  // namespace dwell
