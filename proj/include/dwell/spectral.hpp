#pragma once

#include <optional>

namespace dwell {

// Two point interactions on the line at y1 = -a, y2 = +a with strengths
// gamma1, gamma2 (attractive when negative). Units: hbar = 1, m = 1/2.
struct WellConfig {
    double a = 1.0;
    double gamma1 = -1.0;
    double gamma2 = -1.0;

    // strength ratio gamma2/gamma1, distinct from any superposition weight
    double ratio_alpha() const { return gamma2 / gamma1; }
};

enum class StateLabel { fundamental, excited };

// phi(x) = coeff_left G(x+a) + coeff_right G(x-a), G = e^{-k|x|}/(2k) with
// k = sqrt(lambda); the state's energy is -lambda. Normalized to unit L2
// norm; the fundamental state has both coefficients positive, the excited
// one carries the minus sign on coeff_right.
struct BoundState {
    double lambda = 0.0;
    double coeff_left = 0.0;
    double coeff_right = 0.0;
    StateLabel label = StateLabel::fundamental;
    double a = 0.0;
};

struct EigenPair {
    double lambda0 = 0.0;  // larger lambda, fundamental
    double lambda1 = 0.0;  // smaller lambda, excited
    double delta_lambda = 0.0;
};

enum class Existence { TwoEigenvalues, OneEigenvalue, None };

// Two eigenvalues exist but their splitting sits below double resolution
// (deep semiclassical regime): lambda_mid is the unresolved pair location,
// split_bound an upper bound on lambda0 - lambda1.
struct DegenerateInfo {
    double lambda_mid = 0.0;
    double split_bound = 0.0;
};

struct SpectrumSolution {
    Existence existence = Existence::None;
    std::optional<EigenPair> pair;
    std::optional<double> single_lambda;
    std::optional<DegenerateInfo> degenerate;
};

struct GammaMatrix {
    double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;
};

// e^{-kappa |x|} / (2 kappa); throws std::domain_error for kappa <= 0
double green_function(double kappa, double x);

// (1/gamma_i) delta_ij + G(y_i - y_j) at kappa = sqrt(lambda)
GammaMatrix gamma_matrix(const WellConfig& cfg, double lambda);

// determinant of the matrix above; -lambda is an eigenvalue iff it vanishes
double det_gamma(const WellConfig& cfg, double lambda);

Existence existence_condition(const WellConfig& cfg);

// Finds every negative eigenvalue -lambda. Guaranteed brackets: with
// g = max(|gamma1|,|gamma2|)/2 and l = min(...)/2 the secular function has
// one root in (g, g + l) and, under the two-eigenvalue condition, one in
// (0, l). Bisection to 1e-13 relative width, then Newton polish.
SpectrumSolution solve_eigenvalues(const WellConfig& cfg);

// Kernel vector of gamma_matrix at an eigenvalue, normalized. Throws
// std::invalid_argument when lambda is not a root of det_gamma.
BoundState bound_state(const WellConfig& cfg, double lambda, StateLabel label);

// L2 norm of coeff_left G(x+a) + coeff_right G(x-a), in closed form
double state_norm(double coeff_left, double coeff_right, double kappa, double a);

double eval_state(const BoundState& state, double x);

// Independent closed-form magnitude of the dominant-well coefficient:
// |coeff_left| of the fundamental state, |coeff_right| of the excited one.
// Used to cross-check the kernel-plus-overlap normalization path.
double normalization_closed_form(const WellConfig& cfg, double lambda, StateLabel label);

}  // namespace dwell
