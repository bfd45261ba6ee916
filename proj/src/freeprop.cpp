#include "dwell/freeprop.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dwell {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// e^{i pi/4}
const cplx kRoot_i{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};

// integral over the real line of e^{-k1|x|} e^{-k2|x-d|}, d >= 0
double atom_overlap(double k1, double k2, double d) {
    const double kbar = 0.5 * (k1 + k2);
    const double delta = 0.5 * (k2 - k1);
    // middle piece (e^{-k1 d} - e^{-k2 d})/(k2 - k1) as a stable divided
    // difference; collapses to d e^{-k d} at equal rates
    const double middle =
        (delta == 0.0) ? d * std::exp(-kbar * d)
                       : std::exp(-kbar * d) * std::sinh(delta * d) / delta;
    return (std::exp(-k2 * d) + std::exp(-k1 * d)) / (k1 + k2) + middle;
}

void require_terms(const InitialState& psi0) {
    if (psi0.terms.empty())
        throw std::invalid_argument("InitialState: empty term list");
    for (const auto& term : psi0.terms)
        if (!(term.kappa > 0.0))
            throw std::invalid_argument("InitialState: kappa must be positive");
}

}  // namespace

std::complex<double> InitialState::evaluate(double x) const {
    require_terms(*this);
    cplx sum = 0.0;
    for (const auto& term : terms)
        sum += term.weight * std::exp(-term.kappa * std::abs(x - term.center));
    return sum;
}

double InitialState::norm() const {
    require_terms(*this);
    double sum = 0.0;
    for (const auto& ti : terms)
        for (const auto& tj : terms)
            sum += std::real(ti.weight * std::conj(tj.weight)) *
                   atom_overlap(ti.kappa, tj.kappa, std::abs(ti.center - tj.center));
    return std::sqrt(std::max(sum, 0.0));
}

InitialState beating_state(const BoundState& ground, const BoundState& excited,
                           std::complex<double> mix_alpha,
                           std::complex<double> mix_beta) {
    if (ground.label != StateLabel::fundamental ||
        excited.label != StateLabel::excited)
        throw std::invalid_argument("beating_state: labels must be (fundamental, excited)");
    if (ground.a != excited.a)
        throw std::invalid_argument("beating_state: states belong to different well geometries");
    const double mix = std::norm(mix_alpha) + std::norm(mix_beta);
    if (std::abs(mix - 1.0) > 1e-8)
        throw std::invalid_argument("beating_state: |alpha|^2 + |beta|^2 must be 1");

    InitialState psi0;
    psi0.mix_alpha = mix_alpha;
    psi0.mix_beta = mix_beta;
    const double k0 = std::sqrt(ground.lambda);
    const double k1 = std::sqrt(excited.lambda);
    psi0.terms = {
        {mix_alpha * (ground.coeff_left / (2.0 * k0)), k0, -ground.a},
        {mix_alpha * (ground.coeff_right / (2.0 * k0)), k0, ground.a},
        {mix_beta * (excited.coeff_left / (2.0 * k1)), k1, -excited.a},
        {mix_beta * (excited.coeff_right / (2.0 * k1)), k1, excited.a},
    };
    return psi0;
}

std::complex<double> propagator_kernel(double tau, double y) {
    if (!(tau > 0.0))
        throw std::domain_error("propagator_kernel: tau must be positive");
    const double mod = 1.0 / std::sqrt(4.0 * kPi * tau);
    const double phase = y * y / (4.0 * tau) - kPi / 4.0;
    return std::polar(mod, phase);
}

std::complex<double> free_evolve_exponential(double kappa, double center,
                                             std::complex<double> weight,
                                             double t, double x) {
    if (!(t > 0.0))
        throw std::domain_error("free_evolve_exponential: t must be positive");
    if (!(kappa > 0.0))
        throw std::domain_error("free_evolve_exponential: kappa must be positive");

    const double X = x - center;
    const double rt = std::sqrt(t);

    // one half line: e^{i Xs^2/4t} w(z), z = e^{i pi/4}(2 i kappa t - Xs)/(2 sqrt t);
    // for Im z < 0 (Xs > 2 kappa t) the reflection identity is applied in the
    // exact combined form 2 e^{-kappa Xs + i kappa^2 t} - e^{i Xs^2/4t} w(-z),
    // which keeps the Faddeeva argument in the upper half plane and the
    // explicit exponential decaying.
    const auto half = [&](double Xs) -> cplx {
        const cplx z = kRoot_i * cplx(-Xs, 2.0 * kappa * t) / (2.0 * rt);
        const cplx chirp = std::polar(1.0, Xs * Xs / (4.0 * t));
        if (z.imag() >= 0.0) return chirp * faddeeva(z);
        return 2.0 * std::exp(cplx(-kappa * Xs, kappa * kappa * t)) -
               chirp * faddeeva(-z);
    };

    return weight * 0.5 * (half(X) + half(-X));
}

std::complex<double> free_evolve_at(const InitialState& psi0, double t, double x) {
    require_terms(psi0);
    cplx sum = 0.0;
    for (const auto& term : psi0.terms)
        sum += free_evolve_exponential(term.kappa, term.center, term.weight, t, x);
    return sum;
}

namespace {

struct SimpsonTally {
    cplx value{0.0};
    double error = 0.0;
};

void adapt(const std::function<cplx(double)>& f, double a, double b, cplx fa,
           cplx fm, cplx fb, cplx whole, double tol, int depth, SimpsonTally& out) {
    const double m = 0.5 * (a + b);
    const cplx fl = f(0.5 * (a + m));
    const cplx fr = f(0.5 * (m + b));
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
    const cplx delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        out.error += std::abs(delta) / 15.0;
        return;
    }
    adapt(f, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1, out);
    adapt(f, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1, out);
}

}  // namespace

ComplexAmplitude free_evolve_profile(
    const std::function<std::complex<double>(double)>& profile, double lo,
    double hi, double t, double x, double tol) {
    if (!(t > 0.0))
        throw std::domain_error("free_evolve_profile: t must be positive");
    if (!(lo < hi))
        throw std::invalid_argument("free_evolve_profile: need lo < hi");

    const auto f = [&](double y) { return propagator_kernel(t, x - y) * profile(y); };

    // seed panels bounded to a few chirp cycles each so the first Simpson
    // estimate is not aliased to zero by the oscillation
    const double span = hi - lo;
    const double peak = std::max(std::abs(x - lo), std::abs(x - hi));
    const double cycles = peak * peak / (4.0 * t) / (2.0 * kPi);
    const int panels = static_cast<int>(std::min(4096.0, std::max(8.0, cycles)));

    SimpsonTally tally;
    double a = lo;
    cplx fa = f(a);
    for (int p = 1; p <= panels; ++p) {
        const double b = lo + span * p / panels;
        const double m = 0.5 * (a + b);
        const cplx fb = f(b);
        const cplx fm = f(m);
        const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        adapt(f, a, b, fa, fm, fb, whole, tol / panels, 32, tally);
        a = b;
        fa = fb;
    }
    return {tally.value, std::max(tally.error, 1e-15 * std::abs(tally.value))};
}

}  // namespace dwell
