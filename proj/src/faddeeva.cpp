#include "dwell/faddeeva.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dwell {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const double kSqrtPi = std::sqrt(kPi);

using cplx = std::complex<double>;

// Maclaurin region: w(z) = exp(-z^2) + i z * sum_m (-z^2)^m / Gamma(m + 3/2).
// Cancellation grows like exp(|z|^2), so the region is capped at |z| <= 2.5.
cplx w_series(cplx z) {
    const cplx mz2 = -z * z;
    cplx term = 2.0 / kSqrtPi;  // 1/Gamma(3/2)
    cplx sum = term;
    for (int m = 1; m < 64; ++m) {
        term *= mz2 / (m + 0.5);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(mz2) + cplx(0.0, 1.0) * z * sum;
}

// Rational approximation on the upper half plane (Weideman 1994, N = 64).
// Coefficients come from a cosine transform of exp(-t^2)(L^2+t^2) sampled on
// the tangent-mapped grid; computed once at startup by direct DFT.
struct WeidemanTable {
    static constexpr int N = 64;
    double L;
    std::array<double, N> a;  // a[n-1] multiplies Z^(n-1)
    WeidemanTable() {
        const int M = 2 * N, M2 = 4 * N;
        L = std::sqrt(N / std::sqrt(2.0));
        std::array<double, 4 * N> g{};  // samples ordered by theta = j*pi/M, j = 0..M2-1
        for (int j = 0; j < M2; ++j) {
            int k = (j < M) ? j : j - M2;  // theta_k in (-pi, pi]
            if (k == -M) { g[j] = 0.0; continue; }
            double theta = k * kPi / M;
            double t = L * std::tan(0.5 * theta);
            g[j] = std::exp(-t * t) * (L * L + t * t);
        }
        for (int n = 1; n <= N; ++n) {
            double s = 0.0;
            for (int j = 0; j < M2; ++j) s += g[j] * std::cos(n * kPi * j / M);
            a[n - 1] = s / M2;
        }
    }
};

cplx w_rational(cplx z) {
    static const WeidemanTable tab;
    const cplx iz = cplx(0.0, 1.0) * z;
    const cplx d = tab.L - iz;
    const cplx Z = (tab.L + iz) / d;
    cplx p = 0.0;
    for (int n = WeidemanTable::N - 1; n >= 0; --n) p = p * Z + tab.a[n];
    return 2.0 * p / (d * d) + (1.0 / kSqrtPi) / d;
}

// Laplace continued fraction, accurate for large |z| away from the real axis;
// on the reflection boundary it is only used for |z| >= 12.
cplx w_contfrac(cplx z, int depth = 24) {
    cplx r = 0.0;
    for (int n = depth; n >= 1; --n) r = (0.5 * n) / (z - r);
    return cplx(0.0, 1.0 / kSqrtPi) / (z - r);
}

cplx w_upper(cplx z) {
    const double az = std::abs(z);
    if (az <= 2.5) return w_series(z);
    if (az < 12.0) return w_rational(z);
    return w_contfrac(z);
}

double upper_error_bound(cplx z) {
    const double az = std::abs(z);
    if (az <= 2.5) return 5e-15 * std::exp(std::norm(z) * 0.5);
    if (az < 12.0) return 5e-14;
    return 1e-14;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    if (z.imag() >= 0.0) return w_upper(z);
    // reflection: w(z) = 2 exp(-z^2) - w(-z); exp(-z^2) has modulus exp(y^2 - x^2)
    const double growth = z.imag() * z.imag() - z.real() * z.real();
    if (growth > 700.0)
        throw std::overflow_error(
            "faddeeva: exp(-z^2) overflows for z = (" + std::to_string(z.real()) + ", " +
            std::to_string(z.imag()) + "); Im z too negative relative to Re z");
    return 2.0 * std::exp(-z * z) - w_upper(-z);
}

ComplexAmplitude faddeeva_checked(std::complex<double> z) {
    cplx v = faddeeva(z);
    double err;
    if (z.imag() >= 0.0) {
        err = upper_error_bound(z) * std::max(1.0, std::abs(v));
    } else {
        const double growth = z.imag() * z.imag() - z.real() * z.real();
        err = 2.0 * std::exp(growth) * 1e-15 + upper_error_bound(-z) * std::max(1.0, std::abs(v));
    }
    return {v, err};
}

}  // namespace dwell
