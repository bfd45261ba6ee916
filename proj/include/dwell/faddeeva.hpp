#pragma once

#include <complex>

namespace dwell {

// value with a conservative absolute error estimate attached
struct ComplexAmplitude {
    std::complex<double> value;
    double error_estimate = 0.0;
};

// Scaled complementary error function w(z) = exp(-z^2) erfc(-iz).
// Relative accuracy <= 1e-12 for |z| <= 30 in the closed upper half plane;
// the lower half plane is reached through w(z) = 2 exp(-z^2) - w(-z) and
// throws std::overflow_error once exp(-z^2) is not representable.
std::complex<double> faddeeva(std::complex<double> z);

// same value plus a region-based error bound
ComplexAmplitude faddeeva_checked(std::complex<double> z);

}  // namespace dwell
