#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace dwell {

// Per-interval moments of the memory kernel e^{i beta/u} u^{-1/2} on the
// uniform grid u = m dt (beta = 0 is the Abel kernel). b[m-1] and c[m-1]
// weight the left and right endpoint of [(m-1) dt, m dt]; rows assembled
// from them integrate piecewise-linear data against the kernel exactly.
struct MomentTable {
    double dt = 0.0;
    double beta = 0.0;
    std::vector<std::complex<double>> b;
    std::vector<std::complex<double>> c;
};

// Cached table holding at least n intervals. Read-mostly: concurrent readers
// share immutable tables, a missing key is built outside the lock and
// inserted once. Throws std::invalid_argument on bad arguments and
// std::runtime_error if the closed-form moments disagree with an internal
// quadrature cross-check beyond 1e-8.
std::shared_ptr<const MomentTable> kernel_moments(double dt, double beta, int n);

// Same construction and cross-check without touching the process-wide cache.
// Grid reconstruction sweeps over one beta per grid point, each used once;
// caching those tables would retain hundreds of megabytes with no reuse.
MomentTable transient_kernel_moments(double dt, double beta, int n);

// int_0^u e^{i beta/v} v^{-1/2} dv; Fresnel-type closed form, switching to an
// asymptotic series for beta/u >= 400 where the closed form loses digits.
std::complex<double> kernel_antiderivative_0(double beta, double u);

// int_0^u e^{i beta/v} v^{+1/2} dv, same branch structure.
std::complex<double> kernel_antiderivative_1(double beta, double u);

// Interval moments int_{u1}^{u2} e^{i beta/u} u^{-1/2} {1, u} du, 0 <= u1 < u2.
std::complex<double> kernel_moment0(double beta, double u1, double u2);
std::complex<double> kernel_moment1(double beta, double u1, double u2);

// Row W_{n,k}, k = 0..n: sum_k W_{n,k} f(k dt) equals
// int_0^{t_n} f(s) (t_n - s)^{-1/2} ds exactly for piecewise-linear f.
// All weights >= 0 and sum to 2 sqrt(t_n).
std::vector<double> abel_weights(int n, double dt);

// Same row for the kernel e^{i a^2/(t-s)} (t-s)^{-1/2}; a = 0 goes through
// the identical code path as abel_weights and matches it bitwise.
std::vector<std::complex<double>> cross_kernel_moments(int n, double dt, double a);

}  // namespace dwell
