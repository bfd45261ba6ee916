#include "dwell/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <utility>

#include "dwell/faddeeva.hpp"

namespace dwell {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;
const cplx kRootI{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};

// Above this ratio r = beta/u the erf closed form subtracts two nearly equal
// terms (relative loss ~ 2r eps) and the asymptotic tail series is already
// converged to machine precision, so switch branches there.
constexpr double kAsymptoticRatio = 400.0;

// Tail sum S_p = sum_{m >= p} a_m (-i/r)^m with a_1 = 1/2,
// a_m = a_{m-1} (2m-1)/2; the m < p terms cancel the explicit closed-form
// parts exactly, which is why the branches join smoothly.
cplx tail_series(double r, int first) {
    const cplx z{0.0, -1.0 / r};
    cplx term{1.0, 0.0};
    double am = 1.0;
    for (int m = 1; m < first; ++m) {
        am *= (2.0 * m - 1.0) / 2.0;
        term *= z;
    }
    term *= am;
    cplx sum{0.0, 0.0};
    for (int m = first; m < 40; ++m) {
        term *= (2.0 * m - 1.0) / 2.0;
        term *= z;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

std::complex<double> kernel_antiderivative_0(double beta, double u) {
    if (beta < 0.0) throw std::invalid_argument("kernel_antiderivative_0: beta < 0");
    if (u < 0.0) throw std::invalid_argument("kernel_antiderivative_0: u < 0");
    if (u == 0.0) return {0.0, 0.0};
    const double su = std::sqrt(u);
    if (beta == 0.0) return {2.0 * su, 0.0};
    const double r = beta / u;
    const cplx phase = std::polar(1.0, r);
    if (r < kAsymptoticRatio) {
        const cplx eta = std::sqrt(r) * kRootI;
        const cplx w = faddeeva(eta);
        return phase * (2.0 * su + 2.0 * std::sqrt(kPi * beta) * (cplx{0.0, 1.0} * kRootI) * w);
    }
    return -2.0 * su * phase * tail_series(r, 1);
}

std::complex<double> kernel_antiderivative_1(double beta, double u) {
    if (beta < 0.0) throw std::invalid_argument("kernel_antiderivative_1: beta < 0");
    if (u < 0.0) throw std::invalid_argument("kernel_antiderivative_1: u < 0");
    if (u == 0.0) return {0.0, 0.0};
    const double su = std::sqrt(u);
    if (beta == 0.0) return {2.0 / 3.0 * u * su, 0.0};
    const double r = beta / u;
    const cplx phase = std::polar(1.0, r);
    if (r < kAsymptoticRatio) {
        const cplx eta = std::sqrt(r) * kRootI;
        const cplx w = faddeeva(eta);
        return phase * (2.0 / 3.0 * u * su + cplx{0.0, 4.0 * beta / 3.0} * su -
                        4.0 / 3.0 * beta * std::sqrt(beta) * std::sqrt(kPi) * kRootI * w);
    }
    return cplx{0.0, -4.0 / 3.0} * beta * su * phase * tail_series(r, 2);
}

std::complex<double> kernel_moment0(double beta, double u1, double u2) {
    if (!(0.0 <= u1 && u1 < u2)) throw std::invalid_argument("kernel_moment0: need 0 <= u1 < u2");
    return kernel_antiderivative_0(beta, u2) - kernel_antiderivative_0(beta, u1);
}

std::complex<double> kernel_moment1(double beta, double u1, double u2) {
    if (!(0.0 <= u1 && u1 < u2)) throw std::invalid_argument("kernel_moment1: need 0 <= u1 < u2");
    return kernel_antiderivative_1(beta, u2) - kernel_antiderivative_1(beta, u1);
}

namespace {

struct SimpsonTally {
    cplx value{0.0, 0.0};
};

template <typename F>
void simpson_adapt(const F& f, double lo, double hi, cplx flo, cplx fmid, cplx fhi,
                   cplx whole, double tol, int depth, SimpsonTally& out) {
    const double mid = 0.5 * (lo + hi);
    const cplx fl2 = f(0.5 * (lo + mid));
    const cplx fr2 = f(0.5 * (mid + hi));
    const cplx left = (mid - lo) / 6.0 * (flo + 4.0 * fl2 + fmid);
    const cplx right = (hi - mid) / 6.0 * (fmid + 4.0 * fr2 + fhi);
    const cplx delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        out.value += left + right + delta / 15.0;
        return;
    }
    simpson_adapt(f, lo, mid, flo, fl2, fmid, left, 0.5 * tol, depth - 1, out);
    simpson_adapt(f, mid, hi, fmid, fr2, fhi, right, 0.5 * tol, depth - 1, out);
}

template <typename F>
cplx simpson(const F& f, double lo, double hi, double tol) {
    SimpsonTally out;
    const double mid = 0.5 * (lo + hi);
    const cplx flo = f(lo), fmid = f(mid), fhi = f(hi);
    const cplx whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    simpson_adapt(f, lo, hi, flo, fmid, fhi, whole, tol, 28, out);
    return out.value;
}

// 2 int_{v0}^inf e^{i beta v^2} v^{-2} dv along the ray v = v0 + y e^{i pi/4},
// where the integrand decays like e^{-sqrt(2) beta v0 y - beta y^2}. Needs
// beta > 0, v0 > 0.
cplx rotated_tail_quadrature(double beta, double v0) {
    auto f = [beta, v0](double y) {
        const cplx v = v0 + y * kRootI;
        return std::exp(cplx{0.0, beta} * v * v) / (v * v) * kRootI;
    };
    const double lin = std::numbers::sqrt2 * beta * v0;
    const double ymax = (-lin + std::sqrt(lin * lin + 184.0 * beta)) / (2.0 * beta);
    cplx total{0.0, 0.0};
    double lo = 0.0;
    for (int p = 0; p < 8; ++p) {
        const double hi = (p == 7) ? ymax : ymax * std::pow(2.0, p - 7.0) * 0.5;
        total += simpson(f, lo, hi, 1.5e-12);
        lo = hi;
    }
    return 2.0 * total;
}

// int_{u1}^{u2} e^{i beta/u} u^{-1/2} du by the substitution v = 1/sqrt(u);
// independent of the antiderivative formulas above.
cplx moment0_quadrature(double beta, double u1, double u2) {
    const cplx t2 = rotated_tail_quadrature(beta, 1.0 / std::sqrt(u2));
    if (u1 == 0.0) return t2;
    return t2 - rotated_tail_quadrature(beta, 1.0 / std::sqrt(u1));
}

MomentTable build_table(double dt, double beta, int n) {
    MomentTable tbl;
    tbl.dt = dt;
    tbl.beta = beta;
    tbl.b.resize(static_cast<size_t>(n));
    tbl.c.resize(static_cast<size_t>(n));
    cplx fa_prev{0.0, 0.0};
    cplx fb_prev{0.0, 0.0};
    for (int m = 1; m <= n; ++m) {
        const cplx fa = kernel_antiderivative_0(beta, m * dt);
        const cplx fb = kernel_antiderivative_1(beta, m * dt);
        const cplx p0 = fa - fa_prev;
        const cplx p1 = fb - fb_prev;
        tbl.b[static_cast<size_t>(m - 1)] = (p1 - (m - 1) * dt * p0) / dt;
        tbl.c[static_cast<size_t>(m - 1)] = (m * dt * p0 - p1) / dt;
        fa_prev = fa;
        fb_prev = fb;
    }
    if (beta > 0.0) {
        // closed-form moments vs independent quadrature on the first (most
        // oscillatory) and last interval
        for (const int m : {1, n}) {
            const cplx closed = kernel_moment0(beta, (m - 1) * dt, m * dt);
            const cplx quad = moment0_quadrature(beta, (m - 1) * dt, m * dt);
            if (std::abs(closed - quad) > 1e-8) {
                throw std::runtime_error(
                    "kernel_moments: closed-form moment failed the quadrature "
                    "cross-check (beta=" + std::to_string(beta) +
                    ", interval " + std::to_string(m) + ")");
            }
        }
    }
    return tbl;
}

std::map<std::pair<double, double>, std::shared_ptr<const MomentTable>> g_tables;
std::shared_mutex g_tables_mutex;

}  // namespace

std::shared_ptr<const MomentTable> kernel_moments(double dt, double beta, int n) {
    if (!(dt > 0.0)) throw std::invalid_argument("kernel_moments: dt must be > 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("kernel_moments: beta must be >= 0");
    if (n < 1) throw std::invalid_argument("kernel_moments: n must be >= 1");
    const auto key = std::make_pair(dt, beta);
    size_t have = 0;
    {
        std::shared_lock lock(g_tables_mutex);
        auto it = g_tables.find(key);
        if (it != g_tables.end()) {
            if (it->second->b.size() >= static_cast<size_t>(n)) return it->second;
            have = it->second->b.size();
        }
    }
    // grow geometrically so repeated extensions stay O(total) work
    const int target = static_cast<int>(std::max<size_t>(static_cast<size_t>(n), 2 * have));
    auto built = std::make_shared<const MomentTable>(build_table(dt, beta, target));
    std::unique_lock lock(g_tables_mutex);
    auto& slot = g_tables[key];
    if (!slot || slot->b.size() < built->b.size()) slot = std::move(built);
    return slot;
}

MomentTable transient_kernel_moments(double dt, double beta, int n) {
    if (!(dt > 0.0)) throw std::invalid_argument("transient_kernel_moments: dt must be > 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("transient_kernel_moments: beta must be >= 0");
    if (n < 1) throw std::invalid_argument("transient_kernel_moments: n must be >= 1");
    return build_table(dt, beta, n);
}

std::vector<double> abel_weights(int n, double dt) {
    if (n < 1) throw std::invalid_argument("abel_weights: n must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("abel_weights: dt must be > 0");
    const auto tbl = kernel_moments(dt, 0.0, n);
    std::vector<double> w(static_cast<size_t>(n) + 1);
    w[0] = tbl->b[static_cast<size_t>(n - 1)].real();
    for (int k = 1; k < n; ++k)
        w[static_cast<size_t>(k)] =
            (tbl->b[static_cast<size_t>(n - k - 1)] + tbl->c[static_cast<size_t>(n - k)]).real();
    w[static_cast<size_t>(n)] = tbl->c[0].real();
    return w;
}

std::vector<std::complex<double>> cross_kernel_moments(int n, double dt, double a) {
    if (n < 1) throw std::invalid_argument("cross_kernel_moments: n must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("cross_kernel_moments: dt must be > 0");
    if (!(a >= 0.0)) throw std::invalid_argument("cross_kernel_moments: a must be >= 0");
    const auto tbl = kernel_moments(dt, a * a, n);
    std::vector<cplx> w(static_cast<size_t>(n) + 1);
    w[0] = tbl->b[static_cast<size_t>(n - 1)];
    for (int k = 1; k < n; ++k)
        w[static_cast<size_t>(k)] =
            tbl->b[static_cast<size_t>(n - k - 1)] + tbl->c[static_cast<size_t>(n - k)];
    w[static_cast<size_t>(n)] = tbl->c[0];
    return w;
}

}  // namespace dwell
