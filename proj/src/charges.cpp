#include "dwell/charges.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dwell/kernels.hpp"

namespace dwell {

namespace {

using cplx = std::complex<double>;

constexpr int kNewtonAfter = 20;

cplx nonlinear_f(cplx q, double sigma) {
    if (sigma == 0.0) return q;
    const double n2 = std::norm(q);
    if (n2 == 0.0) return {0.0, 0.0};
    return q * std::pow(n2, sigma);
}

// sum_{k=0}^{n-1} W_{n,k} F[k] assembled from the interval moments:
// W_{n,0} = b(n), W_{n,k} = b(n-k) + c(n-k+1) for 1 <= k <= n-1. The
// current-step weight W_{n,n} = c(1) is applied by the caller.
cplx history_sum(const std::vector<cplx>& b, const std::vector<cplx>& c,
                 const std::vector<cplx>& f, int n) {
    cplx s = b[static_cast<size_t>(n - 1)] * f[0];
    for (int k = 1; k < n; ++k)
        s += (b[static_cast<size_t>(n - k - 1)] + c[static_cast<size_t>(n - k)]) *
             f[static_cast<size_t>(k)];
    return s;
}

// real 2x2 block of the Wirtinger pair dq -> p dq + q conj(dq)
struct Block {
    double m00, m01, m10, m11;
};

Block wirtinger_block(cplx p, cplx q) {
    return {p.real() + q.real(), q.imag() - p.imag(),
            p.imag() + q.imag(), p.real() - q.real()};
}

// f'(q) in Wirtinger form: d f = p dq + q conj(dq)
void nonlinear_df(cplx x, double sigma, cplx& p, cplx& q) {
    const double n2 = std::norm(x);
    if (n2 == 0.0) {
        p = q = cplx{0.0, 0.0};
        return;
    }
    p = cplx{(1.0 + sigma) * std::pow(n2, sigma), 0.0};
    q = sigma * x * x * std::pow(n2, sigma - 1.0);
}

// Gaussian elimination with partial pivoting on a 4x4 system in place;
// solution lands in a[.][4]. Returns false if a pivot collapses.
bool solve4(double a[4][5]) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        if (piv != col)
            for (int cc = col; cc < 5; ++cc) std::swap(a[piv][cc], a[col][cc]);
        for (int row = col + 1; row < 4; ++row) {
            const double fac = a[row][col] / a[col][col];
            for (int cc = col; cc < 5; ++cc) a[row][cc] -= fac * a[col][cc];
        }
    }
    for (int row = 3; row >= 0; --row) {
        for (int cc = row + 1; cc < 4; ++cc) a[row][4] -= a[row][cc] * a[cc][4];
        a[row][4] /= a[row][row];
    }
    return true;
}

}  // namespace

ChargeTrajectory solve_charges(const WellConfig& cfg, const Nonlinearity& nl,
                               const InitialState& psi0, const SolverParams& params) {
    if (!(cfg.a > 0.0)) throw std::invalid_argument("solve_charges: need a > 0");
    if (!(nl.sigma >= 0.0)) throw std::invalid_argument("solve_charges: need sigma >= 0");
    if (!(params.dt > 0.0)) throw std::invalid_argument("solve_charges: need dt > 0");
    if (!(params.t_final >= params.dt))
        throw std::invalid_argument("solve_charges: need t_final >= dt");
    if (!(params.fixed_point_tol > 0.0))
        throw std::invalid_argument("solve_charges: need fixed_point_tol > 0");
    if (params.max_inner_iter < 1)
        throw std::invalid_argument("solve_charges: need max_inner_iter >= 1");
    if (!(params.blowup_threshold > 0.0))
        throw std::invalid_argument("solve_charges: need blowup_threshold > 0");

    const double a = cfg.a;
    const double dt = params.dt;
    const double sigma = nl.sigma;
    const double thr = params.blowup_threshold;
    const int n_steps = static_cast<int>(std::floor(params.t_final / dt + 1e-9));
    const cplx mu = nl.gamma / (2.0 * std::sqrt(std::numbers::pi)) *
                    cplx{std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};

    const auto abel = kernel_moments(dt, 0.0, n_steps);
    const auto cross = kernel_moments(dt, a * a, n_steps);
    const cplx w_self_a = abel->c[0];   // (4/3) sqrt(dt)
    const cplx w_self_c = cross->c[0];

    ChargeTrajectory traj;
    traj.times.reserve(static_cast<size_t>(n_steps) + 1);
    traj.q1.reserve(traj.times.capacity());
    traj.q2.reserve(traj.times.capacity());
    traj.inner_iterations.reserve(traj.times.capacity());
    traj.residuals.reserve(traj.times.capacity());

    auto push = [&traj](double t, cplx x1, cplx x2, int iters, double res) {
        traj.times.push_back(t);
        traj.q1.push_back(x1);
        traj.q2.push_back(x2);
        traj.inner_iterations.push_back(iters);
        traj.residuals.push_back(res);
    };

    push(0.0, psi0.evaluate(-a), psi0.evaluate(a), 0, 0.0);

    const bool coupled = nl.gamma != 0.0;
    std::vector<cplx> f1, f2;  // f(q_i) at accepted grid points
    if (coupled) {
        f1.reserve(traj.times.capacity());
        f2.reserve(traj.times.capacity());
        f1.push_back(nonlinear_f(traj.q1[0], sigma));
        f2.push_back(nonlinear_f(traj.q2[0], sigma));
    }

    auto exceeded = [thr](cplx x1, cplx x2) {
        const double m1 = std::abs(x1);
        const double m2 = std::abs(x2);
        return !(m1 <= thr && m2 <= thr);  // catches NaN as well
    };

    for (int n = 1; n <= n_steps; ++n) {
        const double t = n * dt;
        const cplx g1 = free_evolve_at(psi0, t, -a);
        const cplx g2 = free_evolve_at(psi0, t, a);

        if (!coupled) {
            push(t, g1, g2, 0, 0.0);
            continue;
        }

        const cplx rhs1 = g1 - mu * (history_sum(abel->b, abel->c, f1, n) +
                                     history_sum(cross->b, cross->c, f2, n));
        const cplx rhs2 = g2 - mu * (history_sum(abel->b, abel->c, f2, n) +
                                     history_sum(cross->b, cross->c, f1, n));

        cplx x1, x2;
        int iters = 0;
        double res = 0.0;
        bool accepted = false;

        if (sigma == 0.0) {
            const cplx diag = 1.0 + mu * w_self_a;
            const cplx off = mu * w_self_c;
            const cplx det = diag * diag - off * off;
            if (std::abs(det) == 0.0)
                throw std::runtime_error("solve_charges: singular step matrix");
            x1 = (diag * rhs1 - off * rhs2) / det;
            x2 = (diag * rhs2 - off * rhs1) / det;
            iters = 1;
            res = std::max(std::abs(x1 + mu * (w_self_a * x1 + w_self_c * x2) - rhs1),
                           std::abs(x2 + mu * (w_self_a * x2 + w_self_c * x1) - rhs2));
            accepted = true;
        } else {
            if (n >= 2) {
                x1 = 2.0 * traj.q1[static_cast<size_t>(n - 1)] -
                     traj.q1[static_cast<size_t>(n - 2)];
                x2 = 2.0 * traj.q2[static_cast<size_t>(n - 1)] -
                     traj.q2[static_cast<size_t>(n - 2)];
            } else {
                x1 = traj.q1[0];
                x2 = traj.q2[0];
            }

            for (int it = 1; it <= params.max_inner_iter; ++it) {
                const cplx fx1 = nonlinear_f(x1, sigma);
                const cplx fx2 = nonlinear_f(x2, sigma);
                const cplx y1 = rhs1 - mu * (w_self_a * fx1 + w_self_c * fx2);
                const cplx y2 = rhs2 - mu * (w_self_a * fx2 + w_self_c * fx1);
                res = std::max(std::abs(y1 - x1), std::abs(y2 - x2));
                if (res <= params.fixed_point_tol) {
                    iters = it;
                    accepted = true;
                    break;
                }

                bool stepped = false;
                if (it >= kNewtonAfter) {
                    cplx p1, q1w, p2, q2w;
                    nonlinear_df(x1, sigma, p1, q1w);
                    nonlinear_df(x2, sigma, p2, q2w);
                    const Block b11 = wirtinger_block(mu * w_self_a * p1, mu * w_self_a * q1w);
                    const Block b12 = wirtinger_block(mu * w_self_c * p2, mu * w_self_c * q2w);
                    const Block b21 = wirtinger_block(mu * w_self_c * p1, mu * w_self_c * q1w);
                    const Block b22 = wirtinger_block(mu * w_self_a * p2, mu * w_self_a * q2w);
                    const cplx r1 = x1 - y1;
                    const cplx r2 = x2 - y2;
                    double m[4][5] = {
                        {1.0 + b11.m00, b11.m01, b12.m00, b12.m01, r1.real()},
                        {b11.m10, 1.0 + b11.m11, b12.m10, b12.m11, r1.imag()},
                        {b21.m00, b21.m01, 1.0 + b22.m00, b22.m01, r2.real()},
                        {b21.m10, b21.m11, b22.m10, 1.0 + b22.m11, r2.imag()},
                    };
                    if (solve4(m)) {
                        x1 -= cplx{m[0][4], m[1][4]};
                        x2 -= cplx{m[2][4], m[3][4]};
                        stepped = true;
                    }
                }
                if (!stepped) {
                    x1 = 0.5 * x1 + 0.5 * y1;
                    x2 = 0.5 * x2 + 0.5 * y2;
                }

                if (exceeded(x1, x2)) {
                    // keep the offending iterate so callers can see the scale
                    push(t, x1, x2, it, res);
                    traj.status = SolveStatus::blow_up;
                    traj.blowup_time = t;
                    return traj;
                }
            }
            if (!accepted) {
                throw std::runtime_error(
                    "solve_charges: inner iteration exhausted " +
                    std::to_string(params.max_inner_iter) + " iterations at t=" +
                    std::to_string(t) + " (residual " + std::to_string(res) +
                    "); reduce dt or loosen fixed_point_tol");
            }
        }

        if (exceeded(x1, x2)) {
            push(t, x1, x2, iters, res);
            traj.status = SolveStatus::blow_up;
            traj.blowup_time = t;
            return traj;
        }

        push(t, x1, x2, iters, res);
        f1.push_back(nonlinear_f(x1, sigma));
        f2.push_back(nonlinear_f(x2, sigma));
    }

    return traj;
}

std::pair<std::complex<double>, std::complex<double>> linear_exact_charges(
    const WellConfig& cfg, std::complex<double> mix_alpha,
    std::complex<double> mix_beta, double t) {
    const auto spectrum = solve_eigenvalues(cfg);
    if (spectrum.existence != Existence::TwoEigenvalues || !spectrum.pair)
        throw std::invalid_argument(
            "linear_exact_charges: configuration lacks two bound states");
    const auto ground =
        bound_state(cfg, spectrum.pair->lambda0, StateLabel::fundamental);
    const auto excited =
        bound_state(cfg, spectrum.pair->lambda1, StateLabel::excited);
    const cplx rot0 = std::polar(1.0, spectrum.pair->lambda0 * t);
    const cplx rot1 = std::polar(1.0, spectrum.pair->lambda1 * t);
    const double a = cfg.a;
    const cplx q1 = mix_alpha * eval_state(ground, -a) * rot0 +
                    mix_beta * eval_state(excited, -a) * rot1;
    const cplx q2 = mix_alpha * eval_state(ground, a) * rot0 +
                    mix_beta * eval_state(excited, a) * rot1;
    return {q1, q2};
}

double effective_gamma(const Nonlinearity& nl, const InitialState& psi0,
                       const WellConfig& cfg) {
    const double right = std::norm(psi0.evaluate(cfg.a));
    const double left = std::norm(psi0.evaluate(-cfg.a));
    const double denom = std::pow(right, nl.sigma) + std::pow(left, nl.sigma);
    if (denom == 0.0)
        throw std::domain_error("effective_gamma: initial state vanishes at both wells");
    return 2.0 * nl.gamma / denom;
}

}  // namespace dwell
