#pragma once
// Independent reference values used by the unit tests and the acceptance runner.

#include "cfreq/dde.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cfreq::Complex;

/// Laplace transform of the fundamental solution shifted by tau0 (m = 1).
inline Complex m1_transfer(const cfreq::LinearDelaySystem& s, Complex p) {
    return s.b_tilde * std::exp(-p * s.tau0) / (p - s.a0 - s.a1 * std::exp(-p * s.tau));
}

/// int_a^b e^{c t} dt
inline Complex exp_integral(Complex c, double a, double b) {
    if (b <= a) return 0.0;
    if (std::abs(c) * (b - a) < 1e-8) return (b - a) * (1.0 + 0.5 * c * (a + b));
    return (std::exp(c * b) - std::exp(c * a)) / c;
}

/// M^1_k(theta) for m = 2 and a1 = 0, with x_inf(0) = c_inf. Only the pieces
/// before both delays have elapsed survive; the exponential tails cancel.
inline Complex m2_kernel_ode(double a0, double tau, double tau0, double c_inf, int k, Complex p, double theta) {
    const double s = -theta;
    const double r = 1.0 / std::sqrt(tau);
    const double wk = 2.0 * std::numbers::pi * k / tau;
    const Complex I(0.0, 1.0);
    // A: t in [s, max(s, tau0)], x_k(t - tau0) still on the history
    const Complex A = std::exp(-I * wk * tau0 - a0 * s) * exp_integral(-p + I * wk + a0, s, std::max(s, tau0));
    // B: t in [tau0, max(tau0, s)], x_k(t - s) still on the history
    const Complex B = std::exp(-I * wk * s - a0 * tau0) * exp_integral(-p + I * wk + a0, tau0, std::max(tau0, s));
    return 0.5 * c_inf * r * (A - B);
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

/// int_a^b f by Gauss-Legendre with n nodes.
template <typename F>
Complex integrate_gl(F&& f, double a, double b, int n = 48) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    Complex sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = 0.5 * (a + b) + 0.5 * (b - a) * x[static_cast<std::size_t>(i)];
        sum += w[static_cast<std::size_t>(i)] * f(t);
    }
    return 0.5 * (b - a) * sum;
}

/// W(l, k) for m = 2, a1 = 0: 2 * int conj(U^1_l) M^1_k, U^1_l = phi_l / sqrt(2).
inline Complex m2_transfer_ode(double a0, double tau, double tau0, double c_inf, int l, int k, Complex p) {
    auto f = [&](double theta) {
        const Complex phi = cfreq::basis_function(tau, l, theta);
        return std::conj(phi) * m2_kernel_ode(a0, tau, tau0, c_inf, k, p, theta);
    };
    const Complex v = integrate_gl(f, -tau, -tau0) + integrate_gl(f, -tau0, 0.0);
    return std::sqrt(2.0) * v;
}

}  // namespace oracle
