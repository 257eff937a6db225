#include "cfreq/dde.hpp"

#include "cfreq/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace cfreq {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Configuration: return "configuration error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Contract: return "contract error";
        case ErrorKind::Numeric: return "numeric error";
        case ErrorKind::IncompleteSpectrum: return "incomplete spectrum";
        case ErrorKind::Verification: return "verification error";
        case ErrorKind::Boundary: return "root on boundary";
        case ErrorKind::InsufficientSpectrum: return "insufficient spectrum";
        case ErrorKind::Precondition: return "precondition error";
        case ErrorKind::Bracket: return "bracket error";
        case ErrorKind::NotFound: return "not found";
    }
    return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

void LinearDelaySystem::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorKind::Domain, "delay tau must be positive");
    if (!(tau0 >= 0.0 && tau0 <= tau)) fail(ErrorKind::Domain, "measurement delay tau0 must lie in [0, tau]");
    if (!(lambda_bound > 0.0)) fail(ErrorKind::Domain, "sector bound must be positive");
    if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(b_tilde))
        fail(ErrorKind::Domain, "system coefficients must be finite");
}

Complex basis_function(double tau, int k, double theta) {
    // polar() keeps phi_{-k} == conj(phi_k) bit for bit
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) * theta / tau;
    return std::polar(1.0 / std::sqrt(tau), phase);
}

History basis_history(double tau, int k) {
    History hist;
    hist.value = [tau, k](double theta) { return basis_function(tau, k, theta); };
    hist.deriv = [tau, k](double theta) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / tau;
        const Complex v = basis_function(tau, k, theta);
        return Complex(-w * v.imag(), w * v.real());
    };
    return hist;
}

History zero_history() {
    History hist;
    hist.value = [](double) { return Complex{}; };
    hist.deriv = [](double) { return Complex{}; };
    return hist;
}

std::string SolutionLabel::to_string() const {
    if (kind == Kind::Fundamental) return "fundamental";
    return "basis_" + std::to_string(k);
}

int delay_nodes(double tau, double h_target, int multiple) {
    if (!(tau > 0.0)) fail(ErrorKind::Domain, "delay tau must be positive");
    if (!(h_target > 0.0)) fail(ErrorKind::Configuration, "step h must be positive");
    if (multiple < 1) multiple = 1;
    long n = std::lround(tau / h_target);
    if (n < 1) n = 1;
    n = ((n + multiple - 1) / multiple) * multiple;
    return static_cast<int>(n);
}

namespace {

Complex hermite(Complex y0, Complex y1, Complex d0, Complex d1, double h, double s) {
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h01 * y1 + h * (h10 * d0 + h11 * d1);
}

}  // namespace

Complex SolutionTable::deriv_left(int q) const {
    if (q == 0) return left_deriv0_;
    if (q == n_) return left_deriv_tau_;
    return derivs_[q + n_];
}

std::vector<double> SolutionTable::breakpoints() const {
    std::vector<double> out;
    for (int q = 0; q <= n_T_; q += n_) out.push_back(t(q));
    return out;
}

Complex SolutionTable::eval(double t) const {
    const double lo = -tau_;
    const double hi = t_end();
    const double slack = 1e-12 * (1.0 + std::abs(hi));
    if (!(t >= lo - slack && t <= hi + slack)) {
        std::ostringstream msg;
        msg << "eval: t = " << t << " outside [" << lo << ", " << hi << "]";
        fail(ErrorKind::Domain, msg.str());
    }
    const double u = t / h_;
    const double r = std::round(u);
    if (std::abs(u - r) <= 1e-9) {
        int q = static_cast<int>(r);
        q = std::clamp(q, -n_, n_T_);
        return value(q);
    }
    int j = static_cast<int>(std::floor(u));
    j = std::clamp(j, -n_, n_T_ - 1);
    const double s = u - j;
    return hermite(value(j), value_left(j + 1), deriv(j), deriv_left(j + 1), h_, s);
}

void SolutionTable::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Configuration, "cannot write " + path);
    out << "t,re,im\n" << std::setprecision(17);
    for (int q = -n_; q <= n_T_; ++q) {
        const Complex v = value(q);
        out << t(q) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

SolutionTable integrate(const LinearDelaySystem& sys, const History& history, Complex x0,
                        double T, double h) {
    sys.validate();
    if (!(T > 0.0)) fail(ErrorKind::Domain, "integrate: horizon T must be positive");
    if (!(h > 0.0)) fail(ErrorKind::Configuration, "integrate: step h must be positive");
    const double ratio = sys.tau / h;
    const double n_round = std::round(ratio);
    if (n_round < 1.0 || std::abs(ratio - n_round) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "integrate: tau/h = " << ratio << " is not an integer";
        fail(ErrorKind::Configuration, msg.str());
    }

    SolutionTable tab;
    tab.tau_ = sys.tau;
    tab.h_ = h;
    tab.n_ = static_cast<int>(n_round);
    tab.n_T_ = static_cast<int>(std::ceil(T / h - 1e-9));
    const int n = tab.n_;
    const int nT = tab.n_T_;
    tab.values_.assign(static_cast<std::size_t>(n + nT + 1), Complex{});
    tab.derivs_.assign(static_cast<std::size_t>(n + nT + 1), Complex{});

    Complex* X = tab.values_.data() + n;
    Complex* D = tab.derivs_.data() + n;
    for (int q = -n; q < 0; ++q) {
        X[q] = history.value(q * h);
        D[q] = history.deriv(q * h);
    }
    X[0] = x0;
    tab.left_value0_ = history.value(0.0);
    tab.left_deriv0_ = history.deriv(0.0);

    const double a0 = sys.a0;
    const double a1 = sys.a1;
    auto rhs = [a0, a1](Complex x, Complex xd) { return a0 * x + a1 * xd; };

    // right derivative at node 0: delayed argument is -tau
    D[0] = rhs(X[0], history.value(-sys.tau));
    tab.left_deriv_tau_ = Complex{};

    const double half = 0.5 * h;
    for (int q = 0; q < nT; ++q) {
        const int d = q - n;
        Complex xd_a;
        Complex xd_m;
        Complex xd_b;
        if (q < n) {
            xd_a = history.value(d * h);
            xd_m = history.value((d + 0.5) * h);
            xd_b = history.value((d + 1) * h);
        } else {
            xd_a = X[d];
            xd_b = X[d + 1];
            const Complex d1 = (d + 1 == n) ? tab.left_deriv_tau_ : D[d + 1];
            xd_m = 0.5 * (xd_a + xd_b) + (h / 8.0) * (D[d] - d1);
        }
        const Complex x = X[q];
        const Complex k1 = rhs(x, xd_a);
        const Complex k2 = rhs(x + half * k1, xd_m);
        const Complex k3 = rhs(x + half * k2, xd_m);
        const Complex k4 = rhs(x + h * k3, xd_b);
        const Complex xn = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        X[q + 1] = xn;

        const int dn = q + 1 - n;
        Complex delayed_right;
        if (dn < 0) delayed_right = history.value(dn * h);
        else delayed_right = X[dn];
        D[q + 1] = rhs(xn, delayed_right);
        if (q + 1 == n) tab.left_deriv_tau_ = rhs(xn, tab.left_value0_);
    }
    if (nT < n) tab.left_deriv_tau_ = Complex{};
    return tab;
}

double fundamental_jump(const LinearDelaySystem& sys, int m) {
    if (m < 1) fail(ErrorKind::Domain, "compound order m must be >= 1");
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;  // (-1)^{m+1}
    return sign * std::sqrt(fact) * sys.b_tilde;
}

SolutionTable fundamental_solution(const LinearDelaySystem& sys, int m, double T, double h) {
    const double jump = fundamental_jump(sys, m);
    SolutionTable tab = integrate(sys, zero_history(), Complex(jump, 0.0), T, h);
    tab.label_ = {SolutionLabel::Kind::Fundamental, 0};
    return tab;
}

SolutionTable basis_solution(const LinearDelaySystem& sys, int k, double T, double h) {
    SolutionTable tab = integrate(sys, basis_history(sys.tau, k), basis_function(sys.tau, k, 0.0), T, h);
    tab.label_ = {SolutionLabel::Kind::Basis, k};
    return tab;
}

}  // namespace cfreq
