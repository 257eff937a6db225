#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace cfreq {

using Complex = std::complex<double>;

enum class ConstraintKind { NormBound, MonotoneSector };

/// x'(t) = a0 x(t) + a1 x(t - tau), measured at -tau0, with gain b_tilde and sector bound.
struct LinearDelaySystem {
    double a0 = 0.0;
    double a1 = 0.0;
    double tau = 1.0;
    double tau0 = 0.0;
    double b_tilde = 1.0;
    double lambda_bound = 1.0;
    ConstraintKind constraint_kind = ConstraintKind::NormBound;

    /// Throws a domain error when an invariant is broken.
    void validate() const;
};

/// Analytic history on [-tau, 0]; deriv is needed for the Hermite dense output.
struct History {
    std::function<Complex(double)> value;
    std::function<Complex(double)> deriv;
};

[[nodiscard]] History basis_history(double tau, int k);
[[nodiscard]] History zero_history();

/// phi_k(theta) = tau^{-1/2} exp(i 2 pi k theta / tau)
[[nodiscard]] Complex basis_function(double tau, int k, double theta);

struct SolutionLabel {
    enum class Kind { Basis, Fundamental };
    Kind kind = Kind::Basis;
    int k = 0;

    [[nodiscard]] std::string to_string() const;
};

/// One solution on the uniform grid t_q = q h, q = -n .. n_T, with n h = tau.
class SolutionTable {
public:
    SolutionTable() = default;

    [[nodiscard]] const SolutionLabel& label() const noexcept { return label_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] int nodes_per_delay() const noexcept { return n_; }
    [[nodiscard]] int last_node() const noexcept { return n_T_; }
    [[nodiscard]] double t_end() const noexcept { return n_T_ * h_; }
    [[nodiscard]] double t(int q) const noexcept { return q * h_; }

    /// Node value (right limit at q = 0). Valid for -n <= q <= n_T.
    [[nodiscard]] Complex value(int q) const { return values_[q + n_]; }
    /// Left limit at node q; differs from value() only at q = 0.
    [[nodiscard]] Complex value_left(int q) const { return q == 0 ? left_value0_ : values_[q + n_]; }
    [[nodiscard]] Complex deriv(int q) const { return derivs_[q + n_]; }
    [[nodiscard]] Complex deriv_left(int q) const;

    /// Pointer p with p[q] == value(q) for q in [-n, n_T].
    [[nodiscard]] const Complex* node_values() const noexcept { return values_.data() + n_; }

    [[nodiscard]] std::vector<double> breakpoints() const;

    /// Cubic Hermite dense output; exact at nodes, right-limit convention at t = 0.
    [[nodiscard]] Complex eval(double t) const;

    void write_csv(const std::string& path) const;

private:
    friend SolutionTable integrate(const LinearDelaySystem&, const History&, Complex, double, double);
    friend SolutionTable fundamental_solution(const LinearDelaySystem&, int, double, double);
    friend SolutionTable basis_solution(const LinearDelaySystem&, int, double, double);

    SolutionLabel label_{};
    double tau_ = 0.0;
    double h_ = 0.0;
    int n_ = 0;
    int n_T_ = 0;
    std::vector<Complex> values_;
    std::vector<Complex> derivs_;
    Complex left_value0_{};
    Complex left_deriv0_{};
    Complex left_deriv_tau_{};
};

/// Classical RK4 by the method of steps. tau/h must be an integer; the grid
/// extends to the first node at or beyond T.
[[nodiscard]] SolutionTable integrate(const LinearDelaySystem& sys, const History& history,
                                      Complex x0, double T, double h);

/// Zero history, x(0) = (-1)^{m+1} sqrt(m!) b_tilde.
[[nodiscard]] SolutionTable fundamental_solution(const LinearDelaySystem& sys, int m, double T,
                                                 double h);

[[nodiscard]] SolutionTable basis_solution(const LinearDelaySystem& sys, int k, double T, double h);

[[nodiscard]] double fundamental_jump(const LinearDelaySystem& sys, int m);

/// h = tau / n with n = round(tau / h_target) rounded up to a multiple of `multiple`.
[[nodiscard]] int delay_nodes(double tau, double h_target, int multiple = 2);

}  // namespace cfreq
