#pragma once

#include "cfreq/dde.hpp"

namespace cfreq {

/// Constant in front of the radius-lemma term C(alpha, tau).
///   Reported: 2/3, gives leading roots -0.89 +- 0.63i at alpha = 0.6, tau = 0.83.
///   Printed:  4/3, the constant in the lemma's statement.
enum class RadiusCoefficient { Reported, Printed };

struct SuarezSchopfParams {
    double alpha = 0.6;
    double tau = 0.83;
    /// attractor-ball radius
    double R = 1.0;
};

struct MackeyGlassParams {
    double gamma = 0.1;
    double beta = 0.2;
    double kappa = 10.0;
    double tau = 4.5;
};

/// a0 = 1 - 3R^2/2, a1 = -alpha, tau0 = 0, b_tilde = -1, Lambda = 3R^2/2.
[[nodiscard]] LinearDelaySystem suarez_schopf_system(const SuarezSchopfParams& p);

[[nodiscard]] double ss_radius_constant(double alpha, double tau,
                                        RadiusCoefficient coef = RadiusCoefficient::Reported);

/// Positive root of -R^3 + (1 - alpha) R + C(alpha, tau), requires 2 alpha tau < 1.
[[nodiscard]] double ss_attractor_radius(double alpha, double tau,
                                         RadiusCoefficient coef = RadiusCoefficient::Reported);

/// log((1 + sqrt(1 - alpha^2)) / alpha) / sqrt(1 - alpha^2)
[[nodiscard]] double ss_sum_region_bound(double alpha);

/// Delay normalized to 1. lambda_override replaces the sector bound when > 0.
[[nodiscard]] LinearDelaySystem mackey_glass_system(const MackeyGlassParams& p, double lambda_override = 0.0);

/// tau beta ((kappa - 1)^2 / (4 kappa) + 1) / 2
[[nodiscard]] double mg_sector_bound(const MackeyGlassParams& p);

/// f'(y*) for f(y) = y / (1 + |y|^kappa) at the positive equilibrium.
[[nodiscard]] double mg_equilibrium_slope(double gamma, double beta, double kappa);

/// arccos(-1/4) / (0.4 (1 - 1/16)) evaluated verbatim; differs from mg_hopf_crossing_delay.
[[nodiscard]] double mg_paper_tau0();

/// First tau at which x' = -gamma x + b x(t - tau) has an imaginary root pair, by
/// tracking the leading root. Requires b < -gamma.
[[nodiscard]] double hopf_crossing_delay(double gamma, double b);

/// hopf_crossing_delay with b = beta f'(y*).
[[nodiscard]] double mg_hopf_crossing_delay(double gamma, double beta, double kappa);

}  // namespace cfreq
