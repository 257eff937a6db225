#include "cfreq/models.hpp"

#include "cfreq/error.hpp"
#include "cfreq/spectrum.hpp"

#include <cmath>
#include <sstream>

namespace cfreq {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0, 1)");
}

void check_mg(const MackeyGlassParams& p) {
    if (!(p.gamma > 0.0) || !(p.beta > 0.0)) fail(ErrorKind::Domain, "gamma and beta must be positive");
    if (!(p.beta > p.gamma)) fail(ErrorKind::Domain, "beta must exceed gamma");
    if (!(p.kappa > 1.0)) fail(ErrorKind::Domain, "kappa must exceed 1");
    if (!(p.tau > 0.0)) fail(ErrorKind::Domain, "tau must be positive");
}

double leading_real_part(double gamma, double b, double tau) {
    LinearDelaySystem sys;
    sys.a0 = -gamma;
    sys.a1 = b;
    sys.tau = tau;
    const Spectrum spec = leading_roots(sys, 1);
    return spec.roots.front().real();
}

}  // namespace

LinearDelaySystem suarez_schopf_system(const SuarezSchopfParams& p) {
    check_alpha(p.alpha);
    if (!(p.R > 0.0)) fail(ErrorKind::Domain, "radius R must be positive");
    if (!(p.tau > 0.0)) fail(ErrorKind::Domain, "tau must be positive");
    const double lam = 1.5 * p.R * p.R;
    LinearDelaySystem sys;
    sys.a0 = 1.0 - lam;
    sys.a1 = -p.alpha;
    sys.tau = p.tau;
    sys.tau0 = 0.0;
    sys.b_tilde = -1.0;
    sys.lambda_bound = lam;
    sys.constraint_kind = ConstraintKind::NormBound;
    return sys;
}

double ss_radius_constant(double alpha, double tau, RadiusCoefficient coef) {
    const double c = coef == RadiusCoefficient::Reported ? 2.0 / 3.0 : 4.0 / 3.0;
    const double at = alpha * tau;
    return at / (1.0 - at) * c * (1.0 - alpha) * std::sqrt((1.0 - alpha) / 3.0);
}

double ss_attractor_radius(double alpha, double tau, RadiusCoefficient coef) {
    check_alpha(alpha);
    if (!(tau > 0.0)) fail(ErrorKind::Domain, "tau must be positive");
    if (!(2.0 * alpha * tau < 1.0)) {
        std::ostringstream msg;
        msg << "radius lemma needs 2 alpha tau < 1 (got " << 2.0 * alpha * tau << ")";
        fail(ErrorKind::Precondition, msg.str());
    }
    const double C = ss_radius_constant(alpha, tau, coef);
    auto cubic = [&](double r) { return -r * r * r + (1.0 - alpha) * r + C; };
    double lo = std::sqrt(1.0 - alpha);
    double hi = std::sqrt(1.0 + alpha);
    // sqrt(1 + alpha) bounds the root only for alpha above ~0.233; C > 0 keeps a unique positive root
    for (int grow = 0; grow < 64 && std::isfinite(hi) && !(cubic(hi) < 0.0); ++grow) hi *= 2.0;
    if (!(cubic(lo) >= 0.0) || !(cubic(hi) < 0.0)) fail(ErrorKind::Bracket, "radius cubic has no sign change on the bracket");
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (cubic(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ss_sum_region_bound(double alpha) {
    check_alpha(alpha);
    const double s = std::sqrt(1.0 - alpha * alpha);
    return std::log((1.0 + s) / alpha) / s;
}

double mg_sector_bound(const MackeyGlassParams& p) {
    const double k = p.kappa;
    return 0.5 * p.tau * p.beta * ((k - 1.0) * (k - 1.0) / (4.0 * k) + 1.0);
}

LinearDelaySystem mackey_glass_system(const MackeyGlassParams& p, double lambda_override) {
    check_mg(p);
    const double lam = lambda_override > 0.0 ? lambda_override : mg_sector_bound(p);
    LinearDelaySystem sys;
    sys.a0 = -p.tau * p.gamma;
    sys.a1 = p.tau * p.beta - lam;
    sys.tau = 1.0;
    sys.tau0 = 1.0;
    sys.b_tilde = 1.0;
    sys.lambda_bound = lam;
    sys.constraint_kind = ConstraintKind::NormBound;
    return sys;
}

double mg_equilibrium_slope(double gamma, double beta, double kappa) {
    if (!(gamma > 0.0) || !(beta > gamma)) fail(ErrorKind::Domain, "need beta > gamma > 0");
    const double r = beta / gamma;
    return (1.0 + (1.0 - kappa) * (r - 1.0)) / (r * r);
}

double mg_paper_tau0() {
    return std::acos(-0.25) / (0.4 * (1.0 - 1.0 / 16.0));
}

double hopf_crossing_delay(double gamma, double b) {
    if (!(b < -gamma)) fail(ErrorKind::Domain, "a crossing needs b < -gamma");
    const double step = 0.25;
    const double tau_max = 100.0;
    double lo = 0.0;
    double hi = 0.0;
    bool found = false;
    for (double t = step; t <= tau_max + 1e-12; t += step) {
        if (leading_real_part(gamma, b, t) > 0.0) {
            hi = t;
            found = true;
            break;
        }
        lo = t;
    }
    if (!found) fail(ErrorKind::NotFound, "no stability switch for tau up to 100");
    if (lo == 0.0) lo = 1e-6;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (leading_real_part(gamma, b, mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double mg_hopf_crossing_delay(double gamma, double beta, double kappa) {
    return hopf_crossing_delay(gamma, beta * mg_equilibrium_slope(gamma, beta, kappa));
}

}  // namespace cfreq
