#include "cfreq/error.hpp"
#include "cfreq/spectrum.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace cfreq;

namespace {

LinearDelaySystem sys_of(double a0, double a1, double tau) {
    LinearDelaySystem s;
    s.a0 = a0;
    s.a1 = a1;
    s.tau = tau;
    return s;
}

/// Principal branch of Lambert W on (-1/e, 0] by Newton.
double lambert_w0(double x) {
    double w = x < -0.25 ? -0.5 : x;
    for (int i = 0; i < 100; ++i) w -= (w * std::exp(w) - x) / (std::exp(w) * (1.0 + w));
    return w;
}

bool near(Complex a, Complex b, double tol) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("preset spectra: leading pairs and residuals") {
    // Suarez-Schopf, alpha = 0.6, tau = 0.83, radius from the lemma (Lambda = 0.798582)
    const double lam = 1.5 * 0.729649 * 0.729649;
    const Spectrum ss = leading_roots(sys_of(1.0 - lam, -0.6, 0.83), 2);
    REQUIRE(ss.roots.size() >= 2);
    CHECK(near(ss.roots[0], Complex(-0.89, 0.63), 0.01));
    CHECK(near(ss.roots[1], Complex(-0.89, -0.63), 0.01));
    // Mackey-Glass, tau = 4.5 normalized
    const auto mg = sys_of(-0.45, -0.46125, 1.0);
    const Spectrum sp = leading_roots(mg, 2);
    CHECK(near(sp.roots[0], Complex(-0.99, 1.12), 0.01));
    CHECK(near(sp.roots[1], Complex(-0.99, -1.12), 0.01));
    for (const auto& r : sp.roots) CHECK(std::abs(characteristic_value(mg, r)) < 1e-10);
    CHECK(sp.certified_count >= 2);
}

TEST_CASE("pure delay: leading root is Lambert W") {
    for (double a1 : {-0.2, -0.3, 0.5, 1.5}) {
        const double tau = 1.0;
        const Spectrum sp = leading_roots(sys_of(0.0, a1, tau), 1);
        CHECK(near(sp.roots[0], Complex(lambert_w0(a1 * tau) / tau, 0.0), 1e-10));
    }
}

TEST_CASE("no delay coupling: single root, every root enclosed") {
    const Spectrum sp = leading_roots(sys_of(-0.8, 0.0, 1.0), 1);
    REQUIRE(sp.roots.size() == 1);
    CHECK(sp.roots[0] == Complex(-0.8, 0.0));
    CHECK(sp.encloses_all);
    CHECK(compound_spectral_bound(sp, 1) == Catch::Approx(-0.8));
    CHECK(compound_spectral_bound(sp, 2) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("spectral bound sums the leading real parts") {
    const auto s = sys_of(-0.45, -0.46125, 1.0);
    const Spectrum sp = leading_roots(s, 3);
    CHECK(compound_spectral_bound(sp, 2) == Catch::Approx(2.0 * sp.roots[0].real()));
    CHECK(compound_spectral_bound(sp, 3) == Catch::Approx(2.0 * sp.roots[0].real() + sp.roots[2].real()));
}

TEST_CASE("derivative matches central differences") {
    const auto s = sys_of(-0.3, 0.9, 1.7);
    for (Complex p : {Complex(0.1, 0.2), Complex(-1.0, 3.0), Complex(-2.0, -7.5)}) {
        const double d = 1e-6;
        const Complex fd = (characteristic_value(s, p + d) - characteristic_value(s, p - d)) / (2 * d);
        CHECK(std::abs(fd - characteristic_derivative(s, p)) < 1e-7);
    }
}

TEST_CASE("argument principle agrees with Newton on random systems") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = sys_of(2.0 * U(rng), 2.0 * U(rng), 0.3 + 1.5 * (U(rng) + 1.0));
        const Spectrum sp = leading_roots(s, 2);
        int inside = 0;
        for (const auto& r : sp.roots) {
            if (sp.search_box.contains(r)) ++inside;
            CHECK(std::abs(characteristic_value(s, r)) < 1e-10);
        }
        CHECK(count_roots_in(s, sp.search_box) == inside);
        // sorted: descending real part, conjugates paired
        for (std::size_t i = 1; i < sp.roots.size(); ++i) CHECK(sp.roots[i - 1].real() >= sp.roots[i].real() - 1e-12);
        for (const auto& r : sp.roots) {
            if (r.imag() == 0.0) continue;
            bool has_conj = false;
            for (const auto& q : sp.roots) has_conj = has_conj || q == std::conj(r);
            CHECK(has_conj);
        }
    }
}

TEST_CASE("default box keeps the rightmost roots") {
    const auto s = sys_of(-3.0, 2.5, 0.2);
    const SearchBox box = default_box(s);
    const Spectrum sp = leading_roots(s, 1);
    CHECK(box.contains(sp.roots[0]));
    CHECK(box.im_max >= 20.0);
}
