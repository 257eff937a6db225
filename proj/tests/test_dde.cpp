#include "cfreq/dde.hpp"
#include "cfreq/error.hpp"

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <numbers>

using namespace cfreq;

namespace {

LinearDelaySystem sys_of(double a0, double a1, double tau, double tau0 = 0.0, double b = 1.0) {
    LinearDelaySystem s;
    s.a0 = a0;
    s.a1 = a1;
    s.tau = tau;
    s.tau0 = tau0;
    s.b_tilde = b;
    return s;
}

/// x' = a1 x(t - tau), history phi_k, on [0, 2 tau], by direct integration of the steps.
Complex pure_delay_basis(double a1, double tau, int k, double t) {
    const double r = 1.0 / std::sqrt(tau);
    const double w = 2.0 * std::numbers::pi * k / tau;
    const Complex iw(0.0, w);
    auto seg1 = [&](double u) {  // u in [0, tau]
        return r * (1.0 + a1 * (std::exp(iw * (u - tau)) - std::exp(-iw * tau)) / iw);
    };
    if (t <= tau) return seg1(t);
    const double v = t - tau;
    const Complex integral =
        r * (v + a1 * ((std::exp(iw * (v - tau)) - std::exp(-iw * tau)) / (iw * iw) - std::exp(-iw * tau) * v / iw));
    return seg1(tau) + a1 * integral;
}

}  // namespace

TEST_CASE("basis functions are orthonormal and conjugate-symmetric") {
    const double tau = 0.83;
    for (int k = -3; k <= 3; ++k)
        for (double th : {-0.83, -0.5, -0.1234, 0.0}) CHECK(basis_function(tau, -k, th) == std::conj(basis_function(tau, k, th)));
    // midpoint sum over one period is exact for trigonometric polynomials of low degree
    const int M = 64;
    for (int k = -2; k <= 2; ++k)
        for (int l = -2; l <= 2; ++l) {
            Complex ip = 0.0;
            for (int j = 0; j < M; ++j) {
                const double th = -tau + (j + 0.5) * tau / M;
                ip += basis_function(tau, k, th) * std::conj(basis_function(tau, l, th)) * (tau / M);
            }
            CHECK(std::abs(ip - (k == l ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("a1 = 0 reduces to the scalar exponential") {
    const LinearDelaySystem s = sys_of(-0.7, 0.0, 1.0);
    const auto tab = basis_solution(s, 2, 5.0, 1e-3);
    const double r = 1.0;
    for (int q : {0, 1, 500, 1000, 3333, 5000}) CHECK(std::abs(tab.value(q) - r * std::exp(-0.7 * tab.t(q))) < 1e-12);
    // history part is the basis function itself
    for (int q : {-1000, -317, -1}) CHECK(tab.value(q) == basis_function(1.0, 2, tab.t(q)));
}

TEST_CASE("pure delay: first two steps match the closed form, fourth order") {
    const double tau = 1.0, a1 = -0.7;
    const LinearDelaySystem s = sys_of(0.0, a1, tau);
    double err[2];
    int pass = 0;
    for (double h : {tau / 20, tau / 40}) {
        const auto tab = basis_solution(s, 1, 2.0 * tau, h);
        double e = 0.0;
        for (int q = 0; q <= tab.last_node(); ++q) e = std::max(e, std::abs(tab.value(q) - pure_delay_basis(a1, tau, 1, tab.t(q))));
        err[pass++] = e;
    }
    CHECK(err[1] < 1e-7);
    const double ratio = err[0] / err[1];
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);

    const auto fine = basis_solution(s, -2, 2.0 * tau, 1e-3);
    for (double t : {0.0005, 0.4, 1.0, 1.2345, 1.999})
        CHECK(std::abs(fine.eval(t) - pure_delay_basis(a1, tau, -2, t)) < 1e-9);
}

TEST_CASE("basis solutions are exact conjugates of each other") {
    const LinearDelaySystem s = sys_of(-0.45, -0.46125, 1.0, 1.0);
    for (int k : {1, 4, 30}) {
        const auto p = basis_solution(s, k, 6.0, 1e-3);
        const auto m = basis_solution(s, -k, 6.0, 1e-3);
        bool exact = true;
        for (int q = -p.nodes_per_delay(); q <= p.last_node(); ++q) exact = exact && (m.value(q) == std::conj(p.value(q)));
        CHECK(exact);
    }
    const auto z = basis_solution(s, 0, 3.0, 1e-3);
    bool real = true;
    for (int q = -z.nodes_per_delay(); q <= z.last_node(); ++q) real = real && z.value(q).imag() == 0.0;
    CHECK(real);
}

TEST_CASE("fundamental solution: scaled jump at zero, zero history") {
    const LinearDelaySystem s = sys_of(-1.0, 0.4, 1.0, 0.0, -1.0);
    CHECK(fundamental_jump(s, 1) == Catch::Approx(-1.0));
    CHECK(fundamental_jump(s, 2) == Catch::Approx(std::sqrt(2.0)));
    CHECK(fundamental_jump(s, 3) == Catch::Approx(-std::sqrt(6.0)));
    const auto f = fundamental_solution(s, 2, 3.0, 1e-2);
    CHECK(f.label().kind == SolutionLabel::Kind::Fundamental);
    CHECK(f.value_left(0) == Complex(0.0));
    CHECK(f.value(0) == Complex(std::sqrt(2.0)));
    CHECK(f.value(-5) == Complex(0.0));
    // on [0, tau] the delayed term sees zero history: pure exponential
    for (int q : {1, 50, 100}) CHECK(std::abs(f.value(q) - std::sqrt(2.0) * std::exp(-f.t(q))) < 1e-9);
    CHECK(f.eval(0.0) == f.value(0));
}

TEST_CASE("grid helpers and argument checks") {
    CHECK(delay_nodes(0.83, 1e-3, 2) == 830);
    CHECK(delay_nodes(0.83, 1e-3, 4) == 832);
    CHECK(delay_nodes(1.0, 1e-3, 40) == 1000);
    const LinearDelaySystem s = sys_of(-1.0, 0.4, 1.0);
    CHECK_THROWS_AS(basis_solution(s, 0, 2.0, 0.0013), Error);
    CHECK_THROWS_AS(basis_solution(s, 0, -1.0, 0.01), Error);
    LinearDelaySystem bad = s;
    bad.tau0 = 2.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    try {
        basis_solution(s, 0, -1.0, 0.01);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
    const auto tab = basis_solution(s, 0, 2.0, 0.25);
    CHECK(tab.last_node() == 8);
    CHECK(tab.breakpoints().size() == 3);
}

TEST_CASE("solution table CSV dump") {
    const LinearDelaySystem s = sys_of(-1.0, 0.4, 1.0);
    const auto tab = basis_solution(s, 1, 1.0, 0.25);
    const std::string path = "dde_dump_test.csv";
    tab.write_csv(path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,re,im");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 9);
    std::remove(path.c_str());
}
