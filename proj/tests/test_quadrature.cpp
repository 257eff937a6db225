#include "cfreq/quadrature.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace cfreq;

namespace {

double cubic(double t) { return 0.3 - 1.1 * t + 0.7 * t * t - 0.25 * t * t * t; }
double cubic_d(double t) { return -1.1 + 1.4 * t - 0.75 * t * t; }
double cubic_int(double a, double b) {
    auto F = [](double t) { return 0.3 * t - 0.55 * t * t + 0.7 / 3 * t * t * t - 0.0625 * t * t * t * t; };
    return F(b) - F(a);
}

}  // namespace

TEST_CASE("segment rules are exact for cubics") {
    const double h = 0.1;
    for (int s = 0; s < 4; ++s)
        for (int len = 1; len <= 9; ++len) {
            std::vector<double> w(static_cast<std::size_t>(s + len) + 1, 0.0);
            add_segment_rule(s, s + len, h, w.data());
            double sum = 0.0;
            for (int i = s; i <= s + len; ++i) sum += w[i] * cubic(i * h);
            if (len == 1) sum += h * h / 12.0 * (cubic_d(s * h) - cubic_d((s + 1) * h));
            CHECK(sum == Catch::Approx(cubic_int(s * h, (s + len) * h)).epsilon(1e-13));
        }
}

TEST_CASE("piecewise rules with random splits integrate cubics exactly") {
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> D(-3, 45);
    const double h = 0.05;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> splits;
        for (int k = 0; k < 6; ++k) splits.push_back(D(rng));
        const int n = 40;
        const PiecewiseRule rule = piecewise_rule(n, splits, h);
        double sum = 0.0;
        for (int i = 0; i <= n; ++i) sum += rule.weights[i] * cubic(i * h);
        for (int u : rule.unit_starts) sum += rule.unit_slope_weight * (cubic_d(u * h) - cubic_d((u + 1) * h));
        CHECK(sum == Catch::Approx(cubic_int(0.0, n * h)).epsilon(1e-13));
        CHECK(rule.ends.back() == n);
        CHECK(std::is_sorted(rule.ends.begin(), rule.ends.end()));
    }
}

TEST_CASE("end weights identify segment ends") {
    const PiecewiseRule r = piecewise_rule(10, {3, 3, 7, 0, 12}, 1.0);
    CHECK(r.ends == std::vector<int>{3, 7, 10});
    CHECK(r.end_weight(3) == Catch::Approx(3.0 / 8.0));
    CHECK(r.end_weight(7) == Catch::Approx(1.0 / 3.0));
    CHECK(r.end_weight(5) == 0.0);
    const PiecewiseRule u = piecewise_rule(4, {1}, 1.0);
    CHECK(u.unit_starts == std::vector<int>{0});
    CHECK(u.end_weight(1) == Catch::Approx(0.5));
}
