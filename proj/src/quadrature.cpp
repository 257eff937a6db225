#include "cfreq/quadrature.hpp"

#include "cfreq/error.hpp"

#include <algorithm>

namespace cfreq {

namespace {

void simpson_run(int a, int b, double h, double* w) {
    const double third = h / 3.0;
    for (int i = a; i < b; i += 2) {
        w[i] += third;
        w[i + 1] += 4.0 * third;
        w[i + 2] += third;
    }
}

void three_eighths(int a, double h, double* w) {
    const double c = 3.0 * h / 8.0;
    w[a] += c;
    w[a + 1] += 3.0 * c;
    w[a + 2] += 3.0 * c;
    w[a + 3] += c;
}

bool odd(int i) { return (i & 1) != 0; }

}  // namespace

double add_segment_rule(int s, int e, double h, double* w) {
    const int len = e - s;
    if (len <= 0) return 0.0;
    if (len == 1) {
        w[s] += 0.5 * h;
        w[e] += 0.5 * h;
        return 0.5 * h;
    }
    if (len == 2 || (len == 4 && odd(s))) {
        simpson_run(s, e, h, w);
        return h / 3.0;
    }
    if (len == 3) {
        three_eighths(s, h, w);
        return 3.0 * h / 8.0;
    }
    const int s2 = odd(s) ? s + 3 : s;
    const int e2 = odd(e) ? e - 3 : e;
    if (odd(s)) three_eighths(s, h, w);
    if (odd(e)) three_eighths(e - 3, h, w);
    simpson_run(s2, e2, h, w);
    return odd(e) ? 3.0 * h / 8.0 : h / 3.0;
}

double PiecewiseRule::end_weight(int b) const {
    const auto it = std::lower_bound(ends.begin(), ends.end(), b);
    if (it == ends.end() || *it != b) return 0.0;
    return end_weights[static_cast<std::size_t>(it - ends.begin())];
}

PiecewiseRule piecewise_rule(int n, std::vector<int> splits, double h) {
    if (n < 1) fail(ErrorKind::Configuration, "quadrature: need at least one interval");
    splits.erase(std::remove_if(splits.begin(), splits.end(), [n](int b) { return b <= 0 || b >= n; }),
                 splits.end());
    splits.push_back(n);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

    PiecewiseRule rule;
    rule.weights.assign(static_cast<std::size_t>(n) + 1, 0.0);
    rule.ends = splits;
    rule.end_weights.reserve(splits.size());
    rule.unit_slope_weight = h * h / 12.0;
    int start = 0;
    for (int b : splits) {
        if (b - start == 1) rule.unit_starts.push_back(start);
        rule.end_weights.push_back(add_segment_rule(start, b, h, rule.weights.data()));
        start = b;
    }
    return rule;
}

}  // namespace cfreq
