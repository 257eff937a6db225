#pragma once

#include <vector>

namespace cfreq {

/// Adds a composite rule for nodes s..e (spacing h) into w[s..e].
/// Simpson panels start on even indices; an odd end gets a 3/8 piece, a
/// single interval gets the trapezoid rule (see PiecewiseRule::unit_starts for
/// its end correction). Returns the weight this segment puts on node e.
double add_segment_rule(int s, int e, double h, double* w);

/// Weights on nodes 0..n for a rule split into independent segments.
struct PiecewiseRule {
    std::vector<double> weights;
    /// Right ends of the segments (interior splits and n), ascending.
    std::vector<int> ends;
    /// Weight each right end receives from the segment to its left.
    std::vector<double> end_weights;
    /// Starts s of single-interval segments [s, s+1]. Users add
    /// unit_slope_weight * (f'(s+) - f'((s+1)-)) to keep fourth order there.
    std::vector<int> unit_starts;
    double unit_slope_weight = 0.0;

    /// End weight at node b, or 0 when b is not a segment end.
    [[nodiscard]] double end_weight(int b) const;
};

/// Splits outside (0, n) are ignored; duplicates are merged.
[[nodiscard]] PiecewiseRule piecewise_rule(int n, std::vector<int> splits, double h);

}  // namespace cfreq
