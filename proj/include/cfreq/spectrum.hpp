#pragma once

#include "cfreq/dde.hpp"

#include <optional>
#include <vector>

namespace cfreq {

struct SearchBox {
    double re_min = -5.0;
    double re_max = 1.0;
    double im_max = 20.0;

    [[nodiscard]] bool contains(Complex p) const {
        return p.real() >= re_min && p.real() <= re_max && std::abs(p.imag()) <= im_max;
    }
};

struct Spectrum {
    /// Sorted: descending Re, then ascending |Im|, then Im >= 0 first.
    std::vector<Complex> roots;
    SearchBox search_box;
    int verified_count = 0;
    /// Any root outside search_box has real part below this value.
    double outside_re_bound = 0.0;
    /// Number of leading roots proven to be the true leading roots.
    int certified_count = 0;
    /// True when the box provably holds every root (a1 == 0).
    bool encloses_all = false;
};

/// a0 + a1 e^{-p tau} - p
[[nodiscard]] Complex characteristic_value(const LinearDelaySystem& sys, Complex p);
[[nodiscard]] Complex characteristic_derivative(const LinearDelaySystem& sys, Complex p);

[[nodiscard]] SearchBox default_box(const LinearDelaySystem& sys);

/// Winding number of the characteristic function along the box boundary.
[[nodiscard]] int count_roots_in(const LinearDelaySystem& sys, const SearchBox& box);

/// Newton from a seed lattice, audited by count_roots_in. The box is enlarged
/// (when none is given) until the first `count` roots are certified.
[[nodiscard]] Spectrum leading_roots(const LinearDelaySystem& sys, int count,
                                     std::optional<SearchBox> box = std::nullopt);

/// Sum of the m leading real parts; -infinity if fewer than m roots exist at all.
[[nodiscard]] double compound_spectral_bound(const Spectrum& spec, int m);

}  // namespace cfreq
