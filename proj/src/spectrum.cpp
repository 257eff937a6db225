#include "cfreq/spectrum.hpp"

#include "cfreq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cfreq {

Complex characteristic_value(const LinearDelaySystem& sys, Complex p) {
    return sys.a0 + sys.a1 * std::exp(-p * sys.tau) - p;
}

Complex characteristic_derivative(const LinearDelaySystem& sys, Complex p) {
    return -sys.a1 * sys.tau * std::exp(-p * sys.tau) - 1.0;
}

SearchBox default_box(const LinearDelaySystem& sys) {
    SearchBox box;
    const double spread = std::abs(sys.a0) + std::abs(sys.a1);
    box.re_min = -(spread + 5.0);
    box.re_max = std::max(0.0, sys.a0 + std::abs(sys.a1)) + 1.0;
    box.im_max = std::max(20.0, 4.0 * std::numbers::pi / sys.tau);
    return box;
}

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonIters = 100;
constexpr double kDedupe = 1e-8;
constexpr double kAcceptResidual = 1e-10;

double residual_scale(Complex p) { return 1.0 + std::abs(p); }

std::optional<Complex> newton(const LinearDelaySystem& sys, Complex p, const SearchBox& box) {
    const double re_floor = box.re_min - 10.0;
    const double im_ceiling = 4.0 * box.im_max + 10.0;
    for (int it = 0; it < kNewtonIters; ++it) {
        const Complex hv = characteristic_value(sys, p);
        if (std::abs(hv) < kNewtonTol * residual_scale(p)) break;
        const Complex dv = characteristic_derivative(sys, p);
        if (std::abs(dv) == 0.0) return std::nullopt;
        const Complex step = hv / dv;
        p -= step;
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) return std::nullopt;
        if (p.real() < re_floor || std::abs(p.imag()) > im_ceiling) return std::nullopt;
        if (std::abs(step) < 1e-15 * residual_scale(p)) break;
    }
    // real roots reached from complex seeds: finish on the real axis
    if (std::abs(p.imag()) < 1e-9 * residual_scale(p)) {
        double x = p.real();
        for (int it = 0; it < kNewtonIters; ++it) {
            const double e = std::exp(-x * sys.tau);
            const double hv = sys.a0 + sys.a1 * e - x;
            const double dv = -sys.a1 * sys.tau * e - 1.0;
            if (dv == 0.0) break;
            const double step = hv / dv;
            x -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
        }
        p = Complex(x, 0.0);
    }
    if (std::abs(characteristic_value(sys, p)) >= kAcceptResidual * residual_scale(p)) return std::nullopt;
    return p;
}

void insert_unique(std::vector<Complex>& roots, Complex p) {
    for (const Complex& r : roots)
        if (std::abs(r - p) < kDedupe * residual_scale(p)) return;
    roots.push_back(p);
}

std::vector<Complex> newton_scan(const LinearDelaySystem& sys, const SearchBox& box, double refine) {
    std::vector<Complex> roots;
    const double re_step = 0.5 * refine;
    const double im_step = std::min(1.0, std::numbers::pi / sys.tau) * refine;
    const int n_re = static_cast<int>(std::ceil((box.re_max - box.re_min) / re_step));
    const int n_im = static_cast<int>(std::ceil(box.im_max / im_step));
    for (int a = 0; a <= n_re; ++a) {
        const double re = std::min(box.re_min + a * re_step, box.re_max);
        for (int b = 0; b <= n_im; ++b) {
            const double im = std::min(b * im_step, box.im_max);
            const auto root = newton(sys, Complex(re, im), box);
            if (!root || !box.contains(*root)) continue;
            insert_unique(roots, *root);
            if (root->imag() != 0.0) insert_unique(roots, std::conj(*root));
        }
    }
    return roots;
}

bool root_order(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    const double ia = std::abs(a.imag());
    const double ib = std::abs(b.imag());
    if (ia != ib) return ia < ib;
    return a.imag() > b.imag();
}

double edge_phase(const LinearDelaySystem& sys, Complex za, Complex ha, Complex zb, Complex hb,
                  int depth) {
    const double d = std::arg(hb / ha);
    if (std::abs(d) < 0.5 * std::numbers::pi) return d;
    if (depth > 48) fail(ErrorKind::Verification, "argument principle: edge refinement did not resolve the phase");
    const Complex zm = 0.5 * (za + zb);
    const Complex hm = characteristic_value(sys, zm);
    if (std::abs(hm) < 1e-8) fail(ErrorKind::Boundary, "characteristic function vanishes on the search box boundary");
    return edge_phase(sys, za, ha, zm, hm, depth + 1) + edge_phase(sys, zm, hm, zb, hb, depth + 1);
}

}  // namespace

int count_roots_in(const LinearDelaySystem& sys, const SearchBox& box) {
    sys.validate();
    if (!(box.re_min < box.re_max) || !(box.im_max > 0.0))
        fail(ErrorKind::Domain, "count_roots_in: degenerate search box");
    const Complex corners[4] = {
        {box.re_min, -box.im_max},
        {box.re_max, -box.im_max},
        {box.re_max, box.im_max},
        {box.re_min, box.im_max},
    };
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const Complex za = corners[e];
        const Complex zb = corners[(e + 1) % 4];
        // the delay term turns at rate tau along vertical edges; keep each step well under pi
        const double step = std::min(0.05, 0.25 / sys.tau);
        const int pieces = std::max(8, static_cast<int>(std::ceil(std::abs(zb - za) / step)));
        Complex z_prev = za;
        Complex h_prev = characteristic_value(sys, za);
        if (std::abs(h_prev) < 1e-8) fail(ErrorKind::Boundary, "characteristic function vanishes on the search box boundary");
        for (int i = 1; i <= pieces; ++i) {
            const Complex z = (i == pieces) ? zb : za + (zb - za) * (static_cast<double>(i) / pieces);
            const Complex hz = characteristic_value(sys, z);
            if (std::abs(hz) < 1e-8) fail(ErrorKind::Boundary, "characteristic function vanishes on the search box boundary");
            total += edge_phase(sys, z_prev, h_prev, z, hz, 0);
            z_prev = z;
            h_prev = hz;
        }
    }
    const double turns = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.1)
        fail(ErrorKind::Verification, "argument principle: non-integer winding number");
    return static_cast<int>(rounded);
}

namespace {

Spectrum scan_box(const LinearDelaySystem& sys, SearchBox box) {
    int verified = 0;
    bool counted = false;
    for (int attempt = 0; attempt < 5 && !counted; ++attempt) {
        try {
            verified = count_roots_in(sys, box);
            counted = true;
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::Boundary || attempt == 4) throw;
            const double bump = 0.0137 * (attempt + 1);
            box.re_min -= bump;
            box.re_max += bump;
            box.im_max += bump;
        }
    }
    std::vector<Complex> roots = newton_scan(sys, box, 1.0);
    if (static_cast<int>(roots.size()) != verified) {
        for (double refine : {0.5, 0.25}) {
            for (Complex r : newton_scan(sys, box, refine)) insert_unique(roots, r);
            if (static_cast<int>(roots.size()) >= verified) break;
        }
    }
    if (static_cast<int>(roots.size()) < verified) {
        std::sort(roots.begin(), roots.end(), root_order);
        std::ostringstream msg;
        msg << "Newton found " << roots.size() << " roots but the argument principle counts " << verified;
        throw IncompleteSpectrumError(msg.str(), roots);
    }
    if (static_cast<int>(roots.size()) != verified) {
        std::ostringstream msg;
        msg << "Newton found " << roots.size() << " roots but the argument principle counts " << verified;
        fail(ErrorKind::Verification, msg.str());
    }
    std::sort(roots.begin(), roots.end(), root_order);

    Spectrum spec;
    spec.roots = std::move(roots);
    spec.search_box = box;
    spec.verified_count = verified;
    spec.encloses_all = sys.a1 == 0.0;
    if (sys.a1 == 0.0) {
        spec.outside_re_bound = -std::numeric_limits<double>::infinity();
    } else {
        const double im_bound = -std::log(box.im_max / std::abs(sys.a1)) / sys.tau;
        spec.outside_re_bound = std::max(box.re_min, im_bound);
    }
    int certified = 0;
    for (const Complex& r : spec.roots) {
        if (r.real() > spec.outside_re_bound) ++certified;
        else break;
    }
    spec.certified_count = certified;
    return spec;
}

}  // namespace

Spectrum leading_roots(const LinearDelaySystem& sys, int count, std::optional<SearchBox> box) {
    sys.validate();
    if (count < 1) fail(ErrorKind::Domain, "leading_roots: count must be >= 1");
    const bool auto_box = !box.has_value();
    SearchBox b = box.value_or(default_box(sys));
    Spectrum spec = scan_box(sys, b);
    for (int grow = 0; auto_box && grow < 6; ++grow) {
        if (spec.encloses_all || spec.certified_count >= count) break;
        b.im_max *= 2.0;
        b.re_min -= 2.0;
        spec = scan_box(sys, b);
    }
    if (static_cast<int>(spec.roots.size()) < count && !spec.encloses_all) {
        std::ostringstream msg;
        msg << "only " << spec.roots.size() << " of " << count << " requested roots found";
        throw IncompleteSpectrumError(msg.str(), spec.roots);
    }
    return spec;
}

double compound_spectral_bound(const Spectrum& spec, int m) {
    if (m < 1) fail(ErrorKind::Domain, "compound order m must be >= 1");
    const int found = static_cast<int>(spec.roots.size());
    if (found >= m && (spec.encloses_all || spec.certified_count >= m)) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) sum += spec.roots[j].real();
        return sum;
    }
    if (spec.encloses_all) return -std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "spectral bound for m = " << m << " needs " << m << " certified leading roots, have "
        << spec.certified_count;
    fail(ErrorKind::InsufficientSpectrum, msg.str());
}

}  // namespace cfreq
