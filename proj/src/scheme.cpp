#include "cfreq/scheme.hpp"

#include "cfreq/chirpz.hpp"
#include "cfreq/error.hpp"
#include "cfreq/parallel.hpp"
#include "cfreq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace cfreq {

namespace {

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

int mod_index(long long v, int n) {
    long long r = v % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

/// e^{i 2 pi r / n}, r = 0..n-1, with root[n - r] == conj(root[r]) exactly.
std::vector<Complex> unit_roots(int n) {
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    roots[0] = Complex(1.0, 0.0);
    for (int r = 1; 2 * r <= n; ++r) {
        const Complex v = std::polar(1.0, 2.0 * std::numbers::pi * r / n);
        roots[static_cast<std::size_t>(r)] = v;
        roots[static_cast<std::size_t>(n - r)] = std::conj(v);
    }
    if (n % 2 == 0) roots[static_cast<std::size_t>(n / 2)] = Complex(-1.0, 0.0);
    return roots;
}

/// Determinant of a row-major n x n matrix; destroys the input.
Complex det_small(std::vector<Complex>& a, int n) {
    if (n == 0) return 1.0;
    if (n == 1) return a[0];
    if (n == 2) return a[0] * a[3] - a[1] * a[2];
    Complex det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r * n + c)]) > std::abs(a[static_cast<std::size_t>(piv * n + c)])) piv = r;
        if (a[static_cast<std::size_t>(piv * n + c)] == Complex{}) return Complex{};
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(c * n + k)], a[static_cast<std::size_t>(piv * n + k)]);
            det = -det;
        }
        const Complex d = a[static_cast<std::size_t>(c * n + c)];
        det *= d;
        for (int r = c + 1; r < n; ++r) {
            const Complex f = a[static_cast<std::size_t>(r * n + c)] / d;
            for (int k = c; k < n; ++k) a[static_cast<std::size_t>(r * n + k)] -= f * a[static_cast<std::size_t>(c * n + k)];
        }
    }
    return det;
}

std::vector<int> vertical_splits(const Discretization& g) {
    std::vector<int> s;
    for (int k = 0; k <= 3; ++k) s.push_back(g.j0 + k * g.n);
    return s;
}

std::vector<double> theta_weights(const Discretization& g) {
    return piecewise_rule(g.J, {g.theta_j0()}, g.stride * g.h).weights;
}

void check_tables(const SolutionSet& S, const Discretization& g) {
    if (g.n_T > S.grid.n_T) fail(ErrorKind::Contract, "requested horizon exceeds the solution tables");
    if (g.n != S.grid.n || g.h != S.grid.h) fail(ErrorKind::Contract, "grid does not match the solution tables");
    if (static_cast<int>(S.basis.size()) != 2 * S.N + 1) fail(ErrorKind::Contract, "missing basis tables");
}

}  // namespace

Discretization resolve_grid(const LinearDelaySystem& sys, const SchemeConfig& cfg) {
    sys.validate();
    if (cfg.m < 1) fail(ErrorKind::Configuration, "compound order m must be >= 1");
    if (cfg.N < 0) fail(ErrorKind::Configuration, "basis cutoff N must be >= 0");
    if (!(cfg.T > 0.0)) fail(ErrorKind::Domain, "horizon T must be positive");
    if (!(cfg.h > 0.0)) fail(ErrorKind::Configuration, "step h must be positive");
    if (!(cfg.Omega > 0.0)) fail(ErrorKind::Configuration, "frequency range Omega must be positive");
    if (!(cfg.omega_step > 0.0)) fail(ErrorKind::Configuration, "omega step must be positive");
    if (cfg.theta_stride < 0) fail(ErrorKind::Configuration, "theta stride must be >= 1");
    if (cfg.m >= 3 && !cfg.experimental)
        fail(ErrorKind::Configuration, "compound order m >= 3 requires the experimental flag");

    Discretization g;
    g.m = cfg.m;
    g.tau = sys.tau;
    int stride = cfg.theta_stride;
    if (stride == 0) {
        if (cfg.m <= 2) {
            stride = 1;
        } else {
            const long n0 = std::max(1L, std::lround(sys.tau / cfg.h));
            stride = static_cast<int>(std::max(1L, (n0 + 19) / 20));
        }
    }
    g.stride = stride;
    g.n = delay_nodes(sys.tau, cfg.h, 2 * stride);
    g.h = sys.tau / g.n;
    g.J = g.n / stride;
    const double r0 = sys.tau0 / g.h;
    const long j0 = std::lround(r0);
    if (std::abs(r0 - static_cast<double>(j0)) > 1e-6 * std::max(1.0, r0)) {
        std::ostringstream msg;
        msg << "tau0 = " << sys.tau0 << " is not a multiple of the step h = " << g.h;
        fail(ErrorKind::Configuration, msg.str());
    }
    g.j0 = static_cast<int>(j0);
    if (g.j0 % stride != 0) fail(ErrorKind::Configuration, "tau0 does not lie on the theta grid; change theta_stride");
    g.n_T = std::max(2, 2 * static_cast<int>(std::lround(cfg.T / (2.0 * g.h))));
    return g;
}

Discretization with_horizon(const Discretization& g, double T) {
    if (!(T > 0.0)) fail(ErrorKind::Domain, "horizon T must be positive");
    Discretization out = g;
    out.n_T = std::max(2, 2 * static_cast<int>(std::lround(T / (2.0 * g.h))));
    return out;
}

const SolutionTable& SolutionSet::basis_k(int k) const {
    if (k < -N || k > N) {
        std::ostringstream msg;
        msg << "missing basis table for k = " << k << " (N = " << N << ")";
        fail(ErrorKind::Contract, msg.str());
    }
    return basis[static_cast<std::size_t>(k + N)];
}

SolutionSet integrate_solutions(const LinearDelaySystem& sys, const SchemeConfig& cfg, int threads) {
    SolutionSet S;
    S.grid = resolve_grid(sys, cfg);
    S.N = cfg.N;
    S.basis.resize(static_cast<std::size_t>(2 * cfg.N + 1));
    const double T = S.grid.T();
    const double h = S.grid.h;
    parallel_for(S.basis.size() + 1, threads, [&](std::size_t idx, int) {
        if (idx == S.basis.size()) {
            S.fundamental = fundamental_solution(sys, cfg.m, T, h);
        } else {
            S.basis[idx] = basis_solution(sys, static_cast<int>(idx) - cfg.N, T, h);
        }
    });
    return S;
}

std::vector<MultiIndex> multi_indices(int N, int len) {
    std::vector<MultiIndex> out;
    MultiIndex cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == len) {
            out.push_back(cur);
            return;
        }
        for (int k = start; k <= N; ++k) {
            cur.push_back(k);
            self(self, k + 1);
            cur.pop_back();
        }
    };
    if (len < 0) fail(ErrorKind::Domain, "multi-index length must be >= 0");
    rec(rec, -N);
    return out;
}

std::vector<int> nested_indices(int m, int N_sub, int N_full) {
    if (N_sub > N_full) fail(ErrorKind::Domain, "nested_indices: N_sub exceeds N_full");
    const auto full = multi_indices(N_full, m - 1);
    std::map<MultiIndex, int> pos;
    for (std::size_t i = 0; i < full.size(); ++i) pos[full[i]] = static_cast<int>(i);
    std::vector<int> out;
    for (const auto& K : multi_indices(N_sub, m - 1)) out.push_back(pos.at(K));
    return out;
}

Complex wedge_eval(const std::vector<const SolutionTable*>& tables, double t,
                   const std::vector<double>& thetas) {
    const int m = static_cast<int>(tables.size());
    if (m < 1 || static_cast<int>(thetas.size()) != m)
        fail(ErrorKind::Domain, "wedge_eval: need m tables and m arguments");
    std::vector<Complex> a(static_cast<std::size_t>(m * m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a[static_cast<std::size_t>(i * m + j)] = tables[static_cast<std::size_t>(i)]->eval(t + thetas[static_cast<std::size_t>(j)]);
    return det_small(a, m) / factorial(m);
}

namespace {

/// Direct evaluation of M^1 on the theta grid.
MeasurementKernel kernel_on(const SolutionSet& S, const Discretization& g, Complex p) {
    check_tables(S, g);
    const int m = g.m;
    const int dims = m - 1;
    MeasurementKernel mk;
    mk.m = m;
    mk.indices = multi_indices(S.N, dims);
    mk.theta.resize(static_cast<std::size_t>(g.J) + 1);
    for (int j = 0; j <= g.J; ++j) mk.theta[static_cast<std::size_t>(j)] = -static_cast<double>(j) * g.stride * g.h;
    std::size_t pts = 1;
    for (int r = 0; r < dims; ++r) pts *= static_cast<std::size_t>(g.J) + 1;
    mk.points = pts;
    mk.values.assign(mk.indices.size() * pts, Complex{});

    std::vector<Complex> E(static_cast<std::size_t>(g.n_T) + 1);
    for (int i = 0; i <= g.n_T; ++i) E[static_cast<std::size_t>(i)] = std::exp(-p * (i * g.h));

    const auto verticals = vertical_splits(g);
    const Complex* xf = S.fundamental.node_values();
    const Complex xf_left0 = S.fundamental.value_left(0);
    const double inv_fact = 1.0 / factorial(m);

    std::vector<int> jr(static_cast<std::size_t>(dims));
    std::vector<int> offsets(static_cast<std::size_t>(m));
    std::vector<const Complex*> rows(static_cast<std::size_t>(m));
    std::vector<Complex> left0(static_cast<std::size_t>(m));
    std::vector<Complex> mat(static_cast<std::size_t>(m * m));
    std::vector<const SolutionTable*> row_tabs(static_cast<std::size_t>(m));

    for (std::size_t flat = 0; flat < pts; ++flat) {
        std::size_t rem = flat;
        for (int r = 0; r < dims; ++r) {
            jr[static_cast<std::size_t>(r)] = static_cast<int>(rem % (static_cast<std::size_t>(g.J) + 1));
            rem /= static_cast<std::size_t>(g.J) + 1;
        }
        std::vector<int> splits = verticals;
        offsets[0] = -g.j0;
        for (int r = 0; r < dims; ++r) {
            const int sh = jr[static_cast<std::size_t>(r)] * g.stride;
            offsets[static_cast<std::size_t>(r + 1)] = -sh;
            for (int k = 0; k <= 3; ++k) splits.push_back(k * g.n + sh);
        }
        const PiecewiseRule rule = piecewise_rule(g.n_T, splits, g.h);

        for (std::size_t K = 0; K < mk.indices.size(); ++K) {
            Complex sum{};
            if (m == 1) {
                for (int i = 0; i <= g.n_T; ++i) {
                    const int q = i - g.j0;
                    if (q < 0) continue;
                    sum += rule.weights[static_cast<std::size_t>(i)] * E[static_cast<std::size_t>(i)] * xf[q];
                }
                for (std::size_t e = 0; e < rule.ends.size(); ++e) {
                    const int b = rule.ends[e];
                    if (b - g.j0 == 0) sum += rule.end_weights[e] * E[static_cast<std::size_t>(b)] * (xf_left0 - xf[0]);
                }
            } else if (m == 2) {
                const Complex* xk = S.basis_k(mk.indices[K][0]).node_values();
                const int a = g.j0;
                const int c = -offsets[1];
                for (int i = 0; i <= g.n_T; ++i) {
                    const Complex F = 0.5 * (xk[i - a] * xf[i - c] - xk[i - c] * xf[i - a]);
                    sum += rule.weights[static_cast<std::size_t>(i)] * E[static_cast<std::size_t>(i)] * F;
                }
                for (std::size_t e = 0; e < rule.ends.size(); ++e) {
                    const int b = rule.ends[e];
                    const Complex fa_l = (b - a == 0) ? xf_left0 : xf[b - a];
                    const Complex fc_l = (b - c == 0) ? xf_left0 : xf[b - c];
                    const Complex diff = 0.5 * (xk[b - a] * (fc_l - xf[b - c]) - xk[b - c] * (fa_l - xf[b - a]));
                    if (diff != Complex{}) sum += rule.end_weights[e] * E[static_cast<std::size_t>(b)] * diff;
                }
            } else {
                for (int r = 0; r < dims; ++r) {
                    rows[static_cast<std::size_t>(r)] = S.basis_k(mk.indices[K][static_cast<std::size_t>(r)]).node_values();
                    left0[static_cast<std::size_t>(r)] = S.basis_k(mk.indices[K][static_cast<std::size_t>(r)]).value_left(0);
                }
                rows[static_cast<std::size_t>(dims)] = xf;
                left0[static_cast<std::size_t>(dims)] = xf_left0;
                auto wedge_at = [&](int i, bool left) {
                    for (int r = 0; r < m; ++r)
                        for (int c = 0; c < m; ++c) {
                            const int q = i + offsets[static_cast<std::size_t>(c)];
                            mat[static_cast<std::size_t>(r * m + c)] = (left && q == 0) ? left0[static_cast<std::size_t>(r)] : rows[static_cast<std::size_t>(r)][q];
                        }
                    return det_small(mat, m) * inv_fact;
                };
                for (int i = 0; i <= g.n_T; ++i)
                    sum += rule.weights[static_cast<std::size_t>(i)] * E[static_cast<std::size_t>(i)] * wedge_at(i, false);
                for (std::size_t e = 0; e < rule.ends.size(); ++e) {
                    const int b = rule.ends[e];
                    const Complex diff = wedge_at(b, true) - wedge_at(b, false);
                    if (diff != Complex{}) sum += rule.end_weights[e] * E[static_cast<std::size_t>(b)] * diff;
                }
            }
            if (!rule.unit_starts.empty()) {
                for (int r = 0; r < dims; ++r)
                    row_tabs[static_cast<std::size_t>(r)] = &S.basis_k(mk.indices[K][static_cast<std::size_t>(r)]);
                row_tabs[static_cast<std::size_t>(dims)] = &S.fundamental;
                // d/dt of e^{-pt} F on either side of a node
                auto slope = [&](int i, bool left) {
                    Complex F{}, dF{};
                    for (int d = -1; d < m; ++d) {
                        for (int r = 0; r < m; ++r)
                            for (int c = 0; c < m; ++c) {
                                const SolutionTable& tab = *row_tabs[static_cast<std::size_t>(r)];
                                const int q = i + offsets[static_cast<std::size_t>(c)];
                                mat[static_cast<std::size_t>(r * m + c)] =
                                    r == d ? (left ? tab.deriv_left(q) : tab.deriv(q))
                                           : (left ? tab.value_left(q) : tab.value(q));
                            }
                        (d < 0 ? F : dF) += det_small(mat, m) * inv_fact;
                    }
                    return E[static_cast<std::size_t>(i)] * (dF - p * F);
                };
                for (int u : rule.unit_starts) sum += rule.unit_slope_weight * (slope(u, false) - slope(u + 1, true));
            }
            mk.values[K * pts + flat] = sum;
        }
    }
    return mk;
}

/// c^L_K = sum over the theta grid of beta * conj(U^1_L) * M^1_K; W = m c.
ComplexMatrix contract(const Discretization& g, const MeasurementKernel& mk) {
    const int m = mk.m;
    const int dims = m - 1;
    const int dim = static_cast<int>(mk.indices.size());
    ComplexMatrix W(dim, dim);
    if (m == 1) {
        W(0, 0) = mk.values[0];
        return W;
    }
    const auto beta = theta_weights(g);
    const auto roots = unit_roots(g.n);
    const double inv_sqrt_tau = 1.0 / std::sqrt(g.tau);
    // conj(phi_l(theta_j))
    auto cphi = [&](int l, int j) {
        return inv_sqrt_tau * roots[static_cast<std::size_t>(mod_index(static_cast<long long>(l) * j * g.stride, g.n))];
    };
    const double u_scale = 1.0 / std::sqrt(static_cast<double>(m) * factorial(m - 1));
    std::vector<int> jr(static_cast<std::size_t>(dims));
    std::vector<Complex> mat(static_cast<std::size_t>(dims * dims));
    std::vector<Complex> weight_row(mk.points);
    for (int row = 0; row < dim; ++row) {
        const MultiIndex& L = mk.indices[static_cast<std::size_t>(row)];
        for (std::size_t flat = 0; flat < mk.points; ++flat) {
            std::size_t rem = flat;
            double b = 1.0;
            for (int r = 0; r < dims; ++r) {
                jr[static_cast<std::size_t>(r)] = static_cast<int>(rem % (static_cast<std::size_t>(g.J) + 1));
                rem /= static_cast<std::size_t>(g.J) + 1;
                b *= beta[static_cast<std::size_t>(jr[static_cast<std::size_t>(r)])];
            }
            for (int a = 0; a < dims; ++a)
                for (int c = 0; c < dims; ++c)
                    mat[static_cast<std::size_t>(a * dims + c)] = cphi(L[static_cast<std::size_t>(a)], jr[static_cast<std::size_t>(c)]);
            weight_row[flat] = b * u_scale * det_small(mat, dims);
        }
        for (int col = 0; col < dim; ++col) {
            Complex c{};
            const std::size_t base = static_cast<std::size_t>(col) * mk.points;
            for (std::size_t flat = 0; flat < mk.points; ++flat) c += weight_row[flat] * mk.values[base + flat];
            W(row, col) = static_cast<double>(m) * c;
        }
    }
    return W;
}

}  // namespace

MeasurementKernel measurement_kernel(const SolutionSet& tables, Complex p, const SchemeConfig& cfg) {
    if (cfg.m != tables.grid.m) fail(ErrorKind::Contract, "solution tables were built for a different m");
    return kernel_on(tables, tables.grid, p);
}

ComplexMatrix paper_matrix(const SolutionSet& tables, const Discretization& grid, Complex p) {
    return contract(grid, kernel_on(tables, grid, p));
}

// ---------------------------------------------------------------- KernelTable

struct KernelTable::Workspace {
    std::vector<Complex> G;
    std::vector<Complex> C;
    std::vector<Complex> inner;
    std::vector<Complex> profile;
    std::vector<Complex> y;
    std::vector<Complex> out;
};

KernelTable::KernelTable(const SolutionSet& tables, const Discretization& grid)
    : tables_(&tables), g_(grid), m_(grid.m), N_(tables.N) {
    check_tables(tables, grid);
    if (m_ > 2) fail(ErrorKind::Configuration, "the reordered path supports m = 1 and m = 2 only");
    dim_ = static_cast<int>(multi_indices(N_, m_ - 1).size());
    const auto verticals = vertical_splits(g_);
    const PiecewiseRule bar = piecewise_rule(g_.n_T, verticals, g_.h);
    abar_ = bar.weights;
    auto add_slopes = [this](const PiecewiseRule& rule, int j) {
        for (int u : rule.unit_starts) {
            slopes_.push_back({u, j, rule.unit_slope_weight, false});
            slopes_.push_back({u + 1, j, -rule.unit_slope_weight, true});
        }
    };
    auto finish_slopes = [this] {
        for (const auto& sc : slopes_) slope_nodes_.push_back(sc.b);
        std::sort(slope_nodes_.begin(), slope_nodes_.end());
        slope_nodes_.erase(std::unique(slope_nodes_.begin(), slope_nodes_.end()), slope_nodes_.end());
    };
    if (m_ == 1) {
        jump_weight_ = (g_.j0 > 0 && g_.j0 <= g_.n_T) ? bar.end_weight(g_.j0) : 0.0;
        add_slopes(bar, 0);
        finish_slopes();
        return;
    }

    beta_ = theta_weights(g_);
    const double sh = g_.stride * g_.h;
    for (int j = 0; j <= g_.J; ++j) {
        const double standard = (sh / 3.0) * ((j & 1) ? 4.0 : 2.0);
        const double d = beta_[static_cast<std::size_t>(j)] - standard;
        if (std::abs(d) > 1e-14 * sh) beta_local_.emplace_back(j, d);
    }

    const double tiny = 1e-13 * g_.h;
    for (int j = 0; j <= g_.J; ++j) {
        std::vector<int> splits = verticals;
        const int c = j * g_.stride;
        for (int k = 0; k <= 3; ++k) splits.push_back(k * g_.n + c);
        const PiecewiseRule rule = piecewise_rule(g_.n_T, splits, g_.h);
        for (int i = 0; i <= g_.n_T; ++i) {
            const double d = rule.weights[static_cast<std::size_t>(i)] - abar_[static_cast<std::size_t>(i)];
            if (std::abs(d) > tiny) diag_.push_back({i, j, d});
        }
        int candidates[2] = {g_.j0, c};
        for (int t = 0; t < 2; ++t) {
            const int b = candidates[t];
            if (t == 1 && b == candidates[0]) continue;
            if (b <= 0 || b > g_.n_T) continue;
            const double w = rule.end_weight(b);
            if (w != 0.0) jumps_.push_back({b, j, w});
        }
        add_slopes(rule, j);
    }
    finish_slopes();
    std::stable_sort(diag_.begin(), diag_.end(), [](const DiagCorrection& a, const DiagCorrection& b) { return a.i < b.i; });

    roots_ = unit_roots(g_.n);
    Workspace ws;
    inner_fund_.resize(static_cast<std::size_t>(2 * N_ + 1));
    const Complex* xf = tables.fundamental.node_values();
    for (int l = -N_; l <= N_; ++l) inner_into(xf, l, ws, inner_fund_[static_cast<std::size_t>(l + N_)]);
}

KernelTable::~KernelTable() = default;

Complex KernelTable::conj_u(int l, int j) const {
    return roots_[static_cast<std::size_t>(mod_index(static_cast<long long>(l) * j * g_.stride, g_.n))] /
           std::sqrt(g_.tau);
}

void KernelTable::inner_into(const Complex* f, int l, Workspace& ws, std::vector<Complex>& out) const {
    const int n = g_.n;
    const int s = g_.stride;
    const int off = n + 2 * s;
    const int size = g_.n_T + off + 1;
    ws.G.assign(static_cast<std::size_t>(size), Complex{});
    ws.C.assign(static_cast<std::size_t>(size), Complex{});
    for (int q = -n; q <= g_.n_T; ++q) {
        const Complex w = std::conj(roots_[static_cast<std::size_t>(mod_index(static_cast<long long>(l) * q, n))]);
        ws.G[static_cast<std::size_t>(q + off)] = w * f[q];
    }
    const int step = 2 * s;
    for (int x = 0; x < size; ++x)
        ws.C[static_cast<std::size_t>(x)] = ws.G[static_cast<std::size_t>(x)] + (x >= step ? ws.C[static_cast<std::size_t>(x - step)] : Complex{});
    out.resize(static_cast<std::size_t>(g_.n_T) + 1);
    const double third = s * g_.h / 3.0;
    const double inv_sqrt_tau = 1.0 / std::sqrt(g_.tau);
    for (int i = 0; i <= g_.n_T; ++i) {
        const int x = i + off;
        const Complex even = ws.C[static_cast<std::size_t>(x)] - ws.C[static_cast<std::size_t>(x - n - 2 * s)];
        const Complex oddsum = ws.C[static_cast<std::size_t>(x - s)] - ws.C[static_cast<std::size_t>(x - n - s)];
        Complex S = third * (2.0 * even + 4.0 * oddsum);
        for (const auto& [j, w] : beta_local_) S += w * ws.G[static_cast<std::size_t>(x - j * s)];
        out[static_cast<std::size_t>(i)] = inv_sqrt_tau * roots_[static_cast<std::size_t>(mod_index(static_cast<long long>(l) * i, n))] * S;
    }
}

std::vector<Complex> KernelTable::inner_integral(std::optional<int> k, int l) const {
    if (m_ != 2) fail(ErrorKind::Contract, "inner integrals exist for m = 2 only");
    if (l < -N_ || l > N_) fail(ErrorKind::Contract, "basis index l out of range");
    if (!k) return inner_fund_[static_cast<std::size_t>(l + N_)];
    Workspace ws;
    std::vector<Complex> out;
    inner_into(tables_->basis_k(*k).node_values(), l, ws, out);
    return out;
}

void KernelTable::profile(int row, int col, std::vector<Complex>& g, std::vector<Complex>& gp) const {
    Workspace ws;
    g.assign(static_cast<std::size_t>(g_.n_T) + 1, Complex{});
    gp.assign(static_cast<std::size_t>(g_.n_T) + 1, Complex{});
    const SolutionTable& fund = tables_->fundamental;
    const Complex* xf = fund.node_values();
    const Complex xf_left0 = fund.value_left(0);
    const int a = g_.j0;
    auto val = [](const SolutionTable& t, int q, bool left) { return left ? t.value_left(q) : t.value(q); };
    auto der = [](const SolutionTable& t, int q, bool left) { return left ? t.deriv_left(q) : t.deriv(q); };
    if (m_ == 1) {
        for (int i = a; i <= g_.n_T; ++i) g[static_cast<std::size_t>(i)] = abar_[static_cast<std::size_t>(i)] * xf[i - a];
        if (jump_weight_ != 0.0) g[static_cast<std::size_t>(a)] += jump_weight_ * (xf_left0 - xf[0]);
        for (const auto& sc : slopes_) {
            g[static_cast<std::size_t>(sc.b)] += sc.w * der(fund, sc.b - a, sc.left);
            gp[static_cast<std::size_t>(sc.b)] -= sc.w * val(fund, sc.b - a, sc.left);
        }
        return;
    }
    const int l = row - N_;
    const int k = col - N_;
    const SolutionTable& basis = tables_->basis_k(k);
    const Complex* xk = basis.node_values();
    inner_into(xk, l, ws, ws.inner);
    const std::vector<Complex>& Iinf = inner_fund_[static_cast<std::size_t>(l + N_)];
    for (int i = 0; i <= g_.n_T; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        g[ui] = abar_[ui] * (xk[i - a] * Iinf[ui] - xf[i - a] * ws.inner[ui]);
    }
    const int s = g_.stride;
    for (const auto& dc : diag_) {
        const int c = dc.j * s;
        const int i = dc.i;
        const Complex F = xk[i - a] * xf[i - c] - xk[i - c] * xf[i - a];
        g[static_cast<std::size_t>(i)] += (beta_[static_cast<std::size_t>(dc.j)] * dc.d) * conj_u(l, dc.j) * F;
    }
    for (const auto& jc : jumps_) {
        const int c = jc.j * s;
        const int b = jc.b;
        const Complex fa_l = (b - a == 0) ? xf_left0 : xf[b - a];
        const Complex fc_l = (b - c == 0) ? xf_left0 : xf[b - c];
        const Complex diff = xk[b - a] * (fc_l - xf[b - c]) - xk[b - c] * (fa_l - xf[b - a]);
        g[static_cast<std::size_t>(b)] += (beta_[static_cast<std::size_t>(jc.j)] * jc.w) * conj_u(l, jc.j) * diff;
    }
    for (const auto& sc : slopes_) {
        const int c = sc.j * s;
        const int b = sc.b;
        const bool L = sc.left;
        const Complex ka = val(basis, b - a, L), kc = val(basis, b - c, L);
        const Complex fa = val(fund, b - a, L), fc = val(fund, b - c, L);
        const Complex F = ka * fc - kc * fa;
        const Complex dF = der(basis, b - a, L) * fc + ka * der(fund, b - c, L) - der(basis, b - c, L) * fa -
                           kc * der(fund, b - a, L);
        const Complex w = (beta_[static_cast<std::size_t>(sc.j)] * sc.w) * conj_u(l, sc.j);
        g[static_cast<std::size_t>(b)] += w * dF;
        gp[static_cast<std::size_t>(b)] -= w * F;
    }
    // m * m^{-1/2} * (1/m!) with m = 2
    const double kappa = 1.0 / std::sqrt(2.0);
    for (auto& v : g) v *= kappa;
    for (int b : slope_nodes_) gp[static_cast<std::size_t>(b)] *= kappa;
}

ComplexMatrix KernelTable::evaluate(Complex p) const {
    std::vector<Complex> E(static_cast<std::size_t>(g_.n_T) + 1);
    for (int i = 0; i <= g_.n_T; ++i) E[static_cast<std::size_t>(i)] = std::exp(-p * (i * g_.h));
    ComplexMatrix W(dim_, dim_);
    std::vector<Complex> g, gp;
    for (int row = 0; row < dim_; ++row)
        for (int col = 0; col < dim_; ++col) {
            profile(row, col, g, gp);
            Complex sum{};
            for (std::size_t i = 0; i < g.size(); ++i) sum += E[i] * g[i];
            Complex slope{};
            for (int b : slope_nodes_) slope += E[static_cast<std::size_t>(b)] * gp[static_cast<std::size_t>(b)];
            W(row, col) = sum + p * slope;
        }
    return W;
}

std::vector<ComplexMatrix> KernelTable::evaluate_line(double nu0, double omega0, double domega, int count,
                                                      int threads) const {
    if (count < 1) return {};
    const int n_in = g_.n_T + 1;
    ChirpZ cz(n_in, count, domega * g_.h);
    std::vector<Complex> pre(static_cast<std::size_t>(n_in));
    for (int i = 0; i < n_in; ++i) {
        const double t = i * g_.h;
        pre[static_cast<std::size_t>(i)] = std::exp(nu0 * t) * std::polar(1.0, -omega0 * t);
    }
    // p e^{-p t_b} on the slope nodes, per omega
    std::vector<Complex> ps(static_cast<std::size_t>(count));
    std::vector<Complex> slope_exp(static_cast<std::size_t>(count) * slope_nodes_.size());
    for (int q = 0; q < count; ++q) {
        const Complex p(-nu0, omega0 + q * domega);
        ps[static_cast<std::size_t>(q)] = p;
        for (std::size_t r = 0; r < slope_nodes_.size(); ++r)
            slope_exp[static_cast<std::size_t>(q) * slope_nodes_.size() + r] = p * std::exp(-p * (slope_nodes_[r] * g_.h));
    }
    std::vector<ComplexMatrix> out(static_cast<std::size_t>(count), ComplexMatrix(dim_, dim_));
    const int workers = std::max(1, threads);
    std::vector<std::vector<Complex>> prof(static_cast<std::size_t>(workers));
    std::vector<std::vector<Complex>> prof_p(static_cast<std::size_t>(workers));
    std::vector<std::vector<Complex>> ybuf(static_cast<std::size_t>(workers), std::vector<Complex>(static_cast<std::size_t>(n_in)));
    std::vector<std::vector<Complex>> xbuf(static_cast<std::size_t>(workers), std::vector<Complex>(static_cast<std::size_t>(count)));
    std::vector<ChirpZ::Buffer*> bufs(static_cast<std::size_t>(workers), nullptr);
    for (auto& b : bufs) b = cz.make_buffer();
    try {
        parallel_for(static_cast<std::size_t>(dim_) * dim_, workers, [&](std::size_t e, int w) {
            const int row = static_cast<int>(e / static_cast<std::size_t>(dim_));
            const int col = static_cast<int>(e % static_cast<std::size_t>(dim_));
            auto& g = prof[static_cast<std::size_t>(w)];
            auto& gp = prof_p[static_cast<std::size_t>(w)];
            auto& y = ybuf[static_cast<std::size_t>(w)];
            auto& X = xbuf[static_cast<std::size_t>(w)];
            profile(row, col, g, gp);
            for (int i = 0; i < n_in; ++i) y[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(i)] * pre[static_cast<std::size_t>(i)];
            cz.transform(y.data(), X.data(), *bufs[static_cast<std::size_t>(w)]);
            const std::size_t ns = slope_nodes_.size();
            for (int q = 0; q < count; ++q) {
                Complex v = X[static_cast<std::size_t>(q)];
                const Complex* se = slope_exp.data() + static_cast<std::size_t>(q) * ns;
                for (std::size_t r = 0; r < ns; ++r) v += se[r] * gp[static_cast<std::size_t>(slope_nodes_[r])];
                out[static_cast<std::size_t>(q)](row, col) = v;
            }
        });
    } catch (...) {
        for (auto* b : bufs) ChirpZ::free_buffer(b);
        throw;
    }
    for (auto* b : bufs) ChirpZ::free_buffer(b);
    return out;
}

// ---------------------------------------------------------------- front door

namespace {

ComplexMatrix matrix_on(const SchemeConfig& cfg, const SolutionSet& tables, const Discretization& g, Complex p) {
    if (cfg.path == SchemePath::FubiniFast && g.m <= 2) return KernelTable(tables, g).evaluate(p);
    if (cfg.path == SchemePath::FubiniFast)
        fail(ErrorKind::Configuration, "the reordered path supports m = 1 and m = 2 only; use the paper path");
    return paper_matrix(tables, g, p);
}

ComplexMatrix restrict_to(const ComplexMatrix& W, int m, int N_sub, int N_full) {
    if (N_sub == N_full) return W;
    const auto idx = nested_indices(m, N_sub, N_full);
    return W.submatrix(idx, idx);
}

}  // namespace

ComplexMatrix build_WTN(const LinearDelaySystem& sys, const SchemeConfig& cfg, Complex p,
                        const SolutionSet& tables) {
    (void)sys;
    if (cfg.m != tables.grid.m) fail(ErrorKind::Contract, "solution tables were built for a different m");
    if (cfg.N > tables.N) fail(ErrorKind::Contract, "missing basis tables for the requested N");
    return restrict_to(matrix_on(cfg, tables, tables.grid, p), cfg.m, cfg.N, tables.N);
}

double alpha_of(const ComplexMatrix& W, ConstraintKind kind) {
    if (kind == ConstraintKind::NormBound) return largest_singular_value(W);
    return smallest_hermitian_eigenvalue(hermitian_symmetrize(W));
}

double alpha(const LinearDelaySystem& sys, const SchemeConfig& cfg, Complex p, const SolutionSet& tables) {
    return alpha_of(build_WTN(sys, cfg, p, tables), sys.constraint_kind);
}

TailGap tail_gap(const LinearDelaySystem& sys, const SchemeConfig& cfg, Complex p, const SolutionSet& tables) {
    (void)sys;
    const Discretization& g = tables.grid;
    if (g.T() < 2.0) fail(ErrorKind::Domain, "tail_gap needs T >= 2");
    const Discretization gh = with_horizon(g, 0.5 * g.T());
    const Discretization gq = with_horizon(g, 0.25 * g.T());
    const ComplexMatrix WT = restrict_to(matrix_on(cfg, tables, g, p), cfg.m, cfg.N, tables.N);
    const ComplexMatrix WH = restrict_to(matrix_on(cfg, tables, gh, p), cfg.m, cfg.N, tables.N);
    const ComplexMatrix WQ = restrict_to(matrix_on(cfg, tables, gq, p), cfg.m, cfg.N, tables.N);
    TailGap out;
    out.gap = (WT - WH).max_abs();
    out.gap_half = (WH - WQ).max_abs();
    if (out.gap > 0.0 && out.gap_half > 0.0)
        out.decay_rate = std::log(out.gap_half / out.gap) / (gh.T() - gq.T());
    else
        out.decay_rate = std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace cfreq
