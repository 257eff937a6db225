#include "cfreq/sweep.hpp"

#include "cfreq/error.hpp"
#include "cfreq/parallel.hpp"
#include "cfreq/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>

namespace cfreq {

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Satisfied: return "Satisfied";
        case Verdict::Violated: return "Violated";
        case Verdict::PreconditionFailed: return "PreconditionFailed";
    }
    return "?";
}

const char* to_string(ScanStatus s) noexcept {
    switch (s) {
        case ScanStatus::Evaluated: return "Evaluated";
        case ScanStatus::Skipped: return "Skipped";
        case ScanStatus::Error: return "Error";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int half_count(const SchemeConfig& cfg) {
    return static_cast<int>(std::lround(cfg.Omega / cfg.omega_step));
}

[[noreturn]] void rethrow_with(const Error& e, const std::string& context) {
    throw Error(e.kind(), context + ": " + e.what());
}

/// W on the computed omega points: q = 0..K when mirroring, else the full grid.
std::vector<ComplexMatrix> line_matrices(const SchemeConfig& cfg, const SolutionSet& tables,
                                         const Discretization& g, int threads, const ProgressCallback& progress) {
    const int K = half_count(cfg);
    const double step = cfg.omega_step;
    const int count = cfg.mirror ? K + 1 : 2 * K + 1;
    const double omega0 = cfg.mirror ? 0.0 : -K * step;
    if (cfg.path == SchemePath::FubiniFast) {
        if (g.m > 2) fail(ErrorKind::Configuration, "the reordered path supports m = 1 and m = 2 only; use the paper path");
        const KernelTable kt(tables, g);
        auto Ws = kt.evaluate_line(cfg.nu0, omega0, step, count, threads);
        if (progress) progress(static_cast<std::size_t>(count), static_cast<std::size_t>(count));
        return Ws;
    }
    std::vector<ComplexMatrix> Ws(static_cast<std::size_t>(count));
    std::atomic<std::size_t> done{0};
    parallel_for(Ws.size(), threads, [&](std::size_t q, int) {
        const double omega = cfg.mirror ? static_cast<double>(q) * step : (static_cast<double>(q) - K) * step;
        try {
            Ws[q] = paper_matrix(tables, g, Complex(-cfg.nu0, omega));
        } catch (const Error& e) {
            std::ostringstream ctx;
            ctx << "omega = " << omega;
            rethrow_with(e, ctx.str());
        }
        const std::size_t d = ++done;
        if (progress) progress(d, Ws.size());
    });
    return Ws;
}

std::vector<double> alphas_from(const std::vector<ComplexMatrix>& Ws, const std::vector<int>* idx,
                                ConstraintKind kind, const SchemeConfig& cfg, int threads) {
    std::vector<double> computed(Ws.size());
    parallel_for(Ws.size(), threads, [&](std::size_t q, int) {
        try {
            computed[q] = idx ? alpha_of(Ws[q].submatrix(*idx, *idx), kind) : alpha_of(Ws[q], kind);
        } catch (const Error& e) {
            std::ostringstream ctx;
            ctx << "omega index " << q;
            rethrow_with(e, ctx.str());
        }
    });
    if (!cfg.mirror) return computed;
    const int K = half_count(cfg);
    std::vector<double> full(static_cast<std::size_t>(2 * K + 1));
    for (int q = 0; q <= K; ++q) {
        full[static_cast<std::size_t>(K + q)] = computed[static_cast<std::size_t>(q)];
        full[static_cast<std::size_t>(K - q)] = computed[static_cast<std::size_t>(q)];
    }
    return full;
}

}  // namespace

std::vector<double> omega_grid(const SchemeConfig& cfg) {
    const int K = half_count(cfg);
    std::vector<double> out(static_cast<std::size_t>(2 * K + 1));
    for (int q = 0; q <= 2 * K; ++q) out[static_cast<std::size_t>(q)] = (q - K) * cfg.omega_step;
    return out;
}

PreconditionResult check_precondition(const LinearDelaySystem& sys, const SchemeConfig& cfg) {
    const Spectrum spec = leading_roots(sys, cfg.m);
    PreconditionResult out;
    out.spectral_bound = compound_spectral_bound(spec, cfg.m);
    out.ok = -cfg.nu0 > out.spectral_bound;
    out.leading.assign(spec.roots.begin(),
                       spec.roots.begin() + std::min<std::ptrdiff_t>(cfg.m, static_cast<std::ptrdiff_t>(spec.roots.size())));
    return out;
}

std::vector<double> alpha_curve(const LinearDelaySystem& sys, const SchemeConfig& cfg, const SolutionSet& tables,
                                const ProgressCallback& progress) {
    if (cfg.N > tables.N) fail(ErrorKind::Contract, "missing basis tables for the requested N");
    const int threads = resolve_threads(cfg.threads);
    const Discretization g = with_horizon(tables.grid, cfg.T);
    const auto Ws = line_matrices(cfg, tables, g, threads, progress);
    if (cfg.N == tables.N) return alphas_from(Ws, nullptr, sys.constraint_kind, cfg, threads);
    const auto idx = nested_indices(cfg.m, cfg.N, tables.N);
    return alphas_from(Ws, &idx, sys.constraint_kind, cfg, threads);
}

FrequencySweepReport frequency_sweep(const LinearDelaySystem& sys, const SchemeConfig& cfg,
                                     const ProgressCallback& progress) {
    const auto t_start = Clock::now();
    FrequencySweepReport rep;
    rep.kind = sys.constraint_kind;
    rep.nu0 = cfg.nu0;
    rep.omegas = omega_grid(cfg);
    rep.grid = resolve_grid(sys, cfg);
    const double inv_lambda = 1.0 / sys.lambda_bound;
    rep.threshold = sys.constraint_kind == ConstraintKind::NormBound ? inv_lambda : -inv_lambda;

    auto t0 = Clock::now();
    const PreconditionResult pre = check_precondition(sys, cfg);
    rep.timings["spectrum"] = seconds_since(t0);
    rep.spectral_bound = pre.spectral_bound;
    rep.leading_roots = pre.leading;
    if (!pre.ok) {
        rep.verdict = Verdict::PreconditionFailed;
        rep.omegas.clear();
        rep.timings["total"] = seconds_since(t_start);
        return rep;
    }

    const int threads = resolve_threads(cfg.threads);
    t0 = Clock::now();
    SolutionSet tables;
    try {
        tables = integrate_solutions(sys, cfg, threads);
    } catch (const Error& e) {
        rethrow_with(e, "integrating solutions");
    }
    rep.timings["integrate"] = seconds_since(t0);

    t0 = Clock::now();
    rep.alphas = alpha_curve(sys, cfg, tables, progress);
    rep.timings["sweep"] = seconds_since(t0);

    const bool norm = sys.constraint_kind == ConstraintKind::NormBound;
    std::size_t best = 0;
    for (std::size_t q = 1; q < rep.alphas.size(); ++q)
        if (norm ? rep.alphas[q] > rep.alphas[best] : rep.alphas[q] < rep.alphas[best]) best = q;
    rep.critical_omega = rep.omegas[best];
    rep.critical_alpha = rep.alphas[best];
    rep.margin = norm ? inv_lambda - rep.critical_alpha : rep.critical_alpha + inv_lambda;
    rep.verdict = rep.margin > 0.0 ? Verdict::Satisfied : Verdict::Violated;
    rep.near_threshold = rep.verdict == Verdict::Satisfied && rep.margin < 0.05 * inv_lambda;

    bool band_set = false;
    for (std::size_t q = 0; q < rep.alphas.size(); ++q) {
        const double w = std::abs(rep.omegas[q]);
        if (w < 0.5 * cfg.Omega - 1e-12 || w > cfg.Omega + 1e-12) continue;
        if (!band_set || (norm ? rep.alphas[q] > rep.outer_band_extreme : rep.alphas[q] < rep.outer_band_extreme))
            rep.outer_band_extreme = rep.alphas[q];
        band_set = true;
    }

    t0 = Clock::now();
    const Discretization& g = tables.grid;
    if (g.T() >= 2.0) {
        const TailGap tg = tail_gap(sys, cfg, Complex(-cfg.nu0, rep.critical_omega), tables);
        rep.tail_gap_at_argmax = tg.gap;
        rep.tail_decay_rate = tg.decay_rate;
    }
    rep.timings["tail_gap"] = seconds_since(t0);
    rep.timings["total"] = seconds_since(t_start);
    return rep;
}

ConvergenceReport convergence_report(const LinearDelaySystem& sys, const SchemeConfig& cfg, const std::vector<int>& Ns,
                                     const std::vector<double>& Ts, const ProgressCallback& progress) {
    if (Ns.empty() || Ts.empty()) fail(ErrorKind::Configuration, "convergence: N and T lists must be nonempty");
    if (!std::is_sorted(Ns.begin(), Ns.end()) || !std::is_sorted(Ts.begin(), Ts.end()))
        fail(ErrorKind::Configuration, "convergence: N and T lists must be ascending");
    ConvergenceReport rep;
    rep.Ns = Ns;
    rep.Ts = Ts;
    rep.omegas = omega_grid(cfg);

    SchemeConfig big = cfg;
    big.N = Ns.back();
    big.T = Ts.back();
    const int threads = resolve_threads(cfg.threads);
    const SolutionSet tables = integrate_solutions(sys, big, threads);

    std::size_t done = 0;
    const std::size_t total = Ts.size();
    for (double T : Ts) {
        const Discretization g = with_horizon(tables.grid, T);
        const auto Ws = line_matrices(big, tables, g, threads, {});
        std::vector<std::vector<double>> per_N;
        for (int N : Ns) {
            if (N == tables.N) {
                per_N.push_back(alphas_from(Ws, nullptr, sys.constraint_kind, big, threads));
            } else {
                const auto idx = nested_indices(cfg.m, N, tables.N);
                per_N.push_back(alphas_from(Ws, &idx, sys.constraint_kind, big, threads));
            }
        }
        rep.curves.push_back(std::move(per_N));
        if (progress) progress(++done, total);
    }

    auto sup_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
        return d;
    };
    for (std::size_t iT = 0; iT < Ts.size(); ++iT)
        for (std::size_t iN = 0; iN + 1 < Ns.size(); ++iN) {
            CurveDifference c{Ns[iN], Ts[iT], Ns[iN + 1], Ts[iT], sup_diff(rep.curves[iT][iN], rep.curves[iT][iN + 1]), false};
            c.stabilized = c.sup_diff < 1e-2;
            rep.differences.push_back(c);
        }
    for (std::size_t iN = 0; iN < Ns.size(); ++iN)
        for (std::size_t iT = 0; iT + 1 < Ts.size(); ++iT) {
            CurveDifference c{Ns[iN], Ts[iT], Ns[iN], Ts[iT + 1], sup_diff(rep.curves[iT][iN], rep.curves[iT + 1][iN]), false};
            c.stabilized = c.sup_diff < 1e-2;
            rep.differences.push_back(c);
        }
    return rep;
}

namespace {

ScanPoint evaluate_point(const LinearDelaySystem& sys, const SchemeConfig& cfg, ScanPoint pt) {
    try {
        const auto rep = frequency_sweep(sys, cfg);
        pt.status = ScanStatus::Evaluated;
        pt.verdict = rep.verdict;
        pt.margin = rep.margin;
        pt.threshold = rep.threshold;
        pt.near_threshold = rep.near_threshold;
    } catch (const std::exception& e) {
        pt.status = ScanStatus::Error;
        pt.message = e.what();
    }
    return pt;
}

}  // namespace

std::vector<ScanPoint> region_scan(const ParamGrid& grid, const SchemeConfig& cfg, const ProgressCallback& progress) {
    std::vector<ScanPoint> out;
    if (const auto* ss = std::get_if<SsGrid>(&grid)) {
        const std::size_t total = ss->alphas.size() * ss->taus.size();
        for (double a : ss->alphas)
            for (double tv : ss->taus) {
                ScanPoint pt;
                const double tau = ss->tau_as_fraction ? tv / (2.0 * a) : tv;
                pt.params = {{"alpha", a}, {"tau", tau}};
                try {
                    const double R = ss->radius ? *ss->radius : ss_attractor_radius(a, tau, ss->coefficient);
                    pt.params["R"] = R;
                    out.push_back(evaluate_point(suarez_schopf_system({a, tau, R}), cfg, pt));
                } catch (const Error& e) {
                    const bool skip = e.kind() == ErrorKind::Precondition || e.kind() == ErrorKind::Domain ||
                                      e.kind() == ErrorKind::Bracket;
                    pt.status = skip ? ScanStatus::Skipped : ScanStatus::Error;
                    pt.message = e.what();
                    out.push_back(pt);
                }
                if (progress) progress(out.size(), total);
            }
        return out;
    }
    const auto& mg = std::get<MgGrid>(grid);
    for (double tau : mg.taus) {
        ScanPoint pt;
        pt.params = {{"gamma", mg.gamma}, {"beta", mg.beta}, {"kappa", mg.kappa}, {"tau", tau}};
        try {
            const LinearDelaySystem sys =
                mackey_glass_system({mg.gamma, mg.beta, mg.kappa, tau}, mg.lambda.value_or(0.0));
            out.push_back(evaluate_point(sys, cfg, pt));
        } catch (const Error& e) {
            pt.status = ScanStatus::Skipped;
            pt.message = e.what();
            out.push_back(pt);
        }
        if (progress) progress(out.size(), mg.taus.size());
    }
    return out;
}

}  // namespace cfreq
