#include "cfreq/report.hpp"

#include "cfreq/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cfreq {

using nlohmann::ordered_json;

namespace {

ordered_json complex_json(Complex z) {
    return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

/// JSON has no infinities or NaN.
ordered_json real_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

ordered_json to_json(const LinearDelaySystem& sys) {
    return ordered_json{{"a0", sys.a0},
                        {"a1", sys.a1},
                        {"tau", sys.tau},
                        {"tau0", sys.tau0},
                        {"b_tilde", sys.b_tilde},
                        {"lambda_bound", sys.lambda_bound},
                        {"constraint", sys.constraint_kind == ConstraintKind::NormBound ? "norm" : "monotone"}};
}

ordered_json to_json(const Discretization& g) {
    return ordered_json{{"h", g.h},        {"nodes_per_delay", g.n}, {"n_T", g.n_T}, {"T", g.T()},
                        {"j0", g.j0},      {"theta_stride", g.stride}, {"theta_nodes", g.J + 1}, {"m", g.m}};
}

ordered_json to_json(const Spectrum& spec) {
    ordered_json roots = ordered_json::array();
    for (const auto& r : spec.roots) roots.push_back(complex_json(r));
    return ordered_json{{"roots", roots},
                        {"search_box",
                         {{"re_min", spec.search_box.re_min},
                          {"re_max", spec.search_box.re_max},
                          {"im_max", spec.search_box.im_max}}},
                        {"verified_count", spec.verified_count},
                        {"certified_count", spec.certified_count},
                        {"outside_re_bound", real_json(spec.outside_re_bound)},
                        {"encloses_all", spec.encloses_all}};
}

ordered_json to_json(const FrequencySweepReport& rep, bool timings) {
    ordered_json j;
    j["verdict"] = to_string(rep.verdict);
    j["constraint"] = rep.kind == ConstraintKind::NormBound ? "norm" : "monotone";
    j["threshold"] = rep.threshold;
    j["margin"] = rep.margin;
    j["near_threshold"] = rep.near_threshold;
    j["nu0"] = rep.nu0;
    j["spectral_bound"] = real_json(rep.spectral_bound);
    ordered_json roots = ordered_json::array();
    for (const auto& r : rep.leading_roots) roots.push_back(complex_json(r));
    j["leading_roots"] = roots;
    j["critical_omega"] = rep.critical_omega;
    j["critical_alpha"] = rep.critical_alpha;
    j["tail_gap_at_argmax"] = real_json(rep.tail_gap_at_argmax);
    j["tail_decay_rate"] = real_json(rep.tail_decay_rate);
    j["outer_band_extreme"] = rep.outer_band_extreme;
    j["grid"] = to_json(rep.grid);
    j["omega_count"] = rep.omegas.size();
    if (timings) j["timings"] = rep.timings;
    return j;
}

ordered_json to_json(const ConvergenceReport& rep) {
    ordered_json j;
    j["Ns"] = rep.Ns;
    j["Ts"] = rep.Ts;
    ordered_json diffs = ordered_json::array();
    for (const auto& d : rep.differences)
        diffs.push_back({{"N_a", d.N_a}, {"T_a", d.T_a}, {"N_b", d.N_b}, {"T_b", d.T_b},
                         {"sup_diff", d.sup_diff}, {"stabilized", d.stabilized}});
    j["differences"] = diffs;
    ordered_json maxima = ordered_json::array();
    for (std::size_t iT = 0; iT < rep.Ts.size(); ++iT)
        for (std::size_t iN = 0; iN < rep.Ns.size(); ++iN) {
            const auto& c = rep.curves[iT][iN];
            double mx = c.empty() ? 0.0 : c[0];
            for (double v : c) mx = std::max(mx, v);
            maxima.push_back({{"N", rep.Ns[iN]}, {"T", rep.Ts[iT]}, {"max_alpha", mx}});
        }
    j["curve_maxima"] = maxima;
    return j;
}

ordered_json to_json(const std::vector<ScanPoint>& scan) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : scan) {
        ordered_json e;
        e["params"] = p.params;
        e["status"] = to_string(p.status);
        if (p.status == ScanStatus::Evaluated) {
            e["verdict"] = to_string(p.verdict);
            e["margin"] = p.margin;
            e["threshold"] = p.threshold;
            e["near_threshold"] = p.near_threshold;
        } else {
            e["message"] = p.message;
        }
        arr.push_back(e);
    }
    return arr;
}

void write_curve_csv(const std::string& path, const FrequencySweepReport& rep) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail(ErrorKind::Configuration, "cannot open " + path + " for writing");
    std::fprintf(f, "omega,alpha,threshold\n");
    for (std::size_t i = 0; i < rep.alphas.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", rep.omegas[i], rep.alphas[i], rep.threshold);
    std::fclose(f);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Configuration, "cannot open " + path + " for writing");
    out << text;
}

}  // namespace cfreq
