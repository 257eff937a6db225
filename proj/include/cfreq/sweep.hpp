#pragma once

#include "cfreq/models.hpp"
#include "cfreq/scheme.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cfreq {

enum class Verdict { Satisfied, Violated, PreconditionFailed };

[[nodiscard]] const char* to_string(Verdict v) noexcept;

struct PreconditionResult {
    bool ok = false;
    /// sum of the m leading real parts
    double spectral_bound = 0.0;
    std::vector<Complex> leading;
};

/// ok iff -nu0 > sum of the m leading root real parts.
[[nodiscard]] PreconditionResult check_precondition(const LinearDelaySystem& sys, const SchemeConfig& cfg);

struct FrequencySweepReport {
    std::vector<double> omegas;
    std::vector<double> alphas;
    ConstraintKind kind = ConstraintKind::NormBound;
    /// 1/Lambda for NormBound, -1/Lambda for MonotoneSector
    double threshold = 0.0;
    Verdict verdict = Verdict::PreconditionFailed;
    /// NormBound: 1/Lambda - max alpha; MonotoneSector: min alpha + 1/Lambda
    double margin = 0.0;
    /// margin below 5% of 1/Lambda
    bool near_threshold = false;
    double spectral_bound = 0.0;
    std::vector<Complex> leading_roots;
    double nu0 = 0.0;
    /// omega of the extreme alpha (max for NormBound, min for MonotoneSector)
    double critical_omega = 0.0;
    double critical_alpha = 0.0;
    double tail_gap_at_argmax = 0.0;
    double tail_decay_rate = 0.0;
    /// extreme alpha over |omega| in [Omega/2, Omega]; descriptive only
    double outer_band_extreme = 0.0;
    Discretization grid;
    std::map<std::string, double> timings;
};

/// (done, total); may be called from worker threads.
using ProgressCallback = std::function<void(std::size_t, std::size_t)>;

[[nodiscard]] FrequencySweepReport frequency_sweep(const LinearDelaySystem& sys, const SchemeConfig& cfg,
                                                   const ProgressCallback& progress = {});

/// Uniform grid omega_q = (q - K) step, q = 0..2K, K = round(Omega / step).
[[nodiscard]] std::vector<double> omega_grid(const SchemeConfig& cfg);

/// alpha over omega_grid(cfg) from precomputed tables; mirrors when cfg.mirror.
[[nodiscard]] std::vector<double> alpha_curve(const LinearDelaySystem& sys, const SchemeConfig& cfg,
                                              const SolutionSet& tables, const ProgressCallback& progress = {});

struct CurveDifference {
    int N_a = 0;
    double T_a = 0.0;
    int N_b = 0;
    double T_b = 0.0;
    double sup_diff = 0.0;
    bool stabilized = false;
};

struct ConvergenceReport {
    std::vector<int> Ns;
    std::vector<double> Ts;
    std::vector<double> omegas;
    /// curves[iT][iN]
    std::vector<std::vector<std::vector<double>>> curves;
    std::vector<CurveDifference> differences;
};

/// Curves for every (N, T); differences between consecutive N at each T and
/// consecutive T at each N. Stabilized when the sup difference is < 1e-2.
[[nodiscard]] ConvergenceReport convergence_report(const LinearDelaySystem& sys, const SchemeConfig& cfg,
                                                   const std::vector<int>& Ns, const std::vector<double>& Ts,
                                                   const ProgressCallback& progress = {});

struct SsGrid {
    std::vector<double> alphas;
    std::vector<double> taus;
    /// taus[i] is read as a fraction of 1/(2 alpha)
    bool tau_as_fraction = false;
    /// fixed radius; nullopt = attractor radius from the lemma
    std::optional<double> radius;
    RadiusCoefficient coefficient = RadiusCoefficient::Reported;
};

struct MgGrid {
    double gamma = 0.1;
    double beta = 0.2;
    double kappa = 10.0;
    std::vector<double> taus;
    std::optional<double> lambda;
};

using ParamGrid = std::variant<SsGrid, MgGrid>;

enum class ScanStatus { Evaluated, Skipped, Error };

[[nodiscard]] const char* to_string(ScanStatus s) noexcept;

struct ScanPoint {
    std::map<std::string, double> params;
    ScanStatus status = ScanStatus::Evaluated;
    Verdict verdict = Verdict::PreconditionFailed;
    double margin = 0.0;
    double threshold = 0.0;
    bool near_threshold = false;
    std::string message;
};

[[nodiscard]] std::vector<ScanPoint> region_scan(const ParamGrid& grid, const SchemeConfig& cfg,
                                                 const ProgressCallback& progress = {});

}  // namespace cfreq
