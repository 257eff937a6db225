#pragma once

#include "cfreq/dde.hpp"
#include "cfreq/linalg.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace cfreq {

enum class SchemePath { PaperFaithful, FubiniFast };

struct SchemeConfig {
    int m = 2;
    int N = 30;
    double T = 15.0;
    double Omega = 30.0;
    double nu0 = 0.01;
    double omega_step = 0.05;
    double h = 1e-3;
    /// 0 picks the default: every node for m <= 2, a coarse grid for m >= 3.
    int theta_stride = 0;
    SchemePath path = SchemePath::FubiniFast;
    bool mirror = true;
    bool experimental = false;
    /// 0 = auto (COMPOUND_FREQ_THREADS, then hardware concurrency).
    int threads = 0;
};

/// Grid actually used: h = tau / n, t-grid 0..n_T, theta_j = -j * stride * h, j = 0..J.
struct Discretization {
    double tau = 1.0;
    double h = 1e-3;
    int n = 1000;
    int j0 = 0;
    int n_T = 15000;
    int stride = 1;
    int J = 1000;
    int m = 2;

    [[nodiscard]] double T() const { return n_T * h; }
    [[nodiscard]] double tau0() const { return j0 * h; }
    [[nodiscard]] int theta_j0() const { return j0 / stride; }
};

[[nodiscard]] Discretization resolve_grid(const LinearDelaySystem& sys, const SchemeConfig& cfg);

/// Same step, horizon rounded to an even number of intervals.
[[nodiscard]] Discretization with_horizon(const Discretization& g, double T);

/// Basis solutions x_{-N..N} and the fundamental solution on one grid.
struct SolutionSet {
    Discretization grid;
    int N = 0;
    std::vector<SolutionTable> basis;
    SolutionTable fundamental;

    [[nodiscard]] const SolutionTable& basis_k(int k) const;
};

[[nodiscard]] SolutionSet integrate_solutions(const LinearDelaySystem& sys, const SchemeConfig& cfg,
                                              int threads = 1);

using MultiIndex = std::vector<int>;

/// Increasing tuples k_1 < ... < k_len from {-N..N}, lexicographic order.
[[nodiscard]] std::vector<MultiIndex> multi_indices(int N, int len);

/// (1/m!) det[ x_i(t + theta_j) ]
[[nodiscard]] Complex wedge_eval(const std::vector<const SolutionTable*>& tables, double t,
                                 const std::vector<double>& thetas);

/// M^1_K sampled on the (m-1)-dimensional theta grid.
struct MeasurementKernel {
    int m = 2;
    std::vector<MultiIndex> indices;
    /// 1-D theta nodes; the grid is their (m-1)-fold product.
    std::vector<double> theta;
    std::size_t points = 1;
    /// values[K * points + flat], flat = sum_r j_r (J+1)^r
    std::vector<Complex> values;

    [[nodiscard]] Complex at(std::size_t K, std::size_t flat) const { return values[K * points + flat]; }
};

[[nodiscard]] MeasurementKernel measurement_kernel(const SolutionSet& tables, Complex p,
                                                   const SchemeConfig& cfg);

/// Precomputed, p-independent part of the reordered (FubiniFast) assembly for
/// m in {1, 2}. Holds a reference to the solution set, which must outlive it.
class KernelTable {
public:
    KernelTable(const SolutionSet& tables, const Discretization& grid);
    ~KernelTable();
    KernelTable(const KernelTable&) = delete;
    KernelTable& operator=(const KernelTable&) = delete;

    [[nodiscard]] int dimension() const noexcept { return dim_; }
    [[nodiscard]] const Discretization& grid() const noexcept { return g_; }

    /// I_{k,l}(t_i) = sum_j beta_j x_k(t_i + theta_j) conj(phi_l(theta_j)), i = 0..n_T;
    /// k = nullopt selects the fundamental solution.
    [[nodiscard]] std::vector<Complex> inner_integral(std::optional<int> k, int l) const;

    /// g, gp with W(row, col)(p) = sum_i e^{-p t_i} (g_i + p gp_i); gp is
    /// nonzero only on slope_nodes().
    void profile(int row, int col, std::vector<Complex>& g, std::vector<Complex>& gp) const;

    [[nodiscard]] const std::vector<int>& slope_nodes() const noexcept { return slope_nodes_; }

    [[nodiscard]] ComplexMatrix evaluate(Complex p) const;

    /// W(-nu0 + i(omega0 + q domega)), q = 0..count-1, by a chirp-z transform per entry.
    [[nodiscard]] std::vector<ComplexMatrix> evaluate_line(double nu0, double omega0, double domega,
                                                           int count, int threads) const;

private:
    struct Workspace;
    void inner_into(const Complex* f, int l, Workspace& ws, std::vector<Complex>& out) const;
    [[nodiscard]] Complex conj_u(int l, int j) const;

    struct DiagCorrection {
        int i;
        int j;
        double d;
    };
    struct JumpCorrection {
        int b;
        int j;
        double w;
    };
    /// w (e^{-pt} F)'(t_b) from the side given by `left`, on theta line j
    struct SlopeCorrection {
        int b;
        int j;
        double w;
        bool left;
    };

    const SolutionSet* tables_;
    Discretization g_;
    int m_;
    int N_;
    int dim_;
    std::vector<double> abar_;
    std::vector<double> beta_;
    std::vector<std::pair<int, double>> beta_local_;
    std::vector<DiagCorrection> diag_;
    std::vector<JumpCorrection> jumps_;
    std::vector<SlopeCorrection> slopes_;
    std::vector<int> slope_nodes_;
    double jump_weight_ = 0.0;
    std::vector<Complex> roots_;
    std::vector<std::vector<Complex>> inner_fund_;
};

/// W_{T,N}(p) by the configured path. For m >= 3 only PaperFaithful exists.
[[nodiscard]] ComplexMatrix build_WTN(const LinearDelaySystem& sys, const SchemeConfig& cfg, Complex p,
                                      const SolutionSet& tables);

/// Direct path on an explicit grid (n_T may be below the tables' horizon).
[[nodiscard]] ComplexMatrix paper_matrix(const SolutionSet& tables, const Discretization& grid, Complex p);

/// sigma_max(W) or min-eig((W + W*)/2) by constraint kind.
[[nodiscard]] double alpha_of(const ComplexMatrix& W, ConstraintKind kind);

[[nodiscard]] double alpha(const LinearDelaySystem& sys, const SchemeConfig& cfg, Complex p,
                           const SolutionSet& tables);

struct TailGap {
    /// ||W_T - W_{T/2}||_max
    double gap = 0.0;
    /// ||W_{T/2} - W_{T/4}||_max
    double gap_half = 0.0;
    /// fitted from the two gaps; NaN when a gap vanishes
    double decay_rate = 0.0;
};

[[nodiscard]] TailGap tail_gap(const LinearDelaySystem& sys, const SchemeConfig& cfg, Complex p,
                               const SolutionSet& tables);

/// Indices of the multi-indices for cutoff N_sub inside the list for N_full.
[[nodiscard]] std::vector<int> nested_indices(int m, int N_sub, int N_full);

}  // namespace cfreq
