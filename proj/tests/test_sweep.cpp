#include "cfreq/error.hpp"
#include "cfreq/report.hpp"
#include "cfreq/spectrum.hpp"
#include "cfreq/sweep.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>

using namespace cfreq;

namespace {

SchemeConfig small_cfg() {
    SchemeConfig c;
    c.m = 2;
    c.N = 4;
    c.T = 8.0;
    c.h = 1.0 / 200;
    c.Omega = 10.0;
    c.omega_step = 0.25;
    return c;
}

LinearDelaySystem ss_preset() {
    return suarez_schopf_system({0.6, 0.83, ss_attractor_radius(0.6, 0.83)});
}

LinearDelaySystem mg_preset(double tau = 4.5) { return mackey_glass_system({0.1, 0.2, 10.0, tau}); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("precondition examples") {
    SchemeConfig c = small_cfg();
    const auto ss = check_precondition(ss_preset(), c);
    CHECK(ss.ok);
    CHECK(ss.spectral_bound == Catch::Approx(-1.78).margin(0.02));
    REQUIRE(ss.leading.size() == 2);
    const auto mg = check_precondition(mg_preset(), c);
    CHECK(mg.ok);
    CHECK(mg.spectral_bound == Catch::Approx(-1.98).margin(0.02));

    LinearDelaySystem up;
    up.a0 = 0.5;
    up.a1 = 0.0;
    up.tau = 1.0;
    c.m = 1;
    const auto bad = check_precondition(up, c);
    CHECK_FALSE(bad.ok);
    CHECK(bad.spectral_bound == Catch::Approx(0.5));
}

TEST_CASE("failed precondition skips the sweep") {
    LinearDelaySystem up;
    up.a0 = 0.5;
    up.a1 = -0.2;
    up.tau = 1.0;
    up.lambda_bound = 1.0;
    SchemeConfig c = small_cfg();
    c.m = 1;
    const auto rep = frequency_sweep(up, c);
    CHECK(rep.verdict == Verdict::PreconditionFailed);
    CHECK(rep.alphas.empty());
    CHECK(rep.spectral_bound > -0.01);
}

TEST_CASE("omega grid") {
    SchemeConfig c = small_cfg();
    const auto w = omega_grid(c);
    REQUIRE(w.size() == 81);
    CHECK(w.front() == -10.0);
    CHECK(w[40] == 0.0);
    CHECK(w.back() == 10.0);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == -w[w.size() - 1 - i]);
}

TEST_CASE("sweep on the presets: mirror consistency and verdict bookkeeping") {
    SchemeConfig c = small_cfg();
    for (const LinearDelaySystem& sys : {ss_preset(), mg_preset()}) {
        const auto rep = frequency_sweep(sys, c);
        CHECK(rep.verdict == Verdict::Satisfied);
        CHECK(rep.threshold == Catch::Approx(1.0 / sys.lambda_bound));
        CHECK(rep.margin == Catch::Approx(rep.threshold - rep.critical_alpha));
        CHECK(rep.critical_alpha == *std::max_element(rep.alphas.begin(), rep.alphas.end()));
        CHECK(rep.outer_band_extreme <= rep.critical_alpha);
        CHECK(rep.outer_band_extreme > 0.0);
        CHECK(rep.tail_gap_at_argmax >= 0.0);
        CHECK(rep.grid.n_T % 2 == 0);

        SchemeConfig nm = c;
        nm.mirror = false;
        const auto full = frequency_sweep(sys, nm);
        const std::size_t K = full.alphas.size() / 2;
        double pos = 0.0, neg = 0.0, sym = 0.0;
        for (std::size_t q = 0; q <= K; ++q) {
            neg = std::max(neg, full.alphas[q]);
            pos = std::max(pos, full.alphas[K + q]);
            sym = std::max(sym, std::abs(full.alphas[K - q] - full.alphas[K + q]));
        }
        CHECK(std::abs(pos - neg) <= 1e-10 * pos);
        CHECK(sym <= 1e-10 * pos);
        CHECK(sup_diff(rep.alphas, full.alphas) <= 1e-10 * pos);
    }
}

TEST_CASE("paper path sweep agrees with the reordered path") {
    SchemeConfig c = small_cfg();
    c.N = 2;
    c.Omega = 3.0;
    c.omega_step = 0.5;
    c.T = 4.0;
    c.h = 1.0 / 100;
    const auto fast = frequency_sweep(mg_preset(), c);
    c.path = SchemePath::PaperFaithful;
    const auto paper = frequency_sweep(mg_preset(), c);
    CHECK(sup_diff(fast.alphas, paper.alphas) < 1e-10);
}

TEST_CASE("identical configs give bit-identical reports") {
    SchemeConfig c = small_cfg();
    c.threads = 3;
    const auto a = frequency_sweep(ss_preset(), c);
    c.threads = 1;
    const auto b = frequency_sweep(ss_preset(), c);
    CHECK(a.alphas == b.alphas);
    CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("verdict is monotone in the sector bound") {
    SchemeConfig c = small_cfg();
    LinearDelaySystem sys = mg_preset();
    Verdict prev = Verdict::Satisfied;
    std::vector<double> first;
    for (double lam : {0.5, 1.0, 1.36125, 2.0, 3.0, 5.0, 8.0, 20.0}) {
        sys.lambda_bound = lam;
        const auto rep = frequency_sweep(sys, c);
        if (first.empty()) first = rep.alphas;
        CHECK(rep.alphas == first);
        if (prev == Verdict::Violated) CHECK(rep.verdict == Verdict::Violated);
        prev = rep.verdict;
    }
    CHECK(prev == Verdict::Violated);
}

TEST_CASE("monotone-sector form") {
    SchemeConfig c = small_cfg();
    LinearDelaySystem sys = mg_preset();
    sys.constraint_kind = ConstraintKind::MonotoneSector;
    const auto rep = frequency_sweep(sys, c);
    CHECK(rep.threshold == Catch::Approx(-1.0 / sys.lambda_bound));
    CHECK(rep.critical_alpha == *std::min_element(rep.alphas.begin(), rep.alphas.end()));
    CHECK(rep.margin == Catch::Approx(rep.critical_alpha + 1.0 / sys.lambda_bound));
    CHECK(rep.verdict == (rep.margin > 0.0 ? Verdict::Satisfied : Verdict::Violated));
}

TEST_CASE("convergence report: identical runs and projection monotonicity") {
    SchemeConfig c = small_cfg();
    const auto rep = convergence_report(mg_preset(), c, {1, 2, 2, 4}, {6.0, 8.0});
    REQUIRE(rep.curves.size() == 2);
    REQUIRE(rep.curves[0].size() == 4);
    for (std::size_t iT = 0; iT < 2; ++iT) {
        CHECK(rep.curves[iT][1] == rep.curves[iT][2]);
        for (std::size_t iN = 0; iN + 1 < 4; ++iN)
            for (std::size_t q = 0; q < rep.omegas.size(); ++q)
                CHECK(rep.curves[iT][iN][q] <= rep.curves[iT][iN + 1][q] + 1e-6);
    }
    bool saw_zero = false;
    for (const auto& d : rep.differences)
        if (d.N_a == 2 && d.N_b == 2 && d.T_a == d.T_b) {
            CHECK(d.sup_diff == 0.0);
            CHECK(d.stabilized);
            saw_zero = true;
        }
    CHECK(saw_zero);

    // nested curves match a direct sweep at the same (N, T)
    SchemeConfig d = c;
    d.N = 2;
    d.T = 6.0;
    CHECK(sup_diff(frequency_sweep(mg_preset(), d).alphas, rep.curves[0][1]) < 1e-12);

    CHECK_THROWS_AS(convergence_report(mg_preset(), c, {4, 2}, {8.0}), Error);
    CHECK_THROWS_AS(convergence_report(mg_preset(), c, {}, {8.0}), Error);
}

TEST_CASE("region scan: skipped and evaluated points") {
    SchemeConfig c = small_cfg();
    c.N = 2;
    SsGrid ss;
    ss.alphas = {0.6};
    ss.taus = {0.9, 1.2};
    ss.tau_as_fraction = true;
    std::atomic<int> calls{0};
    const auto pts = region_scan(ss, c, [&](std::size_t, std::size_t total) {
        CHECK(total == 2);
        ++calls;
    });
    REQUIRE(pts.size() == 2);
    CHECK(calls == 2);
    CHECK(pts[0].status == ScanStatus::Evaluated);
    CHECK(pts[0].verdict == Verdict::Satisfied);
    CHECK(pts[0].params.at("tau") == Catch::Approx(0.75));
    CHECK(pts[1].status == ScanStatus::Skipped);
    CHECK_FALSE(pts[1].message.empty());

    MgGrid mg;
    mg.taus = {1.0, 4.5};
    const auto mp = region_scan(mg, c);
    REQUIRE(mp.size() == 2);
    for (const auto& p : mp) {
        CHECK(p.status == ScanStatus::Evaluated);
        CHECK(p.verdict == Verdict::Satisfied);
    }
    const auto js = to_json(mp);
    CHECK(js.size() == 2);
}

TEST_CASE("progress callback reaches the total") {
    SchemeConfig c = small_cfg();
    std::atomic<std::size_t> last{0}, total{0};
    std::atomic<int> calls{0};
    (void)frequency_sweep(mg_preset(), c, [&](std::size_t done, std::size_t t) {
        ++calls;
        total = t;
        std::size_t prev = last.load();
        while (done > prev && !last.compare_exchange_weak(prev, done)) {
        }
    });
    CHECK(calls > 0);
    CHECK(last == total);
}

TEST_CASE("configuration errors") {
    SchemeConfig c = small_cfg();
    c.m = 3;
    CHECK_THROWS_AS(frequency_sweep(mg_preset(), c), Error);
    c = small_cfg();
    c.T = -1.0;
    CHECK_THROWS_AS(frequency_sweep(ss_preset(), c), Error);
    c = small_cfg();
    c.omega_step = 0.0;
    CHECK_THROWS_AS(frequency_sweep(ss_preset(), c), Error);
}
