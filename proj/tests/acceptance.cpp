// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned here, not computed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "quakeml/estimation.hpp"
#include "quakeml/hypothesis.hpp"
#include "quakeml/rng.hpp"
#include "quakeml/simulate.hpp"
#include "quakeml/stats.hpp"

using namespace quakeml;

namespace {

int failures = 0;

void report(int criterion, bool pass, const char* what, const std::string& detail) {
    std::printf("criterion %d: %s — %s (%s)\n", criterion, pass ? "PASS" : "FAIL",
                what, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// --- criterion 1: chi-square critical values ------------------------------
void criterion1() {
    const double q18 = chi_square_quantile(0.99, 18);
    const double q105 = chi_square_quantile(0.99, 105);
    const bool pass =
        std::fabs(q18 - 34.80) <= 0.01 && std::fabs(q105 - 141.62) <= 0.01;
    report(1, pass, "chi-square critical values 34.80 / 141.62 within 0.01",
           fmt("q(0.99,18)=%.4f q(0.99,105)=%.4f", q18, q105));
}

// --- criterion 2: test-statistic arithmetic -------------------------------
void criterion2() {
    const double t1 = test_statistic(0.57, 21, 0.6);
    const double t2 = test_statistic(1.03, 21, 0.6);
    const bool pass = std::fabs(t1 - 17.1) <= 0.2 && std::fabs(t2 - 30.9) <= 0.2;
    report(2, pass, "T(0.57,21,0.6) and T(1.03,21,0.6) within 0.2 of 17.1 / 30.9",
           fmt("T1=%.3f T2=%.3f", t1, t2));
}

// --- criterion 3: large spurious detection rejects at both speeds ---------
void criterion3() {
    // 108 triggers with times unrelated to any travel-time field must be
    // rejected under both wave-speed hypotheses almost always
    const int reps = 200;
    int both = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(300, static_cast<std::uint64_t>(r)));
        std::vector<Trigger> tr;
        for (int i = 0; i < 108; ++i)
            tr.push_back({"a" + std::to_string(i),
                          {rng.uniform(-12.39, -11.74), rng.uniform(-77.17, -76.66)},
                          rng.uniform(0.0, 12.0)});
        EstimatorConfig cfg;
        cfg.seed = derive_seed(301, static_cast<std::uint64_t>(r));
        const auto cls = classify(tr, TestSpec{}, cfg);
        if (cls.primary_test.rejected && cls.secondary_test.rejected) ++both;
    }
    const double rate = static_cast<double>(both) / reps;
    report(3, rate >= 0.99,
           "n=108 uniform-time detections reject at both speeds in >= 99% of 200 runs",
           fmt("rate=%.3f (%d/%d)", rate, both, reps));
}

// --- criterion 4: full-scale calibration study ----------------------------
void criterion4() {
    CalibrationConfig cfg;  // all defaults: 1000 phones, 1000+1000 reps
    cfg.seed = 20260823;
    const auto res = run_calibration(cfg);
    const auto& rep = res.report;

    const bool delta_ok = rep.delta >= 0.45 && rep.delta <= 0.75;
    const bool type2_ok = rep.type2 <= 0.05;
    const bool epi_ok = rep.epicentre_error_km.median >= 8.0 &&
                        rep.epicentre_error_km.median <= 28.0;
    const bool depth_ok =
        rep.depth_error_km.median >= 8.0 && rep.depth_error_km.median <= 28.0;
    report(4, delta_ok && type2_ok && epi_ok && depth_ok,
           "calibrated delta in [0.45,0.75], type II <= 0.05, median errors in [8,28] km",
           fmt("delta=%.3f [%s] type2=%.4f [%s] epi_med=%.1f km [%s] "
               "depth_med=%.1f km [%s]",
               rep.delta, delta_ok ? "ok" : "OUT", rep.type2,
               type2_ok ? "ok" : "OUT", rep.epicentre_error_km.median,
               epi_ok ? "ok" : "OUT", rep.depth_error_km.median,
               depth_ok ? "ok" : "OUT"));
}

// --- criterion 5: multi-start vs dense grid oracle ------------------------
void criterion5() {
    const WaveSpeed v = WaveSpeed::primary();
    int ok = 0;
    double worst_gap = -1e9;
    for (int inst = 0; inst < 20; ++inst) {
        Rng rng(derive_seed(500, static_cast<std::uint64_t>(inst)));
        const std::size_t n = 5 + rng.next_u64() % 4;  // 5..8
        Hypocenter truth{{-12.0 + rng.uniform(-0.2, 0.2),
                          -77.0 + rng.uniform(-0.2, 0.2)},
                         rng.uniform(0.0, 100.0), 0.0};
        std::vector<Trigger> tr;
        for (std::size_t i = 0; i < n; ++i) {
            GeoPoint p{-12.0 + rng.uniform(-0.3, 0.3),
                       -77.0 + rng.uniform(-0.3, 0.3)};
            const double d = epicentral_distance(truth.epicentre, p);
            const double t =
                expected_trigger_time(hypocentral_distance(d, truth.depth_km), v,
                                      0.0) +
                rng.normal(0.0, 0.5);
            tr.push_back({"g" + std::to_string(i), p, t});
        }

        EstimatorConfig cfg;
        cfg.seed = derive_seed(501, static_cast<std::uint64_t>(inst));
        const auto fit = estimate_hypocenter(tr, v, cfg);

        // dense grid over the same search region: trigger bbox +- 1 degree,
        // 0.01 degree surface mesh, 1 km depth mesh
        double lat_lo = 90, lat_hi = -90, lon_lo = 360, lon_hi = -360;
        for (const auto& t : tr) {
            lat_lo = std::min(lat_lo, t.location.lat);
            lat_hi = std::max(lat_hi, t.location.lat);
            lon_lo = std::min(lon_lo, t.location.lon);
            lon_hi = std::max(lon_hi, t.location.lon);
        }
        lat_lo -= 1.0; lat_hi += 1.0; lon_lo -= 1.0; lon_hi += 1.0;

        std::vector<GeoPointRad> pts;
        std::vector<double> times;
        for (const auto& t : tr) {
            pts.emplace_back(t.location);
            times.push_back(t.time_s);
        }
        const double R = kEarthRadiusKm;
        double grid_best = std::numeric_limits<double>::infinity();
        std::vector<double> s2(n);  // sin^2(D/2R) per trigger, fixed per surface node
        for (double lat = lat_lo; lat <= lat_hi + 1e-9; lat += 0.01)
            for (double lon = lon_lo; lon <= lon_hi + 1e-9; lon += 0.01) {
                const GeoPointRad e(GeoPoint{lat, lon});
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = epicentral_distance_fast(pts[i], e);
                    const double s = std::sin(d / (2.0 * R));
                    s2[i] = s * s;
                }
                for (double dep = 0.0; dep <= 100.0 + 1e-9; dep += 1.0) {
                    double sum = 0.0, sq = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double hyp =
                            std::sqrt(dep * dep + 4.0 * R * (R - dep) * s2[i]);
                        const double dt = times[i] - hyp / v.v_kms;
                        sum += dt;
                        sq += dt * dt;
                    }
                    const double sse = sq - sum * sum / static_cast<double>(n);
                    grid_best = std::min(grid_best, sse);
                }
            }
        const double gap = fit.objective - grid_best;
        worst_gap = std::max(worst_gap, gap);
        if (gap <= 1e-6) ++ok;
    }
    report(5, ok == 20,
           "multi-start SSE <= dense-grid SSE + 1e-6 on 20 small instances",
           fmt("ok=%d/20 worst_gap=%.3g s^2", ok, worst_gap));
}

// --- criterion 6: zero-noise self-consistency -----------------------------
void criterion6() {
    NetworkSpec nspec;  // default 1000-phone uniform network
    Rng net_rng(derive_seed(600, 0));
    const auto network = generate_network(nspec, net_rng);
    TrueEventSpec ev;
    ev.noise_variance = 0.0;
    ev.p_spurious = 0.0;
    int ok = 0;
    double worst_epi = 0.0, worst_depth = 0.0;
    for (int r = 0; r < 100; ++r) {
        Rng rng(derive_seed(601, static_cast<std::uint64_t>(r)));
        const auto sim = simulate_true_detection(network, ev, DetectorConfig{}, rng);
        if (!sim || sim->detection.triggers.size() < 4) continue;
        EstimatorConfig cfg;
        cfg.seed = derive_seed(602, static_cast<std::uint64_t>(r));
        const auto fit = estimate_hypocenter(sim->detection.triggers,
                                             WaveSpeed::primary(), cfg);
        const double epi_err =
            epicentral_distance(fit.hypocenter.epicentre, sim->truth.epicentre);
        const double depth_err =
            std::fabs(fit.hypocenter.depth_km - sim->truth.depth_km);
        worst_epi = std::max(worst_epi, epi_err);
        worst_depth = std::max(worst_depth, depth_err);
        if (epi_err < 1.0 && depth_err < 2.0) ++ok;
    }
    report(6, ok == 100,
           "zero-noise events recovered within 1 km / 2 km in 100/100 runs",
           fmt("ok=%d/100 worst_epi=%.3f km worst_depth=%.3f km", ok, worst_epi,
               worst_depth));
}

// --- criterion 7: classification speed at n = 108 -------------------------
void criterion7() {
    Rng rng(700);
    std::vector<Trigger> tr;
    for (int i = 0; i < 108; ++i)
        tr.push_back({"t" + std::to_string(i),
                      {rng.uniform(-12.39, -11.74), rng.uniform(-77.17, -76.66)},
                      rng.uniform(0.0, 12.0)});
    EstimatorConfig cfg;
    cfg.seed = 701;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cls = classify(tr, TestSpec{}, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count();
    (void)cls;
    report(7, sec < 1.0, "classification of 108 triggers at both speeds in < 1 s",
           fmt("%.3f s", sec));
}

// --- criterion 8: property suites, 1000 cases each ------------------------
void criterion8() {
    int violations = 0;

    // shift invariance of the objective
    {
        Rng rng(800);
        for (int c = 0; c < 1000; ++c) {
            std::vector<Trigger> tr;
            const std::size_t n = 4 + rng.next_u64() % 12;
            for (std::size_t i = 0; i < n; ++i)
                tr.push_back({"",
                              {-12.0 + rng.uniform(-0.4, 0.4),
                               -77.0 + rng.uniform(-0.4, 0.4)},
                              rng.uniform(0.0, 20.0)});
            Hypocenter h{{-12.0 + rng.uniform(-0.4, 0.4),
                          -77.0 + rng.uniform(-0.4, 0.4)},
                         rng.uniform(0.0, 100.0), 0.0};
            const double base = centered_sse(h, tr, WaveSpeed::primary());
            auto shifted = tr;
            const double shift = rng.uniform(-1000.0, 1000.0);
            for (auto& t : shifted) t.time_s += shift;
            const double after = centered_sse(h, shifted, WaveSpeed::primary());
            if (std::fabs(after - base) > 1e-7 * (1.0 + base)) ++violations;
        }
    }

    // determinism of the full fit under a fixed seed
    {
        Rng rng(801);
        for (int c = 0; c < 1000; ++c) {
            std::vector<Trigger> tr;
            for (int i = 0; i < 6; ++i)
                tr.push_back({"",
                              {-12.0 + rng.uniform(-0.4, 0.4),
                               -77.0 + rng.uniform(-0.4, 0.4)},
                              rng.uniform(0.0, 20.0)});
            EstimatorConfig cfg;
            cfg.seed = rng.next_u64();
            cfg.restarts = 3;  // keep the 1000-case loop quick
            const auto a = estimate_hypocenter(tr, WaveSpeed::primary(), cfg);
            const auto b = estimate_hypocenter(tr, WaveSpeed::primary(), cfg);
            if (a.hypocenter.epicentre.lat != b.hypocenter.epicentre.lat ||
                a.hypocenter.epicentre.lon != b.hypocenter.epicentre.lon ||
                a.hypocenter.depth_km != b.hypocenter.depth_km ||
                a.sigma2 != b.sigma2)
                ++violations;
        }
    }

    // monotonicity: T in sigma2 and the chi-square quantile in p
    {
        Rng rng(802);
        for (int c = 0; c < 1000; ++c) {
            const std::size_t n = 4 + rng.next_u64() % 100;
            const double delta = 0.1 + rng.uniform01() * 2.0;
            const double s2a = rng.uniform01() * 3.0;
            const double s2b = s2a + 0.1 + rng.uniform01();
            if (!(test_statistic(s2b, n, delta) > test_statistic(s2a, n, delta)))
                ++violations;
            const double pa = 0.01 + rng.uniform01() * 0.8;
            const double pb = pa + 0.01 + rng.uniform01() * (0.99 - pa - 0.01);
            if (!(chi_square_quantile(pb, n - 3) > chi_square_quantile(pa, n - 3)))
                ++violations;
        }
    }

    report(8, violations == 0,
           "shift-invariance, determinism, monotonicity: 1000 cases each",
           fmt("violations=%d", violations));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (failures > 0) {
        std::printf("acceptance: %d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
