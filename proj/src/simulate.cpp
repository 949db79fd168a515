#include "quakeml/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "quakeml/errors.hpp"
#include "quakeml/hypothesis.hpp"
#include "quakeml/stats.hpp"

namespace quakeml {

namespace {

std::string phone_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%04zu", i);
    return buf;
}

std::vector<Trigger> sorted_stream(std::vector<Trigger> triggers) {
    std::stable_sort(triggers.begin(), triggers.end(),
                     [](const Trigger& a, const Trigger& b) {
                         return a.time_s < b.time_s;
                     });
    return triggers;
}

}  // namespace

std::vector<Smartphone> generate_network(const NetworkSpec& spec, Rng& rng) {
    if (spec.count < 1 || spec.lat_lo > spec.lat_hi || spec.lon_lo > spec.lon_hi)
        throw InvalidInput("generate_network: invalid network spec");
    std::vector<Smartphone> out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        Smartphone p;
        p.id = phone_id(i);
        p.location.lat = rng.uniform(spec.lat_lo, spec.lat_hi);
        p.location.lon = rng.uniform(spec.lon_lo, spec.lon_hi);
        p.active = true;
        out.push_back(std::move(p));
    }
    return out;
}

TrueEventDraw generate_true_event(std::span<const Smartphone> network,
                                  const TrueEventSpec& ev, Rng& rng) {
    // Epicentre uniform over the network's bounding box.
    double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 360.0, lon_hi = -360.0;
    for (const auto& p : network) {
        lat_lo = std::min(lat_lo, p.location.lat);
        lat_hi = std::max(lat_hi, p.location.lat);
        lon_lo = std::min(lon_lo, p.location.lon);
        lon_hi = std::max(lon_hi, p.location.lon);
    }
    TrueEventDraw draw;
    draw.truth.epicentre.lat = rng.uniform(lat_lo, lat_hi);
    draw.truth.epicentre.lon = rng.uniform(lon_lo, lon_hi);
    draw.truth.depth_km = rng.uniform(ev.depth_min_km, ev.depth_max_km);
    draw.truth.t_origin_s = ev.t_origin_s;

    const double noise_sd = std::sqrt(ev.noise_variance);
    draw.stream.reserve(network.size());
    for (const auto& p : network) {
        if (rng.bernoulli(ev.p_triggering)) {
            const double d = epicentral_distance(draw.truth.epicentre, p.location);
            const double hypo = hypocentral_distance(d, draw.truth.depth_km);
            const double t =
                expected_trigger_time(hypo, ev.v, draw.truth.t_origin_s) +
                rng.normal(0.0, noise_sd);
            draw.stream.push_back({p.id, p.location, t});
        } else if (rng.bernoulli(ev.p_spurious)) {
            draw.stream.push_back(
                {p.id, p.location, rng.uniform(ev.spurious_lo_s, ev.spurious_hi_s)});
        }
    }
    draw.stream = sorted_stream(std::move(draw.stream));
    return draw;
}

std::vector<Trigger> generate_false_event(std::span<const Smartphone> network,
                                          const FalseEventSpec& ev, Rng& rng) {
    std::vector<Trigger> triggers;
    for (const auto& p : network)
        if (rng.bernoulli(ev.p_triggering))
            triggers.push_back(
                {p.id, p.location, rng.uniform(ev.window_lo_s, ev.window_hi_s)});
    return sorted_stream(std::move(triggers));
}

std::optional<TrueSimulation> simulate_true_detection(
    std::span<const Smartphone> network, const TrueEventSpec& ev,
    const DetectorConfig& det, Rng& rng) {
    auto draw = generate_true_event(network, ev, rng);
    auto detection = detect(draw.stream, network, det);
    if (!detection) return std::nullopt;
    return TrueSimulation{std::move(*detection), draw.truth};
}

std::optional<Detection> simulate_false_detection(
    std::span<const Smartphone> network, const FalseEventSpec& ev,
    const DetectorConfig& det, Rng& rng) {
    auto stream = generate_false_event(network, ev, rng);
    return detect(stream, network, det);
}

CalibratedDelta calibrate_delta(std::span<const VarianceSample> samples,
                                double alpha, double floor) {
    if (samples.size() < 100)
        throw InsufficientData("calibrate_delta: need >= 100 samples (got " +
                               std::to_string(samples.size()) + ")");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidInput("calibrate_delta: alpha must lie in (0, 1)");

    const double total = static_cast<double>(samples.size());
    std::vector<double> criticals;
    criticals.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.n < 4)
            throw InvalidInput("calibrate_delta: sample with n < 4");
        criticals.push_back(chi_square_quantile(1.0 - alpha, s.n - 3));
    }

    auto rejection_rate = [&](double delta) {
        std::size_t rejected = 0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (test_statistic(samples[i].sigma2, samples[i].n, delta) >
                criticals[i])
                ++rejected;
        return static_cast<double>(rejected) / total;
    };

    double hi = floor;
    for (const auto& s : samples)
        hi = std::max(hi, static_cast<double>(s.n - 3) * s.sigma2);
    hi = std::max(hi, 1.0);

    if (rejection_rate(floor) <= alpha)
        return {floor, true};  // all variances (near) zero

    double lo = floor;  // rate(lo) > alpha, rate(hi) <= alpha
    while ((hi - lo) > 1e-4 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (rejection_rate(mid) <= alpha) hi = mid; else lo = mid;
    }
    return {hi, false};
}

QuartileSummary summarize(std::vector<double> values) {
    QuartileSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= values.size()) return values.back();
        return values[i] * (1.0 - frac) + values[i + 1] * frac;
    };
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    return s;
}

CalibrationResult run_calibration(const CalibrationConfig& cfg) {
    if (cfg.replications < 100)
        throw InsufficientData("run_calibration: insufficient replications (" +
                               std::to_string(cfg.replications) + " < 100)");

    Rng net_rng(derive_seed(cfg.seed, 0));
    const auto network = generate_network(cfg.network, net_rng);

    CalibrationResult out;
    std::vector<VarianceSample> primary_samples;
    struct TrueRecord {
        std::size_t n;
        double sigma2_primary, sigma2_secondary;
        double epi_err_km, depth_err_km;
    };
    std::vector<TrueRecord> true_records;
    struct FalseRecord {
        std::size_t n;
        double sigma2_primary, sigma2_secondary;
    };
    std::vector<FalseRecord> false_records;

    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
        Rng rng(derive_seed(cfg.seed, 1, rep));
        auto sim = simulate_true_detection(network, cfg.true_event, cfg.detector, rng);
        if (!sim || sim->detection.triggers.size() < 4) continue;

        EstimatorConfig est = cfg.estimator;
        est.seed = derive_seed(cfg.seed, 2, rep);
        const auto& triggers = sim->detection.triggers;
        const auto fit_p = estimate_hypocenter(triggers, cfg.primary, est);
        const auto fit_s = estimate_hypocenter(triggers, cfg.secondary, est);

        TrueRecord rec;
        rec.n = triggers.size();
        rec.sigma2_primary = fit_p.sigma2;
        rec.sigma2_secondary = fit_s.sigma2;
        rec.epi_err_km = epicentral_distance(sim->truth.epicentre,
                                             fit_p.hypocenter.epicentre);
        rec.depth_err_km = std::fabs(sim->truth.depth_km - fit_p.hypocenter.depth_km);
        true_records.push_back(rec);
        primary_samples.push_back({fit_p.sigma2, rec.n});
        out.sigma2_true.push_back(fit_p.sigma2);
        out.epicentre_errors_km.push_back(rec.epi_err_km);
        out.depth_errors_km.push_back(rec.depth_err_km);
    }

    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
        Rng rng(derive_seed(cfg.seed, 3, rep));
        auto det = simulate_false_detection(network, cfg.false_event, cfg.detector, rng);
        if (!det || det->triggers.size() < 4) continue;

        EstimatorConfig est = cfg.estimator;
        est.seed = derive_seed(cfg.seed, 4, rep);
        const auto fit_p = estimate_hypocenter(det->triggers, cfg.primary, est);
        const auto fit_s = estimate_hypocenter(det->triggers, cfg.secondary, est);
        false_records.push_back({det->triggers.size(), fit_p.sigma2, fit_s.sigma2});
        out.sigma2_false.push_back(fit_p.sigma2);
    }

    auto calibrated = calibrate_delta(primary_samples, cfg.alpha);

    auto both_reject = [&](std::size_t n, double s2p, double s2s, double delta) {
        const double crit = chi_square_quantile(1.0 - cfg.alpha, n - 3);
        return test_statistic(s2p, n, delta) > crit &&
               test_statistic(s2s, n, delta) > crit;
    };

    std::size_t t1 = 0;
    for (const auto& r : true_records)
        if (both_reject(r.n, r.sigma2_primary, r.sigma2_secondary, calibrated.delta))
            ++t1;
    std::size_t t2 = 0;
    for (const auto& r : false_records)
        if (!both_reject(r.n, r.sigma2_primary, r.sigma2_secondary, calibrated.delta))
            ++t2;

    auto& rep = out.report;
    rep.delta = calibrated.delta;
    rep.delta_floored = calibrated.floored;
    rep.type1 = true_records.empty()
                    ? 0.0
                    : static_cast<double>(t1) / static_cast<double>(true_records.size());
    rep.type2 = false_records.empty()
                    ? 0.0
                    : static_cast<double>(t2) / static_cast<double>(false_records.size());
    rep.epicentre_error_km = summarize(out.epicentre_errors_km);
    rep.depth_error_km = summarize(out.depth_errors_km);
    rep.replications = cfg.replications;
    rep.true_detected = true_records.size();
    rep.false_detected = false_records.size();
    rep.seed = cfg.seed;
    return out;
}

}  // namespace quakeml
