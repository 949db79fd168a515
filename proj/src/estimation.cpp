#include "quakeml/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "quakeml/errors.hpp"
#include "quakeml/nelder_mead.hpp"
#include "quakeml/rng.hpp"
#include "quakeml/stats.hpp"

namespace quakeml {

namespace {

// Radian-space copy of the trigger list for the inner optimization loops.
struct Prepared {
    std::vector<GeoPointRad> points;
    std::vector<double> times;

    explicit Prepared(std::span<const Trigger> triggers) {
        points.reserve(triggers.size());
        times.reserve(triggers.size());
        for (const auto& t : triggers) {
            points.emplace_back(t.location);
            times.push_back(t.time_s);
        }
    }
};

double centered_sse_prepared(const Prepared& prep, double lat, double lon,
                             double depth_km, double v_kms,
                             std::vector<double>& scratch) {
    const std::size_t n = prep.points.size();
    scratch.resize(n);
    const GeoPointRad e(GeoPoint{lat, lon});
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = epicentral_distance_fast(prep.points[i], e);
        const double s = std::sin(d / (2.0 * kEarthRadiusKm));
        const double hypo = std::sqrt(depth_km * depth_km +
                                      4.0 * kEarthRadiusKm * (kEarthRadiusKm - depth_km) * s * s);
        scratch[i] = prep.times[i] - hypo / v_kms;
        sum += scratch[i];
    }
    const double mean = sum / static_cast<double>(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = scratch[i] - mean;
        sse += c * c;
    }
    return sse;
}

struct SearchBox {
    double lat_lo, lat_hi, lon_lo, lon_hi, depth_lo, depth_hi;
};

SearchBox make_search_box(std::span<const Trigger> triggers,
                          const EstimatorConfig& cfg) {
    double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 360.0, lon_hi = -360.0;
    for (const auto& t : triggers) {
        lat_lo = std::min(lat_lo, t.location.lat);
        lat_hi = std::max(lat_hi, t.location.lat);
        lon_lo = std::min(lon_lo, t.location.lon);
        lon_hi = std::max(lon_hi, t.location.lon);
    }
    SearchBox box;
    box.lat_lo = std::max(-90.0, lat_lo - cfg.box_margin_deg);
    box.lat_hi = std::min(90.0, lat_hi + cfg.box_margin_deg);
    box.lon_lo = lon_lo - cfg.box_margin_deg;
    box.lon_hi = lon_hi + cfg.box_margin_deg;
    box.depth_lo = cfg.depth_min_km;
    box.depth_hi = cfg.depth_max_km;
    return box;
}

std::array<double, 3> clamp_to_box(const std::array<double, 3>& x,
                                   const SearchBox& box) {
    return {std::clamp(x[0], box.lat_lo, box.lat_hi),
            std::clamp(x[1], box.lon_lo, box.lon_hi),
            std::clamp(x[2], box.depth_lo, box.depth_hi)};
}

bool coincident_locations(std::span<const Trigger> triggers) {
    for (const auto& t : triggers)
        if (t.location.lat != triggers[0].location.lat ||
            t.location.lon != triggers[0].location.lon)
            return false;
    return true;
}

// 3x3 symmetric inverse by adjugate; returns false when the matrix is
// numerically singular.
bool invert3(const std::array<std::array<double, 3>, 3>& m,
             std::array<std::array<double, 3>, 3>& inv) {
    const double a = m[0][0], b = m[0][1], c = m[0][2];
    const double d = m[1][1], e = m[1][2], f = m[2][2];
    const double det = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
    double scale = 0.0;
    for (const auto& row : m)
        for (double x : row) scale = std::max(scale, std::fabs(x));
    if (!(std::fabs(det) > 1e-12 * scale * scale * scale) || scale == 0.0)
        return false;
    inv[0][0] = (d * f - e * e) / det;
    inv[0][1] = inv[1][0] = (c * e - b * f) / det;
    inv[0][2] = inv[2][0] = (b * e - c * d) / det;
    inv[1][1] = (a * f - c * c) / det;
    inv[1][2] = inv[2][1] = (c * b - a * e) / det;
    inv[2][2] = (a * d - b * b) / det;
    return true;
}

}  // namespace

double centered_sse(const Hypocenter& h, std::span<const Trigger> triggers,
                    const WaveSpeed& v) {
    if (triggers.empty())
        throw InvalidInput("centered_sse: empty trigger list");
    if (!(v.v_kms > 0.0))
        throw InvalidInput("centered_sse: wave speed must be positive");
    Prepared prep(triggers);
    std::vector<double> scratch;
    return centered_sse_prepared(prep, h.epicentre.lat, h.epicentre.lon,
                                 h.depth_km, v.v_kms, scratch);
}

ResidualSet residuals_at(const Hypocenter& h, std::span<const Trigger> triggers,
                         const WaveSpeed& v) {
    ResidualSet out;
    out.deltas_s.reserve(triggers.size());
    double sum = 0.0;
    for (const auto& t : triggers) {
        const double d = epicentral_distance(h.epicentre, t.location);
        const double hypo = hypocentral_distance(d, h.depth_km);
        const double delta = t.time_s - expected_trigger_time(hypo, v, h.t_origin_s);
        out.deltas_s.push_back(delta);
        sum += delta;
    }
    out.mean_s = triggers.empty() ? 0.0 : sum / static_cast<double>(triggers.size());
    return out;
}

double estimate_variance(const ResidualSet& residuals, std::size_t n) {
    if (n < 1 || residuals.deltas_s.size() != n)
        throw InvalidInput("estimate_variance: n must match the residual count and be >= 1");
    double sse = 0.0;
    for (double d : residuals.deltas_s) {
        const double c = d - residuals.mean_s;
        sse += c * c;
    }
    return sse / static_cast<double>(n);
}

double log_likelihood(double sigma2, const ResidualSet& residuals) {
    if (!(sigma2 > 0.0))
        throw InvalidInput("log_likelihood: sigma2 must be positive");
    const double n = static_cast<double>(residuals.deltas_s.size());
    double sse = 0.0;
    for (double d : residuals.deltas_s) {
        const double c = d - residuals.mean_s;
        sse += c * c;
    }
    constexpr double ln_2pi = 1.83787706640934548356;
    return -0.5 * n * ln_2pi - 0.5 * n * std::log(sigma2) - sse / (2.0 * sigma2);
}

FitResult estimate_hypocenter(std::span<const Trigger> triggers,
                              const WaveSpeed& v, const EstimatorConfig& cfg) {
    if (triggers.size() < 4)
        throw InsufficientData("estimate_hypocenter: need at least 4 triggers (n=" +
                               std::to_string(triggers.size()) + " < 4)");
    if (cfg.restarts < 1)
        throw InvalidInput("estimate_hypocenter: restarts must be >= 1");
    if (!(cfg.depth_min_km <= cfg.depth_max_km))
        throw InvalidInput("estimate_hypocenter: depth bounds out of order");

    const SearchBox box = make_search_box(triggers, cfg);
    Prepared prep(triggers);
    std::vector<double> scratch;

    FitResult fit;

    if (coincident_locations(triggers)) {
        // Every candidate hypocentre yields identical residuals; the
        // epicentre is pinned at the common location and depth carries no
        // information.
        fit.hypocenter.epicentre = triggers[0].location;
        fit.hypocenter.depth_km = cfg.depth_min_km;
        fit.objective = centered_sse(fit.hypocenter, triggers, v);
        fit.residuals = residuals_at(fit.hypocenter, triggers, v);
        fit.sigma2 = estimate_variance(fit.residuals, triggers.size());
        fit.degenerate = true;
        fit.converged = true;
        fit.conf_intervals = hessian_confidence(fit, triggers, v, cfg,
                                                cfg.confidence_level);
        fit.log_likelihood = fit.sigma2 > 0.0
                                 ? log_likelihood(fit.sigma2, fit.residuals)
                                 : std::numeric_limits<double>::infinity();
        return fit;
    }

    auto objective = [&](const std::array<double, 3>& x) {
        const auto c = clamp_to_box(x, box);
        return centered_sse_prepared(prep, c[0], c[1], c[2], v.v_kms, scratch);
    };

    const std::array<double, 3> extent = {
        std::max(box.lat_hi - box.lat_lo, 1e-3),
        std::max(box.lon_hi - box.lon_lo, 1e-3),
        std::max(box.depth_hi - box.depth_lo, 1e-3)};

    NelderMeadResult best;
    best.fmin = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(derive_seed(cfg.seed, 0x5e57a27ULL, static_cast<std::uint64_t>(r)));
        const std::array<double, 3> x0 = {rng.uniform(box.lat_lo, box.lat_hi),
                                          rng.uniform(box.lon_lo, box.lon_hi),
                                          rng.uniform(box.depth_lo, box.depth_hi)};
        const std::array<double, 3> step = {0.25 * extent[0], 0.25 * extent[1],
                                            0.25 * extent[2]};
        auto res = nelder_mead3(objective, x0, step, cfg.max_iterations,
                                cfg.tolerance);
        any_converged = any_converged || res.converged;
        if (res.fmin < best.fmin) best = res;  // strict <: ties keep lowest index
    }

    // Polish the winner with a small simplex; recovers resolution lost to
    // the coarse multi-start steps.
    {
        const std::array<double, 3> step = {1e-3 * extent[0], 1e-3 * extent[1],
                                            1e-3 * extent[2]};
        auto res = nelder_mead3(objective, best.x, step, cfg.max_iterations,
                                cfg.tolerance * 1e-2);
        if (res.fmin <= best.fmin) {
            res.converged = res.converged || best.converged;
            best = res;
        }
    }

    const auto xc = clamp_to_box(best.x, box);
    fit.hypocenter.epicentre = GeoPoint{xc[0], xc[1]};
    fit.hypocenter.depth_km = xc[2];
    fit.objective = std::max(best.fmin, 0.0);
    fit.converged = any_converged || best.converged;
    fit.restarts_used = cfg.restarts;
    fit.depth_at_bound =
        (box.depth_hi > box.depth_lo) &&
        (xc[2] - box.depth_lo < 1e-6 * extent[2] ||
         box.depth_hi - xc[2] < 1e-6 * extent[2]);

    fit.residuals = residuals_at(fit.hypocenter, triggers, v);
    fit.sigma2 = estimate_variance(fit.residuals, triggers.size());
    fit.log_likelihood = fit.sigma2 > 0.0
                             ? log_likelihood(fit.sigma2, fit.residuals)
                             : std::numeric_limits<double>::infinity();
    fit.conf_intervals = hessian_confidence(fit, triggers, v, cfg,
                                            cfg.confidence_level);
    fit.degenerate = !std::isfinite(fit.conf_intervals.lat.lo) ||
                     !std::isfinite(fit.conf_intervals.lat.hi) ||
                     !std::isfinite(fit.conf_intervals.lon.lo) ||
                     !std::isfinite(fit.conf_intervals.lon.hi);
    return fit;
}

ConfidenceIntervals hessian_confidence(const FitResult& fit,
                                       std::span<const Trigger> triggers,
                                       const WaveSpeed& v,
                                       const EstimatorConfig& cfg,
                                       double level) {
    if (!(level > 0.0 && level < 1.0))
        throw InvalidInput("hessian_confidence: level must lie in (0, 1)");

    ConfidenceIntervals ci;
    ci.level = level;

    Prepared prep(triggers);
    std::vector<double> scratch;
    const std::array<double, 3> x0 = {fit.hypocenter.epicentre.lat,
                                      fit.hypocenter.epicentre.lon,
                                      fit.hypocenter.depth_km};
    auto f = [&](const std::array<double, 3>& x) {
        return centered_sse_prepared(prep, x[0], x[1],
                                     std::max(x[2], 0.0), v.v_kms, scratch);
    };

    const double h = 1e-4;  // degrees / km in internal units
    const double f0 = f(x0);
    std::array<std::array<double, 3>, 3> H{};
    for (int i = 0; i < 3; ++i) {
        auto xp = x0, xm = x0;
        xp[i] += h;
        xm[i] -= h;
        H[i][i] = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            auto xpp = x0, xpm = x0, xmp = x0, xmm = x0;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            H[i][j] = H[j][i] = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
        }

    std::array<std::array<double, 3>, 3> Hinv{};
    const bool ok = invert3(H, Hinv) && Hinv[0][0] > 0.0 && Hinv[1][1] > 0.0 &&
                    Hinv[2][2] > 0.0;
    if (!ok) {
        // Degenerate geometry: report unbounded intervals, depth truncated
        // to its physical bounds.
        ci.lat = Interval{};
        ci.lon = Interval{};
        ci.depth_km = Interval{cfg.depth_min_km, cfg.depth_max_km};
        return ci;
    }

    // Observed information of the profiled log-likelihood is H / (2 sigma^2),
    // so the parameter covariance is 2 sigma^2 H^-1.
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double two_s2 = 2.0 * fit.sigma2;
    const double wlat = z * std::sqrt(two_s2 * Hinv[0][0]);
    const double wlon = z * std::sqrt(two_s2 * Hinv[1][1]);
    const double wdep = z * std::sqrt(two_s2 * Hinv[2][2]);

    ci.lat = Interval{x0[0] - wlat, x0[0] + wlat};
    ci.lon = Interval{x0[1] - wlon, x0[1] + wlon};
    ci.depth_km = Interval{std::max(x0[2] - wdep, cfg.depth_min_km),
                           std::min(x0[2] + wdep, cfg.depth_max_km)};
    return ci;
}

}  // namespace quakeml
