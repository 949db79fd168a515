#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "quakeml/geo.hpp"

namespace quakeml {

// One smartphone trigger: where it was and when it fired. Times are seconds
// relative to any shared epoch; the estimation below is invariant to the
// choice of epoch.
struct Trigger {
    std::string id;
    GeoPoint location;
    double time_s = 0.0;
};

// Candidate or estimated hypocentre. The origin time is a nuisance: it is
// eliminated by centering the residuals and is carried here only so callers
// can evaluate the forward model explicitly.
struct Hypocenter {
    GeoPoint epicentre;
    double depth_km = 0.0;
    double t_origin_s = 0.0;  // nuisance, never estimated
};

// Time residuals t_i - D_iH / v and their mean.
struct ResidualSet {
    std::vector<double> deltas_s;
    double mean_s = 0.0;
};

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ConfidenceIntervals {
    Interval lat;
    Interval lon;
    Interval depth_km;
    double level = 0.99;
};

struct FitResult {
    Hypocenter hypocenter;
    double sigma2 = 0.0;          // ML residual variance, divides by n
    ResidualSet residuals;
    double objective = 0.0;       // minimized centered SSE, seconds^2
    ConfidenceIntervals conf_intervals;
    bool converged = false;
    bool degenerate = false;      // near-singular information matrix
    bool depth_at_bound = false;
    int restarts_used = 0;
    double log_likelihood = 0.0;
};

struct EstimatorConfig {
    int restarts = 20;
    double depth_min_km = 0.0;
    double depth_max_km = 100.0;
    double box_margin_deg = 1.0;   // search box = trigger bbox +- margin
    double tolerance = 1e-8;       // convergence tolerance on the objective
    int max_iterations = 500;
    double confidence_level = 0.99;
    std::uint64_t seed = 0;
};

// Sum of squared residuals after subtracting their mean:
//   sum_i (dt_i - mean(dt))^2,  dt_i = t_i - D_iH(h) / v.
// Invariant to any constant shift of all trigger times, which is how the
// origin time drops out of the estimation.
double centered_sse(const Hypocenter& h, std::span<const Trigger> triggers,
                    const WaveSpeed& v);

// Residuals dt_i = t_i - D_iH(h)/v - t_origin and their mean.
ResidualSet residuals_at(const Hypocenter& h, std::span<const Trigger> triggers,
                         const WaveSpeed& v);

// ML variance estimate: mean squared deviation of the residuals about their
// mean. Divides by n, not n-1.
double estimate_variance(const ResidualSet& residuals, std::size_t n);

// Gaussian log-likelihood of centered residuals at the given variance.
double log_likelihood(double sigma2, const ResidualSet& residuals);

// Multi-start bounded minimization of the centered SSE over
// (lat, lon, depth). Deterministic for a fixed config seed; restarts use
// independent derived streams and ties go to the lowest restart index.
// Throws InsufficientData when fewer than 4 triggers are supplied.
FitResult estimate_hypocenter(std::span<const Trigger> triggers,
                              const WaveSpeed& v, const EstimatorConfig& cfg);

// Wald intervals from a finite-difference Hessian of the objective at the
// fitted point. The depth interval is truncated at the configured bounds.
// A near-singular Hessian marks the fit degenerate and the intervals
// unbounded.
ConfidenceIntervals hessian_confidence(const FitResult& fit,
                                       std::span<const Trigger> triggers,
                                       const WaveSpeed& v,
                                       const EstimatorConfig& cfg,
                                       double level);

}  // namespace quakeml
