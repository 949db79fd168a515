#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "quakeml/detector.hpp"
#include "quakeml/estimation.hpp"
#include "quakeml/rng.hpp"

namespace quakeml {

struct NetworkSpec {
    std::size_t count = 1000;
    double lat_lo = -12.39;
    double lat_hi = -11.74;
    double lon_lo = -77.17;
    double lon_hi = -76.66;
};

struct TrueEventSpec {
    double depth_min_km = 0.0;
    double depth_max_km = 100.0;
    WaveSpeed v = WaveSpeed::primary();
    double t_origin_s = 0.0;
    double p_triggering = 0.70;
    double noise_variance = 1.67;   // seconds^2
    double p_spurious = 0.06;       // among the non-triggering fraction
    double spurious_lo_s = 0.0;
    double spurious_hi_s = 12.0;
};

struct FalseEventSpec {
    double p_triggering = 0.30;
    double window_lo_s = 0.0;
    double window_hi_s = 12.0;
};

struct QuartileSummary {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct CalibrationReport {
    double delta = 0.0;
    double type1 = 0.0;  // true detections classified false (both tests reject)
    double type2 = 0.0;  // false detections classified true
    QuartileSummary epicentre_error_km;
    QuartileSummary depth_error_km;
    std::size_t replications = 0;
    std::size_t true_detected = 0;
    std::size_t false_detected = 0;
    bool delta_floored = false;
    std::uint64_t seed = 0;
};

struct TrueSimulation {
    Detection detection;
    Hypocenter truth;
};

// One fitted variance with its trigger count; the unit of calibration.
struct VarianceSample {
    double sigma2 = 0.0;
    std::size_t n = 0;
};

std::vector<Smartphone> generate_network(const NetworkSpec& spec, Rng& rng);

struct TrueEventDraw {
    Hypocenter truth;
    std::vector<Trigger> stream;  // time-sorted
};

// Generate the raw trigger stream for one true event without running the
// detector: hypocentre uniform over the network bounding box, model arrival
// times plus Gaussian error for the triggering fraction, uniform spurious
// times for a slice of the rest.
TrueEventDraw generate_true_event(std::span<const Smartphone> network,
                                  const TrueEventSpec& ev, Rng& rng);

// Raw stream for one false event: random triggering, uniform times.
std::vector<Trigger> generate_false_event(std::span<const Smartphone> network,
                                          const FalseEventSpec& ev, Rng& rng);

// Full true-event recipe: uniform hypocentre, wave-model arrival
// times with Gaussian error for the triggering fraction, uniform spurious
// times for a slice of the rest, then the detector over the sorted stream.
std::optional<TrueSimulation> simulate_true_detection(
    std::span<const Smartphone> network, const TrueEventSpec& ev,
    const DetectorConfig& det, Rng& rng);

std::optional<Detection> simulate_false_detection(
    std::span<const Smartphone> network, const FalseEventSpec& ev,
    const DetectorConfig& det, Rng& rng);

struct CalibratedDelta {
    double delta = 0.0;
    bool floored = false;
};

// Smallest delta (bisection, relative tolerance 1e-4) at which the fraction
// of samples rejecting H0 is <= alpha. The rejection rate is monotone
// non-increasing in delta. Needs at least 100 samples.
CalibratedDelta calibrate_delta(std::span<const VarianceSample> samples,
                                double alpha, double floor = 1e-6);

QuartileSummary summarize(std::vector<double> values);

struct CalibrationConfig {
    NetworkSpec network;
    TrueEventSpec true_event;
    FalseEventSpec false_event;
    DetectorConfig detector;
    EstimatorConfig estimator;
    WaveSpeed primary = WaveSpeed::primary();
    WaveSpeed secondary = WaveSpeed::secondary();
    std::size_t replications = 1000;
    double alpha = 0.01;
    std::uint64_t seed = 0;
};

struct CalibrationResult {
    CalibrationReport report;
    // raw material for the histogram / box-plot outputs
    std::vector<double> sigma2_true;
    std::vector<double> sigma2_false;
    std::vector<double> epicentre_errors_km;
    std::vector<double> depth_errors_km;
};

// Both simulation arms, delta calibration on the true arm (fits at the
// generating wave speed), then type I / type II under the both-velocity
// classification rule and parameter-error summaries. Replications use
// index-keyed RNG streams, so results do not depend on execution order.
CalibrationResult run_calibration(const CalibrationConfig& cfg);

}  // namespace quakeml
