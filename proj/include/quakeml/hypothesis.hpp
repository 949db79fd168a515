#pragma once

#include <cstddef>
#include <span>

#include "quakeml/estimation.hpp"

namespace quakeml {

// Variance test specification. H0: sigma^2 = delta, H1: sigma^2 > delta.
// delta does not depend on the assumed wave speed.
struct TestSpec {
    double delta = 0.6;   // null residual variance, seconds^2
    double alpha = 0.01;  // significance level
};

struct VelocityTestResult {
    WaveSpeed v;
    double statistic = 0.0;  // T = (n - 3) sigma^2 / delta
    std::size_t df = 0;      // n - 3
    double critical = 0.0;   // chi-square quantile at 1 - alpha
    bool rejected = false;
    FitResult fit;
};

enum class Verdict { true_earthquake, false_detection };

// A detection is declared false only when the null is rejected under both
// wave-speed hypotheses.
struct Classification {
    VelocityTestResult primary_test;
    VelocityTestResult secondary_test;
    Verdict verdict = Verdict::true_earthquake;
};

// (n - 3) * sigma2 / delta. Requires n >= 4 so df >= 1.
double test_statistic(double sigma2, std::size_t n, double delta);

// Fit the hypocentre at the given wave speed and run the one-sided
// upper-tail variance test.
VelocityTestResult run_test(std::span<const Trigger> triggers, const WaveSpeed& v,
                            const TestSpec& spec, const EstimatorConfig& cfg);

// Run the test at both wave speeds and combine into the verdict.
Classification classify(std::span<const Trigger> triggers, const TestSpec& spec,
                        const EstimatorConfig& cfg,
                        const WaveSpeed& primary = WaveSpeed::primary(),
                        const WaveSpeed& secondary = WaveSpeed::secondary());

}  // namespace quakeml
