#include "quakeml/hypothesis.hpp"

#include "quakeml/errors.hpp"
#include "quakeml/stats.hpp"

namespace quakeml {

double test_statistic(double sigma2, std::size_t n, double delta) {
    if (n < 4)
        throw InsufficientData("test_statistic: need n >= 4 (n=" +
                               std::to_string(n) + ")");
    if (!(delta > 0.0))
        throw InvalidInput("test_statistic: delta must be positive");
    return static_cast<double>(n - 3) * sigma2 / delta;
}

VelocityTestResult run_test(std::span<const Trigger> triggers, const WaveSpeed& v,
                            const TestSpec& spec, const EstimatorConfig& cfg) {
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw InvalidInput("run_test: alpha must lie in (0, 1)");

    VelocityTestResult out;
    out.v = v;
    out.fit = estimate_hypocenter(triggers, v, cfg);
    out.df = triggers.size() - 3;
    out.statistic = test_statistic(out.fit.sigma2, triggers.size(), spec.delta);
    out.critical = chi_square_quantile(1.0 - spec.alpha, out.df);
    out.rejected = out.statistic > out.critical;
    return out;
}

Classification classify(std::span<const Trigger> triggers, const TestSpec& spec,
                        const EstimatorConfig& cfg, const WaveSpeed& primary,
                        const WaveSpeed& secondary) {
    Classification out;
    out.primary_test = run_test(triggers, primary, spec, cfg);
    out.secondary_test = run_test(triggers, secondary, spec, cfg);
    out.verdict = (out.primary_test.rejected && out.secondary_test.rejected)
                      ? Verdict::false_detection
                      : Verdict::true_earthquake;
    return out;
}

}  // namespace quakeml
