#include "quakeml/stats.hpp"

#include <cmath>
#include <limits>

#include "quakeml/errors.hpp"

namespace quakeml {

namespace {

// Series representation of P(a,x), valid (fast) for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction representation of Q(a,x) = 1 - P(a,x), for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw InvalidInput("gamma_p: requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, std::size_t df) {
    if (df < 1) throw InvalidInput("chi_square_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * static_cast<double>(df), 0.5 * x);
}

double chi_square_quantile(double p, std::size_t df) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidInput("chi_square_quantile: p must lie in (0, 1)");
    if (df < 1) throw InvalidInput("chi_square_quantile: df must be >= 1");

    const double k = static_cast<double>(df);

    // Wilson-Hilferty: chi2_p ~ k * (1 - 2/(9k) + z_p * sqrt(2/(9k)))^3
    const double z = normal_quantile(p);
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    double x = k * t * t * t;
    if (!(x > 0.0)) x = k * std::exp((std::log(p) + std::lgamma(0.5 * k) +
                                      0.5 * k * std::log(2.0)) / (0.5 * k)) / 2.0;
    if (!(x > 0.0)) x = 0.5;

    // Newton on F(x) - p with bisection safeguards.
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        const double f = chi_square_cdf(x, df) - p;
        if (f > 0.0) hi = x; else lo = x;
        const double log_pdf = (0.5 * k - 1.0) * std::log(x) - 0.5 * x -
                               std::lgamma(0.5 * k) - 0.5 * k * std::log(2.0);
        const double pdf = std::exp(log_pdf);
        double step = (pdf > 0.0) ? f / pdf : 0.0;
        double xn = x - step;
        if (!(xn > lo) || !(xn < hi) || pdf <= 0.0)
            xn = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
        if (std::fabs(xn - x) < 1e-12 * (1.0 + x)) { x = xn; break; }
        x = xn;
    }
    return x;
}

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw InvalidInput("normal_quantile: q must lie in (0, 1)");
    if (q == 0.5) return 0.0;
    if (q < 0.5) return -normal_quantile(1.0 - q);

    // Solve P(1/2, x/2) = 2q - 1 for x = z^2 by Newton, seeded with the
    // classic rational lower-tail approximation.
    const double target = 2.0 * q - 1.0;
    double z;
    {
        // Abramowitz-Stegun 26.2.23 seed
        const double tt = std::sqrt(-2.0 * std::log(1.0 - q));
        z = tt - (2.30753 + 0.27061 * tt) / (1.0 + 0.99229 * tt + 0.04481 * tt * tt);
    }
    for (int it = 0; it < 60; ++it) {
        const double f = gamma_p(0.5, 0.5 * z * z) - target;
        const double pdf = std::exp(-0.5 * z * z) * 0.79788456080286535588;  // 2*phi(z)
        if (pdf <= 0.0) break;
        const double zn = z - f / pdf;
        if (std::fabs(zn - z) < 1e-14 * (1.0 + std::fabs(z))) { z = zn; break; }
        z = zn;
    }
    return z;
}

}  // namespace quakeml
