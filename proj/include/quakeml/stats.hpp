#pragma once

#include <cstddef>

namespace quakeml {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

// CDF of the chi-square distribution with df degrees of freedom.
double chi_square_cdf(double x, std::size_t df);

// Inverse CDF of chi-square(df). Wilson-Hilferty starting point refined by
// Newton steps on the regularized incomplete gamma; absolute accuracy better
// than 1e-6 for df <= 1000.
double chi_square_quantile(double p, std::size_t df);

// Standard normal quantile, obtained from the chi-square(1) quantile
// (Phi^-1(q)^2 is the 2q-1 quantile of chi-square(1) for q > 1/2).
double normal_quantile(double q);

}  // namespace quakeml
