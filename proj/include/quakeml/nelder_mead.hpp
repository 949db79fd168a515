#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace quakeml {

// Downhill-simplex minimizer specialized to 3 parameters, the dimensionality
// of the hypocentre search. Standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Constraints are handled by the caller inside
// the objective (clamped evaluation).
struct NelderMeadResult {
    std::array<double, 3> x{};
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <class F>
NelderMeadResult nelder_mead3(F&& f, const std::array<double, 3>& x0,
                              const std::array<double, 3>& step,
                              int max_iter, double ftol) {
    constexpr int N = 3;
    std::array<std::array<double, N>, N + 1> v;
    std::array<double, N + 1> fv;

    v[0] = x0;
    for (int i = 0; i < N; ++i) {
        v[i + 1] = x0;
        v[i + 1][i] += step[i];
    }
    for (int i = 0; i <= N; ++i) fv[i] = f(v[i]);

    auto order = [&] {
        for (int i = 1; i <= N; ++i)
            for (int j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
                std::swap(fv[j], fv[j - 1]);
                std::swap(v[j], v[j - 1]);
            }
    };
    order();

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::fabs(fv[N] - fv[0]) <= ftol * (1.0 + std::fabs(fv[0]))) {
            res.converged = true;
            break;
        }
        std::array<double, N> centroid{};
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) centroid[j] += v[i][j] / N;

        auto blend = [&](double coef) {
            std::array<double, N> p;
            for (int j = 0; j < N; ++j)
                p[j] = centroid[j] + coef * (centroid[j] - v[N][j]);
            return p;
        };

        const auto xr = blend(1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const auto xe = blend(2.0);
            const double fe = f(xe);
            if (fe < fr) { v[N] = xe; fv[N] = fe; }
            else         { v[N] = xr; fv[N] = fr; }
        } else if (fr < fv[N - 1]) {
            v[N] = xr; fv[N] = fr;
        } else {
            const auto xc = blend(fr < fv[N] ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[N])) {
                v[N] = xc; fv[N] = fc;
            } else {
                // shrink toward the best vertex
                for (int i = 1; i <= N; ++i) {
                    for (int j = 0; j < N; ++j)
                        v[i][j] = v[0][j] + 0.5 * (v[i][j] - v[0][j]);
                    fv[i] = f(v[i]);
                }
            }
        }
        order();
    }

    res.x = v[0];
    res.fmin = fv[0];
    res.iterations = it;
    return res;
}

}  // namespace quakeml
