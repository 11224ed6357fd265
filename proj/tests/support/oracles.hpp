// Test-side oracles, independent of the library code under test: finite
// differences, a fixed-step RK4 integrator, and a dense power iteration.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

template <typename F>
double central_diff(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Classical RK4 with fixed step for y' = f(t, y).
template <std::size_t N, typename F>
std::array<double, N> rk4(F&& f, std::array<double, N> y, double t0, double t1, double h) {
    double t = t0;
    auto axpy = [](const std::array<double, N>& a, double c, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    while (t < t1 - 1e-15) {
        const double step = std::min(h, t1 - t);
        const auto k1 = f(t, y);
        const auto k2 = f(t + step / 2, axpy(y, step / 2, k1));
        const auto k3 = f(t + step / 2, axpy(y, step / 2, k2));
        const auto k4 = f(t + step, axpy(y, step, k3));
        for (std::size_t i = 0; i < N; ++i)
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += step;
    }
    return y;
}

template <typename F>
double rk4_scalar(F&& f, double y0, double t0, double t1, double h) {
    auto wrap = [&](double t, const std::array<double, 1>& y) { return std::array<double, 1>{f(t, y[0])}; };
    return rk4<1>(wrap, std::array<double, 1>{y0}, t0, t1, h)[0];
}

// Dominant eigenvalue modulus of a dense square matrix by power iteration.
inline double dominant_eigenvalue(const std::vector<std::vector<double>>& M, int iterations = 5000) {
    const std::size_t n = M.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += M[i][j] * v[j];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (double& x : w) x /= norm;
        lambda = norm;
        v = std::move(w);
    }
    return lambda;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

}  // namespace oracles
