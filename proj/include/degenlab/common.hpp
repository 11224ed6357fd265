#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace degenlab {

inline constexpr const char* kVersion = "0.1.0";

// Integer power by repeated multiplication. Exponent is a true integer so the
// result is bit-reproducible across platforms, unlike std::pow.
inline double powi(double x, int n) {
    if (n < 0) return 1.0 / powi(x, -n);
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

// Closed grid: both endpoints included, count >= 2.
inline std::vector<double> linspace_inclusive(double min, double max, int count) {
    if (count < 2) throw std::invalid_argument("linspace_inclusive: count must be >= 2");
    std::vector<double> pts(static_cast<std::size_t>(count));
    const double step = (max - min) / (count - 1);
    for (int i = 0; i < count; ++i) pts[static_cast<std::size_t>(i)] = min + i * step;
    pts.back() = max;
    return pts;
}

inline double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace degenlab
