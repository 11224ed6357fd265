#pragma once

#include <array>
#include <stdexcept>

#include "degenlab/common.hpp"

namespace degenlab {

// Monomial loss x^k / k with even degree k. The minimum at the origin is
// degenerate for k >= 4: gradient x^{k-1} and Hessian (k-1) x^{k-2} both
// vanish there.
class PolynomialObjective {
public:
    explicit PolynomialObjective(int degree) : degree_(degree) {
        if (degree < 2 || degree % 2 != 0)
            throw std::invalid_argument("PolynomialObjective: degree must be an even integer >= 2");
    }

    int degree() const { return degree_; }

    double value(double x) const { return powi(x, degree_) / degree_; }
    double gradient(double x) const { return powi(x, degree_ - 1); }
    double hessian(double x) const { return (degree_ - 1) * powi(x, degree_ - 2); }

private:
    int degree_;
};

// Sum of a quadratic/quartic pair along the rotated directions (x-y) and
// (x+y), with the fixed coefficient convention 1/4 for quadratic terms and
// 1/16 for quartic terms. Nonnegative, unique minimizer at the origin.
class Coupled2DObjective {
public:
    using Point = std::array<double, 2>;

    Coupled2DObjective(int exponent_diff, int exponent_sum)
        : e1_(exponent_diff), e2_(exponent_sum) {
        if ((e1_ != 2 && e1_ != 4) || (e2_ != 2 && e2_ != 4))
            throw std::invalid_argument("Coupled2DObjective: exponents must be 2 or 4");
        c1_ = coeff_for(e1_);
        c2_ = coeff_for(e2_);
    }

    int exponent_diff() const { return e1_; }
    int exponent_sum() const { return e2_; }
    double coeff_diff() const { return c1_; }
    double coeff_sum() const { return c2_; }

    double value(const Point& p) const {
        const double d = p[0] - p[1];
        const double s = p[0] + p[1];
        return c1_ * powi(d, e1_) + c2_ * powi(s, e2_);
    }

    Point gradient(const Point& p) const {
        const double d = p[0] - p[1];
        const double s = p[0] + p[1];
        const double gd = c1_ * e1_ * powi(d, e1_ - 1);
        const double gs = c2_ * e2_ * powi(s, e2_ - 1);
        return {gd + gs, -gd + gs};
    }

private:
    static double coeff_for(int e) { return e == 2 ? 0.25 : 1.0 / 16.0; }

    int e1_, e2_;
    double c1_, c2_;
};

}  // namespace degenlab
