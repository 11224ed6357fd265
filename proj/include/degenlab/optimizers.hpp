#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "degenlab/objectives.hpp"

namespace degenlab {

enum class OptimizerKind { GD, Momentum, RMSProp, Adam };

struct OptimizerParams {
    double eta = 1e-3;       // learning rate, > 0
    double beta1 = 0.9;      // first-moment decay in [0,1); momentum beta for Momentum
    double beta2 = 0.999;    // second-moment decay in [0,1)
    double epsilon = 0.0;    // denominator guard, >= 0
    bool bias_correction = false;

    void validate() const {
        if (!(eta > 0.0)) throw std::invalid_argument("OptimizerParams: eta must be > 0");
        if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("OptimizerParams: beta1 must be in [0,1)");
        if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("OptimizerParams: beta2 must be in [0,1)");
        if (!(epsilon >= 0.0)) throw std::invalid_argument("OptimizerParams: epsilon must be >= 0");
    }
};

// m and v are the moments already updated with the gradient at x, i.e. the
// pair that produces the step away from x. t counts completed steps.
struct OptimizerState {
    double x = 0.0;
    double m = 0.0;
    double v = 0.0;
    std::int64_t t = 0;
};

// Seeding convention for v_0. ZeroThenFirstGrad runs the recurrence from
// v_{-1} = 0, so v_0 = (1-beta2) g_0^2. SeedWithG0Sq sets v_0 = g_0^2
// exactly. Explicit pins v_0 to a given value.
struct V0Policy {
    enum class Kind { ZeroThenFirstGrad, SeedWithG0Sq, Explicit };
    Kind kind = Kind::ZeroThenFirstGrad;
    double value = 0.0;

    static V0Policy zero() { return {Kind::ZeroThenFirstGrad, 0.0}; }
    static V0Policy g0sq() { return {Kind::SeedWithG0Sq, 0.0}; }
    static V0Policy explicit_value(double v0) { return {Kind::Explicit, v0}; }
};

enum class Termination { MaxSteps, Converged, Underflow, Diverged, DivisionHazard };

const char* to_string(Termination t);
const char* to_string(OptimizerKind k);

struct TrajectorySample {
    std::int64_t t = 0;
    double x = 0.0;
    double loss = 0.0;
    double grad = 0.0;
    double m = 0.0;
    double v = 0.0;
    double log_abs_x = 0.0;  // -inf at exact zero
};

struct StopRule {
    double loss_floor = 1e-280;        // Converged below this
    double divergence_bound = 1e12;    // Diverged beyond this |x|
    std::int64_t record_cap = 100000;  // full recording up to this many steps
};

struct Trajectory {
    OptimizerKind kind = OptimizerKind::Adam;
    OptimizerParams params;
    int degree = 4;
    std::vector<TrajectorySample> samples;
    Termination termination = Termination::MaxSteps;
};

// Moment recurrences and the Adam displacement, shared verbatim by the
// steppers and the trajectory runner so both paths are bit-identical.
inline double adam_update_m(double m_prev, double beta1, double g) {
    return beta1 * m_prev + (1.0 - beta1) * g;
}
inline double adam_update_v(double v_prev, double beta2, double g) {
    return beta2 * v_prev + (1.0 - beta2) * (g * g);
}
// eta * m_hat / (sqrt(v_hat) + eps) with bias correction by the 1-based step
// count when enabled. Caller guarantees a nonzero denominator.
inline double adam_displacement(double m, double v, const OptimizerParams& p, std::int64_t step_count) {
    double m_hat = m;
    double v_hat = v;
    if (p.bias_correction) {
        m_hat = m / (1.0 - powi(p.beta1, static_cast<int>(step_count)));
        v_hat = v / (1.0 - powi(p.beta2, static_cast<int>(step_count)));
    }
    return p.eta * m_hat / (std::sqrt(v_hat) + p.epsilon);
}

enum class StepStatus { Ok, DivisionHazard, Underflow };

struct StepResult {
    OptimizerState state;
    StepStatus status = StepStatus::Ok;
};

// x' = x - eta * x^{k-1}; moments untouched.
OptimizerState step_gd(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj);

// Heavy-ball: m' = beta1 * m + g, x' = x - eta * m'.
OptimizerState step_momentum(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj);

// One Adam step from previous moments (s.m, s.v). DivisionHazard when the
// denominator is exactly zero with a nonzero numerator; Underflow when the
// update is a stalled 0/0 at nonzero x.
StepResult step_adam(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj);

// Adam with beta1 forced to 0 and bias correction off.
StepResult step_rmsprop(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj);

// Iterates the selected stepper from x0, recording the mid-step snapshot
// (x_t, g_t, m_t, v_t) at every step (or strided past record_cap, keeping the
// running-min/max loss samples and the final sample). Termination checks, in
// order: Diverged, Converged (loss < floor), MaxSteps, then division hazards.
Trajectory run(OptimizerKind kind, const OptimizerParams& params, const PolynomialObjective& obj,
               double x0, const V0Policy& v0, std::int64_t max_steps, const StopRule& stop = {});

}  // namespace degenlab
