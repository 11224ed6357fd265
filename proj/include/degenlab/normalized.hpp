#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "degenlab/optimizers.hpp"

namespace degenlab {

// State of the scale-free Adam system: omega = m / x^{k-1} (normalized first
// moment), lambda = x^{k-2} / sqrt(v) (effective curvature), and the iterate
// carried as log|x| plus a sign so trajectories survive far below the
// smallest representable loss.
struct NormalizedState {
    double omega = 0.0;
    double lambda = 0.0;
    double log_abs_x = 0.0;
    int sign_x = 1;
};

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }

    // Largest eigenvalue modulus via the characteristic quadratic; a complex
    // pair has common modulus sqrt(det).
    double spectral_radius() const {
        const double tr = trace();
        const double d = det();
        const double disc = tr * tr - 4.0 * d;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            return std::max(std::fabs((tr + s) / 2.0), std::fabs((tr - s) / 2.0));
        }
        return std::sqrt(d);
    }
};

enum class FixedPointKind { TrivialLine, NonTrivial, Nonexistent };

enum class RegimeLabel {
    RegimeI_Stable,
    RegimeII_UnstableFP,
    RegimeIII_NoFP,
    BoundaryBand,
    LowerLeftException,
};

const char* to_string(RegimeLabel r);
const char* to_string(FixedPointKind k);

struct StabilityConditions {
    bool primary = false;        // beta1 < beta2^{k/(2(k-2))}
    bool lower = false;          // beta1 above the small-beta2 lower bound
    double primary_bound = 0.0;  // beta2^{k/(2(k-2))}
    double exist_bound = 0.0;    // beta2^{(k-1)/(2(k-2))}
    double lower_bound = 0.0;    // negative whenever beta2 > beta2_crit
};

struct FixedPointReport {
    FixedPointKind kind = FixedPointKind::Nonexistent;
    double omega_star = 0.0;
    double lambda_star = 0.0;
    double gamma_factor = 0.0;  // 1 - beta2^{1/(2(k-2))}
    Mat2 jacobian;
    double spectral_radius = 0.0;
    double x_eigenvalue = 0.0;  // beta2^{1/(2(k-2))}
    bool stable = false;
    RegimeLabel regime = RegimeLabel::RegimeIII_NoFP;
    StabilityConditions conditions;
    // True when the numeric spectral-radius test and the analytic conditions
    // disagree; reported, never resolved silently.
    bool numeric_analytic_disagree = false;
};

// Raw -> normalized chart. Requires x != 0 and v > 0.
NormalizedState to_normalized(const OptimizerState& s, int k);

// Inverse chart, exact up to round-off. Requires lambda > 0.
OptimizerState from_normalized(const NormalizedState& s, int k);

enum class NormStatus { Ok, DegenerateStep, Diverged };

struct NormStepResult {
    NormalizedState state;
    NormStatus status = NormStatus::Ok;
};

// One step of the normalized system:
//   f       = 1 - eta*omega*lambda
//   omega'  = beta1*omega / f^{k-1} + 1 - beta1
//   lambda' = f^{k-2} * lambda / sqrt(beta2 + (1-beta2) f^{2k-2} lambda^2 x^2)
//   log|x|' = log|x| + ln|f|,  sign flips when f < 0
// x^2 is exp(2 log|x|), flushed to exactly 0 below exp argument -1400 so the
// x -> 0 limiting map is reproduced without underflow artifacts.
NormStepResult step_normalized(const NormalizedState& s, const OptimizerParams& p, int k);

// Closed-form non-trivial fixed point (existence part only; stability fields
// are left for stability_verdict). k = 2 yields TrivialLine: the quadratic
// system has no non-trivial fixed point.
FixedPointReport nontrivial_fixed_point(const OptimizerParams& p, int k);

// Closed-form 2x2 Jacobian of the (omega, lambda) sub-map at the non-trivial
// fixed point. Throws std::domain_error when the fixed point does not exist.
Mat2 jacobian_at_fixed_point(const OptimizerParams& p, int k);

// Full report: fixed point, Jacobian, numeric spectral radius, the analytic
// stability conditions, and the theoretical regime label. `stable` follows
// the analytic conditions; any numeric/analytic disagreement is flagged.
FixedPointReport stability_verdict(const OptimizerParams& p, int k, double boundary_delta = 1e-4);

// Three-way split by beta1 against beta2^{k/(2(k-2))} and
// beta2^{(k-1)/(2(k-2))}, with BoundaryBand within boundary_delta of any
// boundary curve and LowerLeftException where beta2 <= beta2_crit and the
// secondary (lower-bound) condition fails.
RegimeLabel classify_regime_theoretical(const OptimizerParams& p, int k, double boundary_delta = 1e-4);

struct NormalizedSample {
    std::int64_t t = 0;
    double omega = 0.0;
    double lambda = 0.0;
    double log_abs_x = 0.0;
    int sign_x = 1;
};

struct NormalizedTrajectory {
    OptimizerParams params;
    int degree = 4;
    std::vector<NormalizedSample> samples;
    Termination termination = Termination::MaxSteps;
};

// Initial normalized state matching the raw runner's first snapshot from x0:
// omega_0 = 1 - beta1, lambda_0 = x0^{k-2} / sqrt(v_0).
NormalizedState initial_normalized_state(const OptimizerParams& p, const PolynomialObjective& obj,
                                         double x0, const V0Policy& v0);

// Iterates step_normalized, recording every state. Diverged on non-finite
// omega/lambda or log|x| beyond the divergence bound; DegenerateStep maps to
// DivisionHazard termination. No convergence floor: this backend is the one
// that runs arbitrarily deep.
NormalizedTrajectory run_normalized(const OptimizerParams& p, int k, const NormalizedState& init,
                                    std::int64_t max_steps, double log_divergence_bound = std::log(1e12));

}  // namespace degenlab
