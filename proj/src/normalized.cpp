#include "degenlab/normalized.hpp"

#include <cmath>
#include <stdexcept>

namespace degenlab {

const char* to_string(RegimeLabel r) {
    switch (r) {
        case RegimeLabel::RegimeI_Stable: return "RegimeI_Stable";
        case RegimeLabel::RegimeII_UnstableFP: return "RegimeII_UnstableFP";
        case RegimeLabel::RegimeIII_NoFP: return "RegimeIII_NoFP";
        case RegimeLabel::BoundaryBand: return "BoundaryBand";
        case RegimeLabel::LowerLeftException: return "LowerLeftException";
    }
    return "?";
}

const char* to_string(FixedPointKind k) {
    switch (k) {
        case FixedPointKind::TrivialLine: return "TrivialLine";
        case FixedPointKind::NonTrivial: return "NonTrivial";
        case FixedPointKind::Nonexistent: return "Nonexistent";
    }
    return "?";
}

namespace {

void require_degenerate_degree(int k) {
    if (k < 4 || k % 2 != 0)
        throw std::invalid_argument("normalized dynamics require an even degree k >= 4");
}

// Exponent 1/(2(k-2)) that governs every closed form below.
double base_exponent(int k) { return 1.0 / (2.0 * (k - 2)); }

}  // namespace

NormalizedState to_normalized(const OptimizerState& s, int k) {
    require_degenerate_degree(k);
    if (s.x == 0.0) throw std::domain_error("to_normalized: x must be nonzero");
    if (!(s.v > 0.0)) throw std::domain_error("to_normalized: v must be positive");
    NormalizedState n;
    n.omega = s.m / powi(s.x, k - 1);
    n.lambda = powi(s.x, k - 2) / std::sqrt(s.v);
    n.log_abs_x = std::log(std::fabs(s.x));
    n.sign_x = s.x > 0.0 ? 1 : -1;
    return n;
}

OptimizerState from_normalized(const NormalizedState& s, int k) {
    require_degenerate_degree(k);
    if (!(s.lambda > 0.0)) throw std::domain_error("from_normalized: lambda must be positive");
    OptimizerState r;
    r.x = s.sign_x * std::exp(s.log_abs_x);
    r.m = s.omega * powi(r.x, k - 1);
    const double root_v = powi(r.x, k - 2) / s.lambda;
    r.v = root_v * root_v;
    return r;
}

NormStepResult step_normalized(const NormalizedState& s, const OptimizerParams& p, int k) {
    require_degenerate_degree(k);
    const double f = 1.0 - p.eta * s.omega * s.lambda;
    if (f == 0.0) return {s, NormStatus::DegenerateStep};

    const double two_logx = 2.0 * s.log_abs_x;
    const double x2 = two_logx < -1400.0 ? 0.0 : std::exp(two_logx);

    NormalizedState n;
    n.omega = p.beta1 * s.omega / powi(f, k - 1) + (1.0 - p.beta1);
    n.lambda = powi(f, k - 2) * s.lambda /
               std::sqrt(p.beta2 + (1.0 - p.beta2) * powi(f, 2 * k - 2) * s.lambda * s.lambda * x2);
    n.log_abs_x = s.log_abs_x + std::log(std::fabs(f));
    n.sign_x = f < 0.0 ? -s.sign_x : s.sign_x;

    if (!std::isfinite(n.omega) || !std::isfinite(n.lambda)) return {n, NormStatus::Diverged};
    return {n, NormStatus::Ok};
}

FixedPointReport nontrivial_fixed_point(const OptimizerParams& p, int k) {
    p.validate();
    if (k == 2) {
        FixedPointReport r;
        r.kind = FixedPointKind::TrivialLine;
        r.omega_star = 1.0;
        r.lambda_star = 0.0;
        r.gamma_factor = quiet_nan();
        r.x_eigenvalue = quiet_nan();
        r.spectral_radius = quiet_nan();
        r.regime = RegimeLabel::RegimeIII_NoFP;
        return r;
    }
    require_degenerate_degree(k);
    const double e = base_exponent(k);
    const double exist_bound = std::pow(p.beta2, (k - 1) * e);

    FixedPointReport r;
    r.gamma_factor = 1.0 - std::pow(p.beta2, e);
    r.x_eigenvalue = std::pow(p.beta2, e);
    if (!(p.beta1 < exist_bound)) {
        r.kind = FixedPointKind::Nonexistent;
        r.omega_star = quiet_nan();
        r.lambda_star = quiet_nan();
        return r;
    }
    r.kind = FixedPointKind::NonTrivial;
    r.omega_star = (1.0 - p.beta1) / (1.0 - p.beta1 * std::pow(p.beta2, -(k - 1) * e));
    r.lambda_star = r.gamma_factor / (p.eta * r.omega_star);
    return r;
}

Mat2 jacobian_at_fixed_point(const OptimizerParams& p, int k) {
    require_degenerate_degree(k);
    const FixedPointReport fp = nontrivial_fixed_point(p, k);
    if (fp.kind != FixedPointKind::NonTrivial)
        throw std::domain_error("jacobian_at_fixed_point: non-trivial fixed point does not exist");

    const double e = base_exponent(k);
    const double G = fp.gamma_factor;
    const double b1 = p.beta1, b2 = p.beta2;
    const double D = 1.0 - b1 * std::pow(b2, -(k - 1) * e);
    const double sqrt_b2 = std::sqrt(b2);

    Mat2 J;
    J.a11 = b1 * G * (k - 1) * std::pow(b2, -k * e) + b1 * std::pow(b2, (1 - k) * e);
    J.a12 = b1 * p.eta * (1.0 - b1) * (1.0 - b1) * (k - 1) * std::pow(b2, -k * e) / (D * D);
    J.a21 = G * G * (2 - k) * D * D * std::pow(b2, (k - 3) * e) / (sqrt_b2 * p.eta * (1.0 - b1) * (1.0 - b1));
    J.a22 = (G * (2 - k) * std::pow(b2, (k - 3) * e) + sqrt_b2) / sqrt_b2;
    return J;
}

namespace {

StabilityConditions stability_conditions(const OptimizerParams& p, int k) {
    const double e = base_exponent(k);
    StabilityConditions c;
    c.primary_bound = std::pow(p.beta2, k * e);
    c.exist_bound = std::pow(p.beta2, (k - 1) * e);
    // From 1 + tr(J) + det(J) > 0; positive only below beta2_crit.
    c.lower_bound = ((k - 2) * std::pow(p.beta2, -e) - k) /
                    ((k - (k - 2) * std::pow(p.beta2, e)) * std::pow(p.beta2, -k * e));
    c.primary = p.beta1 < c.primary_bound;
    c.lower = p.beta1 > c.lower_bound;
    return c;
}

double beta2_crit_of(int k) { return powi((k - 2.0) / k, 2 * (k - 2)); }

}  // namespace

RegimeLabel classify_regime_theoretical(const OptimizerParams& p, int k, double boundary_delta) {
    if (k == 2) return RegimeLabel::RegimeIII_NoFP;
    require_degenerate_degree(k);
    const StabilityConditions c = stability_conditions(p, k);

    // The lower-left corner outranks the band: there the secondary condition
    // decides stability and the primary boundary carries no information.
    if (p.beta2 <= beta2_crit_of(k) && !c.lower) return RegimeLabel::LowerLeftException;

    const bool near_primary = std::fabs(p.beta1 - c.primary_bound) < boundary_delta;
    const bool near_exist = std::fabs(p.beta1 - c.exist_bound) < boundary_delta;
    const bool near_lower = c.lower_bound > 0.0 && std::fabs(p.beta1 - c.lower_bound) < boundary_delta;
    if (near_primary || near_exist || near_lower) return RegimeLabel::BoundaryBand;
    if (c.primary) return RegimeLabel::RegimeI_Stable;
    if (p.beta1 < c.exist_bound) return RegimeLabel::RegimeII_UnstableFP;
    return RegimeLabel::RegimeIII_NoFP;
}

FixedPointReport stability_verdict(const OptimizerParams& p, int k, double boundary_delta) {
    FixedPointReport r = nontrivial_fixed_point(p, k);
    if (k == 2) return r;

    r.conditions = stability_conditions(p, k);
    r.regime = classify_regime_theoretical(p, k, boundary_delta);
    if (r.kind != FixedPointKind::NonTrivial) {
        r.stable = false;
        r.spectral_radius = quiet_nan();
        return r;
    }
    r.jacobian = jacobian_at_fixed_point(p, k);
    r.spectral_radius = r.jacobian.spectral_radius();
    r.stable = r.conditions.primary && r.conditions.lower;
    r.numeric_analytic_disagree = (r.spectral_radius < 1.0) != r.stable;
    return r;
}

NormalizedState initial_normalized_state(const OptimizerParams& p, const PolynomialObjective& obj,
                                         double x0, const V0Policy& v0) {
    if (x0 == 0.0) throw std::domain_error("initial_normalized_state: x0 must be nonzero");
    const double g0 = obj.gradient(x0);
    double v = 0.0;
    switch (v0.kind) {
        case V0Policy::Kind::ZeroThenFirstGrad: v = adam_update_v(0.0, p.beta2, g0); break;
        case V0Policy::Kind::SeedWithG0Sq: v = g0 * g0; break;
        case V0Policy::Kind::Explicit: v = v0.value; break;
    }
    if (!(v > 0.0)) throw std::domain_error("initial_normalized_state: v0 must be positive");
    NormalizedState s;
    s.omega = 1.0 - p.beta1;
    s.lambda = powi(x0, obj.degree() - 2) / std::sqrt(v);
    s.log_abs_x = std::log(std::fabs(x0));
    s.sign_x = x0 > 0.0 ? 1 : -1;
    return s;
}

NormalizedTrajectory run_normalized(const OptimizerParams& p, int k, const NormalizedState& init,
                                    std::int64_t max_steps, double log_divergence_bound) {
    p.validate();
    require_degenerate_degree(k);
    if (max_steps < 1) throw std::invalid_argument("run_normalized: max_steps must be >= 1");

    NormalizedTrajectory traj;
    traj.params = p;
    traj.degree = k;
    traj.samples.reserve(static_cast<std::size_t>(std::min<std::int64_t>(max_steps + 1, 1 << 20)));

    NormalizedState s = init;
    traj.termination = Termination::MaxSteps;
    for (std::int64_t t = 0;; ++t) {
        traj.samples.push_back({t, s.omega, s.lambda, s.log_abs_x, s.sign_x});
        if (!std::isfinite(s.omega) || !std::isfinite(s.lambda) || s.log_abs_x > log_divergence_bound) {
            traj.termination = Termination::Diverged;
            break;
        }
        if (t == max_steps) break;
        const NormStepResult r = step_normalized(s, p, k);
        if (r.status == NormStatus::DegenerateStep) {
            traj.termination = Termination::DivisionHazard;
            break;
        }
        if (r.status == NormStatus::Diverged) {
            traj.samples.push_back({t + 1, r.state.omega, r.state.lambda, r.state.log_abs_x, r.state.sign_x});
            traj.termination = Termination::Diverged;
            break;
        }
        s = r.state;
    }
    return traj;
}

}  // namespace degenlab
