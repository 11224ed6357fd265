#include "degenlab/theory.hpp"

#include <stdexcept>

namespace degenlab {
namespace theory {

namespace {

void require_degenerate(int k) {
    if (k < 4 || k % 2 != 0)
        throw std::invalid_argument("theory: degree must be an even integer >= 4");
}

}  // namespace

const char* to_string(RateKind k) {
    switch (k) {
        case RateKind::LinearContraction: return "LinearContraction";
        case RateKind::PowerLaw: return "PowerLaw";
        case RateKind::SuperExponential: return "SuperExponential";
        case RateKind::MomentumLimitedLinear: return "MomentumLimitedLinear";
    }
    return "?";
}

RatePrediction adam_contraction(const OptimizerParams& p, int k) {
    require_degenerate(k);
    const FixedPointReport fp = stability_verdict(p, k);
    RatePrediction r;
    r.kind = RateKind::LinearContraction;
    r.applicable = fp.kind == FixedPointKind::NonTrivial && fp.stable;
    r.x_contraction = std::pow(p.beta2, 1.0 / (2.0 * (k - 2)));
    r.loss_log_slope = k * std::log(p.beta2) / (2.0 * (k - 2));
    r.formula = "adam-fixed-point-contraction";
    return r;
}

RatePrediction gd_power_law(int k) {
    require_degenerate(k);
    RatePrediction r;
    r.kind = RateKind::PowerLaw;
    r.power_exponent = -1.0 / (k - 2);
    r.loss_log_slope = 0.0;
    r.formula = "gd-flow-power-law";
    return r;
}

double gd_flow_x(double t, int k, double eta, double x0) {
    require_degenerate(k);
    return std::pow(std::pow(x0, -(k - 2.0)) + (k - 2.0) * eta * t, -1.0 / (k - 2));
}

RatePrediction momentum_power_law(int k) {
    RatePrediction r = gd_power_law(k);
    r.formula = "heavy-ball-power-law";
    return r;
}

RatePrediction exponential_schedule_rate(int k, double alpha) {
    require_degenerate(k);
    if (!(alpha > 0.0)) throw std::invalid_argument("exponential_schedule_rate: alpha must be > 0");
    RatePrediction r;
    r.kind = RateKind::LinearContraction;
    r.x_contraction = std::exp(-alpha / (k - 2));
    r.loss_log_slope = -k * alpha / (k - 2);
    r.formula = "exponential-schedule-flow";
    return r;
}

double exp_schedule_constant(int k, double alpha, double eta0) {
    require_degenerate(k);
    return std::pow((k - 2.0) * eta0 / alpha, -1.0 / (k - 2));
}

double exp_schedule_flow_x(double t, int k, double alpha, double eta0, double x0) {
    require_degenerate(k);
    const double accum = (k - 2.0) * eta0 / alpha * (std::exp(alpha * t) - 1.0);
    return std::pow(std::pow(x0, -(k - 2.0)) + accum, -1.0 / (k - 2));
}

double sharpness_map_step(double u, const SharpnessMapConfig& cfg) {
    return cfg.gamma * u * powi(1.0 - u, cfg.k - 2);
}

double sharpness_fixed_point(const SharpnessMapConfig& cfg) {
    return 1.0 - std::pow(cfg.gamma, -1.0 / (cfg.k - 2));
}

double sharpness_derivative_at_fixed_point(const SharpnessMapConfig& cfg) {
    const double mu = std::pow(cfg.gamma, -1.0 / (cfg.k - 2));
    return (2.0 - cfg.k) / mu + (cfg.k - 1);
}

double sharpness_critical_gamma(int k) {
    require_degenerate(k);
    return powi(static_cast<double>(k) / (k - 2), k - 2);
}

double beta2_critical(int k) {
    require_degenerate(k);
    return powi((k - 2.0) / k, 2 * (k - 2));
}

RatePrediction rmsprop_lambda_star(const OptimizerParams& p, int k, double* lambda_star) {
    require_degenerate(k);
    RatePrediction r;
    r.kind = RateKind::LinearContraction;
    r.applicable = p.beta2 > beta2_critical(k);
    r.x_contraction = std::pow(p.beta2, 1.0 / (2.0 * (k - 2)));
    r.loss_log_slope = k * std::log(p.beta2) / (2.0 * (k - 2));
    r.formula = "rmsprop-global-rate";
    if (lambda_star) *lambda_star = (1.0 - r.x_contraction) / p.eta;
    return r;
}

double v_ratio_limit(const OptimizerParams& p) { return p.beta2; }

double alpha_from_beta2(double beta2) { return -0.5 * std::log(beta2); }

QuadraticCase quadratic_case(const OptimizerParams& p, double alpha, double eta0) {
    if (!(alpha > 0.0)) throw std::invalid_argument("quadratic_case: alpha must be > 0");
    QuadraticCase q;
    q.alpha = alpha;
    q.super_exp_coeff = eta0 / alpha;
    q.applicable = (1.0 - p.beta1) > alpha;
    q.momentum_limited_slope = q.applicable ? -((1.0 - p.beta1) - alpha / 2.0) / 2.0 : quiet_nan();
    return q;
}

double super_exp_solution(double t, double alpha, double eta0, double x0) {
    const double c = eta0 / alpha;
    return x0 * std::exp(c) * std::exp(-c * std::exp(alpha * t));
}

CouplingBoundary coupling_boundary(const OptimizerParams& p, int k) {
    require_degenerate(k);
    CouplingBoundary b;
    b.persistence_bound = std::pow(p.beta2, (k - 1.0) / (2.0 * (k - 2)));
    return b;
}

double coupling_ratio_step(double R, double rho, double beta2) {
    return (beta2 / rho) * R + (1.0 - beta2);
}

}  // namespace theory
}  // namespace degenlab
