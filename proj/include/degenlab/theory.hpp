#pragma once

#include <cmath>
#include <string>

#include "degenlab/normalized.hpp"

namespace degenlab {
namespace theory {

enum class RateKind { LinearContraction, PowerLaw, SuperExponential, MomentumLimitedLinear };

const char* to_string(RateKind k);

struct RatePrediction {
    RateKind kind = RateKind::LinearContraction;
    bool applicable = true;
    double x_contraction = 0.0;   // per-step |x| factor, linear kinds
    double loss_log_slope = 0.0;  // d ln(loss) per step
    double power_exponent = 0.0;  // |x| ~ t^exponent, power-law kind
    std::string formula;          // which closed form produced this
};

// Adam at the stable non-trivial fixed point: x contracts by
// beta2^{1/(2(k-2))} per step, so ln(loss) drops by k*ln(beta2)/(2(k-2)).
// Tagged inapplicable when the stability conditions fail.
RatePrediction adam_contraction(const OptimizerParams& p, int k);

// Constant-rate gradient flow on x^k/k decays as t^{-1/(k-2)}.
RatePrediction gd_power_law(int k);

// Exact gradient-flow solution x(t) = [x0^{-(k-2)} + (k-2) eta t]^{-1/(k-2)}.
double gd_flow_x(double t, int k, double eta, double x0);

// Heavy-ball momentum shares the gradient-flow exponent -1/(k-2).
RatePrediction momentum_power_law(int k);

// Gradient flow under eta(t) = eta0 * e^{alpha t}: linear convergence at
// x-rate exp(-alpha/(k-2)); the leading constant [(k-2)eta0/alpha]^{-1/(k-2)}
// is reported through exp_schedule_constant.
RatePrediction exponential_schedule_rate(int k, double alpha);
double exp_schedule_constant(int k, double alpha, double eta0);

// Exact solution of the scheduled flow from x0 (not just the asymptote).
double exp_schedule_flow_x(double t, int k, double alpha, double eta0, double x0);

// One-dimensional map for the effective sharpness u = eta_t * x_t^{k-2} of
// gradient descent under a geometric learning-rate schedule.
struct SharpnessMapConfig {
    double gamma = 2.0;  // per-step learning-rate growth factor, > 1
    int k = 4;
    double u0 = 0.1;
};

// psi(u) = gamma * u * (1-u)^{k-2}
double sharpness_map_step(double u, const SharpnessMapConfig& cfg);
// u* = 1 - gamma^{-1/(k-2)}
double sharpness_fixed_point(const SharpnessMapConfig& cfg);
// psi'(u*) = (2-k)/mu + (k-1) with mu = gamma^{-1/(k-2)}
double sharpness_derivative_at_fixed_point(const SharpnessMapConfig& cfg);

// gamma_crit = (k/(k-2))^{k-2}: the largest growth factor keeping u* stable.
double sharpness_critical_gamma(int k);
// beta2_crit = ((k-2)/k)^{2(k-2)} = gamma_crit^{-2} via gamma = 1/sqrt(beta2).
double beta2_critical(int k);

// RMSProp limits: lambda* = (1 - beta2^{1/(2(k-2))})/eta and
// v_t/v_{t-1} -> beta2. Inapplicable below beta2_crit.
RatePrediction rmsprop_lambda_star(const OptimizerParams& p, int k, double* lambda_star);
double v_ratio_limit(const OptimizerParams& p);

// k = 2 closed forms. The normalized system only has the fixed-point line
// (omega, lambda, x) = (1, 0, c); RMSProp under the implied exponential
// schedule descends super-exponentially until the discrete stability limit,
// while Adam's momentum caps the rate at ((1-beta1) - alpha/2)/2 per step.
struct QuadraticCase {
    bool applicable = true;  // requires 1 - beta1 > alpha
    double alpha = 0.0;
    double super_exp_coeff = 0.0;        // eta0/alpha
    double momentum_limited_slope = 0.0; // d ln|x| per step, negated magnitude
    double fixed_line_omega = 1.0;
    double fixed_line_lambda = 0.0;
};

double alpha_from_beta2(double beta2);  // -0.5 * ln(beta2)
QuadraticCase quadratic_case(const OptimizerParams& p, double alpha, double eta0 = 1e-3);
// x(t) = x0 * exp(eta0/alpha) * exp(-(eta0/alpha) e^{alpha t})
double super_exp_solution(double t, double alpha, double eta0, double x0);

// Coupling diagnostics: the momentum-persistence bound
// beta2^{(k-1)/(2(k-2))} on beta1, and the one-step recurrence of the
// coupling ratio R = v/g^2 given the local squared-gradient decay rho.
struct CouplingBoundary {
    double persistence_bound = 0.0;
};

CouplingBoundary coupling_boundary(const OptimizerParams& p, int k);
// R' = (beta2/rho) R + (1 - beta2)
double coupling_ratio_step(double R, double rho, double beta2);

}  // namespace theory
}  // namespace degenlab
