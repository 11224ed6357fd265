#include "degenlab/optimizers.hpp"

#include <algorithm>
#include <cmath>

namespace degenlab {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::MaxSteps: return "MaxSteps";
        case Termination::Converged: return "Converged";
        case Termination::Underflow: return "Underflow";
        case Termination::Diverged: return "Diverged";
        case Termination::DivisionHazard: return "DivisionHazard";
    }
    return "?";
}

const char* to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::GD: return "gd";
        case OptimizerKind::Momentum: return "momentum";
        case OptimizerKind::RMSProp: return "rmsprop";
        case OptimizerKind::Adam: return "adam";
    }
    return "?";
}

OptimizerState step_gd(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj) {
    OptimizerState n = s;
    n.x = s.x - p.eta * obj.gradient(s.x);
    n.t = s.t + 1;
    return n;
}

OptimizerState step_momentum(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj) {
    OptimizerState n = s;
    n.m = p.beta1 * s.m + obj.gradient(s.x);
    n.x = s.x - p.eta * n.m;
    n.t = s.t + 1;
    return n;
}

StepResult step_adam(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj) {
    const double g = obj.gradient(s.x);
    OptimizerState n = s;
    n.m = adam_update_m(s.m, p.beta1, g);
    n.v = adam_update_v(s.v, p.beta2, g);
    n.t = s.t + 1;

    double m_hat = n.m;
    double v_hat = n.v;
    if (p.bias_correction) {
        m_hat = n.m / (1.0 - powi(p.beta1, static_cast<int>(n.t)));
        v_hat = n.v / (1.0 - powi(p.beta2, static_cast<int>(n.t)));
    }
    const double denom = std::sqrt(v_hat) + p.epsilon;
    if (denom == 0.0) {
        if (m_hat != 0.0) return {n, StepStatus::DivisionHazard};
        return {n, s.x != 0.0 ? StepStatus::Underflow : StepStatus::Ok};
    }
    n.x = s.x - p.eta * m_hat / denom;
    return {n, StepStatus::Ok};
}

StepResult step_rmsprop(const OptimizerState& s, const OptimizerParams& p, const PolynomialObjective& obj) {
    OptimizerParams q = p;
    q.beta1 = 0.0;
    q.bias_correction = false;
    return step_adam(s, q, obj);
}

namespace {

double log_abs_or_neg_inf(double x) {
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::fabs(x));
}

TrajectorySample make_sample(std::int64_t t, double x, double loss, double g, double m, double v) {
    return TrajectorySample{t, x, loss, g, m, v, log_abs_or_neg_inf(x)};
}

}  // namespace

Trajectory run(OptimizerKind kind, const OptimizerParams& params, const PolynomialObjective& obj,
               double x0, const V0Policy& v0, std::int64_t max_steps, const StopRule& stop) {
    params.validate();
    if (max_steps < 1) throw std::invalid_argument("run: max_steps must be >= 1");

    const bool adaptive = (kind == OptimizerKind::RMSProp || kind == OptimizerKind::Adam);
    OptimizerParams p = params;
    if (kind == OptimizerKind::RMSProp) {
        p.beta1 = 0.0;
        p.bias_correction = false;
    }

    const double g0 = obj.gradient(x0);
    if (adaptive && p.epsilon == 0.0 && g0 == 0.0 &&
        (v0.kind != V0Policy::Kind::Explicit || v0.value == 0.0)) {
        throw std::invalid_argument("run: v0 policy yields v0 = 0 with g0 = 0 and epsilon = 0");
    }

    Trajectory traj;
    traj.kind = kind;
    traj.params = p;
    traj.degree = obj.degree();

    const std::int64_t stride =
        max_steps > stop.record_cap ? (max_steps + stop.record_cap - 1) / stop.record_cap : 1;

    double x = x0;
    double m_prev = 0.0, v_prev = 0.0;
    bool have_min = false, have_max = false;
    TrajectorySample min_sample{}, max_sample{};

    auto record = [&](const TrajectorySample& s, bool force) {
        if (force || s.t % stride == 0) traj.samples.push_back(s);
        if (!have_min || s.loss < min_sample.loss) { min_sample = s; have_min = true; }
        if (!have_max || s.loss > max_sample.loss) { max_sample = s; have_max = true; }
    };

    Termination term = Termination::MaxSteps;
    for (std::int64_t t = 0;; ++t) {
        const double g = obj.gradient(x);
        double m = m_prev, v = v_prev;
        if (kind == OptimizerKind::Momentum) {
            m = p.beta1 * m_prev + g;
        } else if (adaptive) {
            m = adam_update_m(m_prev, p.beta1, g);
            if (t == 0) {
                switch (v0.kind) {
                    case V0Policy::Kind::ZeroThenFirstGrad: v = adam_update_v(0.0, p.beta2, g); break;
                    case V0Policy::Kind::SeedWithG0Sq: v = g * g; break;
                    case V0Policy::Kind::Explicit: v = v0.value; break;
                }
            } else {
                v = adam_update_v(v_prev, p.beta2, g);
            }
        }
        const double loss = obj.value(x);
        const TrajectorySample sample = make_sample(t, x, loss, g, m, v);

        const bool finite = std::isfinite(x) && std::isfinite(loss) && std::isfinite(m) && std::isfinite(v);
        if (!finite || std::fabs(x) > stop.divergence_bound) {
            record(sample, true);
            term = Termination::Diverged;
            break;
        }
        if (loss < stop.loss_floor) {
            record(sample, true);
            term = Termination::Converged;
            break;
        }
        if (t == max_steps) {
            record(sample, true);
            term = Termination::MaxSteps;
            break;
        }
        record(sample, false);

        // position update
        if (kind == OptimizerKind::GD) {
            x = x - p.eta * g;
        } else if (kind == OptimizerKind::Momentum) {
            x = x - p.eta * m;
        } else {
            double m_hat = m, v_hat = v;
            if (p.bias_correction) {
                m_hat = m / (1.0 - powi(p.beta1, static_cast<int>(t) + 1));
                v_hat = v / (1.0 - powi(p.beta2, static_cast<int>(t) + 1));
            }
            const double denom = std::sqrt(v_hat) + p.epsilon;
            if (denom == 0.0) {
                term = m_hat != 0.0 ? Termination::DivisionHazard : Termination::Underflow;
                break;
            }
            x = x - p.eta * m_hat / denom;
        }
        m_prev = m;
        v_prev = v;
    }

    traj.termination = term;

    // Splice in the extremal-loss samples that strided recording may have
    // skipped, keeping samples strictly ordered by t.
    if (stride > 1) {
        auto insert_sample = [&](const TrajectorySample& s) {
            auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), s.t,
                                       [](const TrajectorySample& a, std::int64_t t) { return a.t < t; });
            if (it == traj.samples.end() || it->t != s.t) traj.samples.insert(it, s);
        };
        if (have_min) insert_sample(min_sample);
        if (have_max) insert_sample(max_sample);
    }
    return traj;
}

}  // namespace degenlab
