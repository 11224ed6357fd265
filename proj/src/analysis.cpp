#include "degenlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace degenlab {
namespace analysis {

namespace {

double series_value(const TrajectorySample& s, SeriesKind kind) {
    switch (kind) {
        case SeriesKind::Loss: return s.loss;
        case SeriesKind::AbsX: return std::fabs(s.x);
        case SeriesKind::SecondMoment: return s.v;
    }
    return 0.0;
}

struct LogPoint {
    std::int64_t t;
    double log_y;
};

std::vector<LogPoint> log_series(const Trajectory& traj, SeriesKind kind) {
    std::vector<LogPoint> pts;
    pts.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        const double y = series_value(s, kind);
        if (std::isfinite(y) && y > 0.0) pts.push_back({s.t, std::log(y)});
    }
    return pts;
}

FitResult ols(const std::vector<double>& xs, const std::vector<double>& ys,
              std::int64_t t_start, std::int64_t t_end) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (r.intercept + r.slope * xs[i]);
        ss_res += e * e;
    }
    r.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    r.t_start = t_start;
    r.t_end = t_end;
    r.n_points = static_cast<int>(n);
    return r;
}

// Index of the first point of the maximal suffix over which the trailing
// w-mean of the ln-increments stays negative.
std::size_t exponential_phase_start(const std::vector<LogPoint>& pts) {
    const std::size_t n = pts.size();
    if (n < 2) return 0;
    const std::size_t n_delta = n - 1;
    const std::size_t w = std::min<std::size_t>(50, std::max<std::size_t>(1, n_delta / 4));

    std::vector<double> delta(n_delta);
    for (std::size_t i = 0; i < n_delta; ++i) delta[i] = pts[i + 1].log_y - pts[i].log_y;

    std::size_t last_bad = 0;
    bool any_bad = false;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_delta; ++i) {
        acc += delta[i];
        if (i >= w) acc -= delta[i - w];
        if (i + 1 >= w && acc >= 0.0) {
            last_bad = i;
            any_bad = true;
        }
    }
    return any_bad ? last_bad + 1 : 0;
}

constexpr int kMinFitPoints = 20;

}  // namespace

std::vector<double> cluster_values(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    std::vector<double> reps;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i + 1;
        double acc = values[i];
        while (j < values.size() && values[j] - values[j - 1] <= tol) {
            acc += values[j];
            ++j;
        }
        reps.push_back(acc / static_cast<double>(j - i));
        i = j;
    }
    return reps;
}

std::vector<double> smoothed(const std::vector<double>& v, int w) {
    std::vector<double> out(v.size());
    if (w < 1) w = 1;
    // Each window is summed afresh: a running sum would leave round-off
    // residue from large early values that swamps tails hundreds of orders
    // of magnitude smaller.
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t begin = i + 1 >= static_cast<std::size_t>(w) ? i + 1 - w : 0;
        double acc = 0.0;
        for (std::size_t j = begin; j <= i; ++j) acc += v[j];
        out[i] = acc / static_cast<double>(i - begin + 1);
    }
    return out;
}

std::optional<FitResult> fit_log_linear(const Trajectory& traj, double window_fraction, SeriesKind series) {
    const auto pts = log_series(traj, series);
    if (pts.size() < static_cast<std::size_t>(kMinFitPoints)) return std::nullopt;

    const std::size_t phase_start = exponential_phase_start(pts);
    const std::size_t phase_len = pts.size() - phase_start;
    std::size_t take = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(phase_len)));
    take = std::clamp<std::size_t>(take, 1, phase_len);
    const std::size_t begin = pts.size() - take;
    if (take < static_cast<std::size_t>(kMinFitPoints)) return std::nullopt;

    std::vector<double> xs, ys;
    xs.reserve(take);
    ys.reserve(take);
    for (std::size_t i = begin; i < pts.size(); ++i) {
        xs.push_back(static_cast<double>(pts[i].t));
        ys.push_back(pts[i].log_y);
    }
    return ols(xs, ys, pts[begin].t, pts.back().t);
}

std::optional<FitResult> fit_log_log(const Trajectory& traj, double window_fraction, SeriesKind series) {
    const auto pts = log_series(traj, series);
    if (pts.empty()) return std::nullopt;
    const double t_end = static_cast<double>(pts.back().t);
    const double t_min = (1.0 - window_fraction) * t_end;

    std::vector<double> xs, ys;
    std::int64_t first_t = -1;
    for (const auto& p : pts) {
        if (p.t < 1 || static_cast<double>(p.t) < t_min) continue;
        if (first_t < 0) first_t = p.t;
        xs.push_back(std::log(static_cast<double>(p.t)));
        ys.push_back(p.log_y);
    }
    if (xs.size() < static_cast<std::size_t>(kMinFitPoints)) return std::nullopt;
    return ols(xs, ys, first_t, pts.back().t);
}

std::vector<SpikeEvent> detect_spikes(const Trajectory& traj, double rise_factor, double floor) {
    std::vector<SpikeEvent> events;
    double running_min = std::numeric_limits<double>::infinity();
    bool in_event = false;
    for (const auto& s : traj.samples) {
        const bool qualifies = running_min < floor && std::isfinite(running_min) &&
                               (!std::isfinite(s.loss) || s.loss > rise_factor * running_min);
        if (qualifies) {
            if (!in_event) {
                events.push_back({s.t, s.t, s.loss, running_min});
                in_event = true;
            } else if (!(s.loss <= events.back().peak_loss)) {
                events.back().peak_loss = s.loss;
                events.back().t_peak = s.t;
            }
        } else {
            in_event = false;
        }
        if (std::isfinite(s.loss) && s.loss < running_min) running_min = s.loss;
    }
    return events;
}

double signgd_floor(const OptimizerParams& p, const PolynomialObjective& obj) {
    return obj.value(p.eta / 2.0);
}

const char* to_string(EmpiricalLabel l) {
    switch (l) {
        case EmpiricalLabel::StableConvergence: return "StableConvergence";
        case EmpiricalLabel::SpikeThenRecoveryOrDivergence: return "SpikeThenRecoveryOrDivergence";
        case EmpiricalLabel::SignGDOscillation: return "SignGDOscillation";
        case EmpiricalLabel::ChaoticConvergent: return "ChaoticConvergent";
        case EmpiricalLabel::Diverged: return "Diverged";
        case EmpiricalLabel::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

double finite_median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
    if (v.empty()) return quiet_nan();
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

EmpiricalRegime classify_empirical(const Trajectory& traj, const OptimizerParams& p,
                                   const PolynomialObjective& obj, const AnalysisConfig& cfg) {
    EmpiricalRegime out;
    const double floor = signgd_floor(p, obj);
    out.evidence.signgd_floor = floor;
    if (traj.samples.empty()) return out;

    std::vector<double> loss(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) loss[i] = traj.samples[i].loss;
    const std::vector<double> sm = smoothed(loss, cfg.smooth_window);

    double min_sm = std::numeric_limits<double>::infinity();
    for (double v : sm)
        if (std::isfinite(v) && v < min_sm) min_sm = v;
    out.evidence.min_loss = min_sm;
    out.evidence.final_loss = sm.back();

    const auto spikes = detect_spikes(traj, cfg.spike_rise_factor, floor);
    out.evidence.spike_times.reserve(spikes.size());
    for (const auto& e : spikes) out.evidence.spike_times.push_back(e.t);

    const CouplingStats cs = coupling_stats(traj, cfg.smooth_window);
    out.evidence.max_coupling_ratio = cs.max_R;
    out.evidence.final_coupling_ratio = cs.final_R;

    // Fraction of uphill ln-loss increments, the sawtooth discriminator.
    std::size_t uphill = 0, moves = 0;
    for (std::size_t i = 1; i < loss.size(); ++i) {
        if (!std::isfinite(loss[i]) || !std::isfinite(loss[i - 1]) || loss[i - 1] == 0.0) continue;
        ++moves;
        if (loss[i] > loss[i - 1]) ++uphill;
    }
    const double uphill_fraction = moves > 0 ? static_cast<double>(uphill) / moves : 0.0;

    // The deciding statistic is the median of the smoothed loss, not its
    // minimum: long saturated runs spend a sizeable minority of their steps
    // in transient micro-scale oscillation episodes (x, m and a free-decaying
    // v all tiny), so the running minimum of even the smoothed series ends up
    // hundreds of orders below the saturation band and cannot separate a
    // spiking run from an oscillating one. The median tracks where the
    // trajectory actually lives.
    const double typical = finite_median(sm);
    const std::size_t tail_begin = sm.size() - std::max<std::size_t>(1, sm.size() / 5);
    const double tail_typical = finite_median({sm.begin() + static_cast<std::ptrdiff_t>(tail_begin), sm.end()});

    const bool deep = traj.termination == Termination::Converged ||
                      (std::isfinite(out.evidence.final_loss) && out.evidence.final_loss < cfg.deep_loss);

    if (deep && spikes.empty()) {
        out.label = uphill_fraction > cfg.chaotic_uphill_fraction ? EmpiricalLabel::ChaoticConvergent
                                                                  : EmpiricalLabel::StableConvergence;
        return out;
    }
    if (typical < floor * cfg.saturation_margin && !spikes.empty()) {
        out.label = EmpiricalLabel::SpikeThenRecoveryOrDivergence;
        return out;
    }
    // Saturation: the run typically lives within a few orders of the SignGD
    // floor and stays bounded. No upper band edge: heavy momentum amplifies
    // the oscillation amplitude well past eta/2 without changing the regime.
    if (typical >= floor * cfg.saturation_margin && !deep && std::isfinite(tail_typical) &&
        traj.termination != Termination::Diverged) {
        out.label = EmpiricalLabel::SignGDOscillation;
        return out;
    }
    if (traj.termination == Termination::Diverged) {
        out.label = EmpiricalLabel::Diverged;
        return out;
    }
    out.label = EmpiricalLabel::Undetermined;
    return out;
}

std::vector<CouplingPoint> coupling_ratio_series(const Trajectory& traj) {
    std::vector<CouplingPoint> pts;
    pts.reserve(traj.samples.size());
    double prev_g2 = quiet_nan();
    for (const auto& s : traj.samples) {
        const double g2 = s.grad * s.grad;
        if (g2 == 0.0 || !std::isfinite(g2)) continue;
        CouplingPoint p;
        p.t = s.t;
        p.R = s.v / g2;
        p.rho = std::isfinite(prev_g2) ? g2 / prev_g2 : quiet_nan();
        pts.push_back(p);
        prev_g2 = g2;
    }
    return pts;
}

CouplingStats coupling_stats(const Trajectory& traj, int smooth_window) {
    CouplingStats out;
    const std::size_t n = traj.samples.size();
    if (n == 0) return out;
    std::vector<double> v(n), g2(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = traj.samples[i].v;
        g2[i] = traj.samples[i].grad * traj.samples[i].grad;
    }
    const std::vector<double> vs = smoothed(v, smooth_window);
    const std::vector<double> gs = smoothed(g2, smooth_window);
    double max_R = -std::numeric_limits<double>::infinity();
    double final_R = quiet_nan();
    std::int64_t argmax_t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gs[i] <= 0.0) continue;
        const double R = vs[i] / gs[i];
        if (!std::isfinite(R)) continue;
        if (R > max_R) {
            max_R = R;
            argmax_t = traj.samples[i].t;
        }
        final_R = R;
    }
    out.max_R = std::isfinite(max_R) ? max_R : quiet_nan();
    out.final_R = final_R;
    out.argmax_t = argmax_t;
    return out;
}

const char* to_string(LimitSet::Class c) {
    switch (c) {
        case LimitSet::Class::FixedPoint: return "FixedPoint";
        case LimitSet::Class::PeriodN: return "PeriodN";
        case LimitSet::Class::ChaoticBounded: return "ChaoticBounded";
        case LimitSet::Class::Escaped: return "Escaped";
    }
    return "?";
}

LimitSet limit_set(const theory::SharpnessMapConfig& cfg, int transient, int record, double tol) {
    if (transient < 1 || record < 1) throw std::invalid_argument("limit_set: transient and record must be >= 1");
    LimitSet out;
    double u = cfg.u0;
    for (int i = 0; i < transient; ++i) u = theory::sharpness_map_step(u, cfg);

    std::vector<double> recorded(static_cast<std::size_t>(record));
    bool escaped = false;
    for (int i = 0; i < record; ++i) {
        if (!std::isfinite(u) || u <= 0.0 || u >= 2.0) {
            escaped = true;
            break;
        }
        recorded[static_cast<std::size_t>(i)] = u;
        u = theory::sharpness_map_step(u, cfg);
    }
    if (escaped) {
        out.kind = LimitSet::Class::Escaped;
        out.period = 0;
        return out;
    }

    const double last = recorded.back();
    out.points = cluster_values(std::move(recorded), tol);

    const int n = static_cast<int>(out.points.size());
    if (n == 1) {
        out.kind = LimitSet::Class::FixedPoint;
        out.period = 1;
        return out;
    }
    if (n <= 64) {
        double w = last;
        for (int s = 0; s < n; ++s) w = theory::sharpness_map_step(w, cfg);
        if (std::fabs(w - last) <= 10.0 * tol) {
            out.kind = LimitSet::Class::PeriodN;
            out.period = n;
            return out;
        }
    }
    out.kind = LimitSet::Class::ChaoticBounded;
    out.period = 0;
    return out;
}

}  // namespace analysis
}  // namespace degenlab
