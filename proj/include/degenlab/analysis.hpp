#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "degenlab/optimizers.hpp"
#include "degenlab/theory.hpp"

namespace degenlab {
namespace analysis {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    int n_points = 0;
};

enum class SeriesKind { Loss, AbsX, SecondMoment };

// OLS of ln(series) against t over the trailing window_fraction of the
// exponential phase. The phase is the maximal suffix over which a 50-step
// sliding mean of the ln-increments stays negative, which pins the fit to
// the visually linear segment deterministically. Empty when fewer than 20
// usable samples land in the window.
std::optional<FitResult> fit_log_linear(const Trajectory& traj, double window_fraction,
                                        SeriesKind series = SeriesKind::Loss);

// OLS of ln(series) against ln(t) over the trailing window_fraction of
// simulated time (0.9 keeps the last decade in t). Samples with t = 0 are
// excluded.
std::optional<FitResult> fit_log_log(const Trajectory& traj, double window_fraction,
                                     SeriesKind series = SeriesKind::AbsX);

struct SpikeEvent {
    std::int64_t t = 0;          // first sample of the excursion
    std::int64_t t_peak = 0;
    double peak_loss = 0.0;
    double running_min_before = 0.0;
};

// An excursion where the loss exceeds rise_factor times the running minimum
// after that minimum has dropped below `floor`. Contiguous above-threshold
// samples merge into one event. Ratio-based, so uniform positive rescaling
// of the loss leaves the result unchanged.
std::vector<SpikeEvent> detect_spikes(const Trajectory& traj, double rise_factor, double floor);

// Loss level L(eta/2) around which sign-descent with constant step stalls.
double signgd_floor(const OptimizerParams& p, const PolynomialObjective& obj);

enum class EmpiricalLabel {
    StableConvergence,
    SpikeThenRecoveryOrDivergence,
    SignGDOscillation,
    ChaoticConvergent,
    Diverged,
    Undetermined,
};

const char* to_string(EmpiricalLabel l);

struct AnalysisConfig {
    int smooth_window = 10;            // sliding-mean window for loss and ratio series
    double spike_rise_factor = 1e3;    // "violent" = 3 orders over the running min
    double deep_loss = 1e-100;         // convergence evidence threshold
    double saturation_margin = 1e-3;   // saturated runs keep median loss above floor*margin
    double chaotic_uphill_fraction = 0.05;  // sawtooth discriminator on dln(loss)
};

struct RegimeEvidence {
    double min_loss = 0.0;    // over the smoothed series
    double final_loss = 0.0;  // smoothed
    std::vector<std::int64_t> spike_times;
    double signgd_floor = 0.0;
    double max_coupling_ratio = 0.0;
    double final_coupling_ratio = 0.0;
};

struct EmpiricalRegime {
    EmpiricalLabel label = EmpiricalLabel::Undetermined;
    RegimeEvidence evidence;
};

// Decision procedure over the smoothed loss series. The deciding statistic
// is the median of the smoothed series: saturated runs intermittently
// collapse into micro-scale oscillation episodes whose running minimum lands
// hundreds of orders below the saturation band, so a min-based rule cannot
// tell a spiking run from an oscillating one; the median tracks where the
// trajectory actually lives.
//   deep convergence with no spikes  -> StableConvergence, or
//                                       ChaoticConvergent when the ln-loss
//                                       path is a descending sawtooth
//   median below floor*margin with a spike  -> SpikeThenRecoveryOrDivergence
//   median at floor scale, bounded          -> SignGDOscillation
//   Diverged termination without the spike signature -> Diverged
//   anything else -> Undetermined
EmpiricalRegime classify_empirical(const Trajectory& traj, const OptimizerParams& p,
                                   const PolynomialObjective& obj, const AnalysisConfig& cfg = {});

struct CouplingPoint {
    std::int64_t t = 0;
    double R = 0.0;    // v / g^2
    double rho = 0.0;  // g^2 / previous g^2, NaN on the first valid point
};

// Exact per-sample ratios at points with nonzero gradient; zero-gradient
// samples are skipped.
std::vector<CouplingPoint> coupling_ratio_series(const Trajectory& traj);

struct CouplingStats {
    double max_R = 0.0;
    double final_R = 0.0;
    std::int64_t argmax_t = 0;
};

// Smoothed ratio smooth(v)/smooth(g^2) with a sliding mean of width w over
// each series separately; windows whose smoothed g^2 is zero are skipped.
// Smoothing numerator and denominator independently keeps one near-zero
// gradient sample from blowing up the ratio.
CouplingStats coupling_stats(const Trajectory& traj, int smooth_window);

struct LimitSet {
    enum class Class { FixedPoint, PeriodN, ChaoticBounded, Escaped };
    Class kind = Class::FixedPoint;
    int period = 1;               // meaningful for FixedPoint (1) and PeriodN
    std::vector<double> points;   // sorted cluster representatives
};

const char* to_string(LimitSet::Class c);

// Iterate the sharpness map for `transient` steps, record `record` values,
// dedupe within tol. Escaped when any post-transient iterate leaves (0, 2)
// or turns non-finite. PeriodN requires the exact cycle to close within tol;
// bounded sets with more than 64 clusters (or a failed cycle check) are
// ChaoticBounded.
LimitSet limit_set(const theory::SharpnessMapConfig& cfg, int transient, int record, double tol = 1e-6);

// Sliding mean with trailing window w (period-1 prefix ramps up).
std::vector<double> smoothed(const std::vector<double>& v, int w);

// Sort and merge values whose neighbors lie within tol, returning one mean
// representative per cluster.
std::vector<double> cluster_values(std::vector<double> values, double tol);

}  // namespace analysis
}  // namespace degenlab
