#pragma once

#include <cstdint>
#include <vector>

#include "degenlab/analysis.hpp"
#include "degenlab/normalized.hpp"

namespace degenlab {
namespace sweeps {

// Grid points are min + i*(max-min)/count, i in [0, count): the low endpoint
// is included, the high one excluded, matching the half-open [min, max)
// protocol. Cells are ordered row-major, beta1 outer, beta2 inner.
struct GridSpec {
    double beta1_min = 0.01, beta1_max = 0.99;
    int beta1_count = 50;
    double beta2_min = 0.01, beta2_max = 0.99;
    int beta2_count = 50;

    int k = 4;
    double eta = 1e-3;
    double x0 = 1.0;
    std::int64_t max_steps = 100000;
    V0Policy v0 = V0Policy::zero();
    int smooth_window = 10;
    double boundary_delta = 1e-4;

    void validate() const;
    double beta1_at(int i) const { return beta1_min + i * (beta1_max - beta1_min) / beta1_count; }
    double beta2_at(int j) const { return beta2_min + j * (beta2_max - beta2_min) / beta2_count; }
};

struct CellResult {
    int i = 0, j = 0;
    double beta1 = 0.0, beta2 = 0.0;
    double min_loss = 0.0, final_loss = 0.0;  // smoothed, window = spec.smooth_window
    double max_R = 0.0, final_R = 0.0;
    analysis::EmpiricalLabel empirical = analysis::EmpiricalLabel::Undetermined;
    RegimeLabel theoretical = RegimeLabel::RegimeIII_NoFP;
    Termination termination = Termination::MaxSteps;
};

struct SweepResult {
    GridSpec spec;
    std::vector<CellResult> cells;  // row-major, beta1 outer
};

// One cell, a pure function of (spec, i, j); recomputing it standalone gives
// exactly the in-sweep value.
CellResult run_phase_cell(const GridSpec& spec, int i, int j);

// Full grid; cells evaluated on `jobs` threads, gathered into a preallocated
// row-major table so the output is invariant to the worker count. Per-cell
// analysis failures degrade to Undetermined labels, never abort the sweep.
SweepResult run_phase_sweep(const GridSpec& spec, int jobs = 1);

// Same engine restricted to the quadratic objective (k = 2), where no stable
// convergence regime exists and the theoretical label is RegimeIII for every
// cell. Defaults follow the quadratic protocol x0 = 1.005, eta = 0.01.
SweepResult run_quadratic_sweep(const GridSpec& spec, int jobs = 1);

struct GammaLimitSet {
    double gamma = 0.0;  // the swept parameter (beta2 in the adam variant)
    analysis::LimitSet limits;
};

// Limit sets of the sharpness map over an inclusive gamma grid.
std::vector<GammaLimitSet> run_bifurcation_sweep(double gamma_min, double gamma_max, int count, int k,
                                                 double u0, int transient, int record, double tol = 1e-6);

// Adam variant: sweep beta2 at fixed beta1 and record the sharpness proxy
// u_t = eta * omega_t * lambda_t from the normalized dynamics after the
// transient. Orbits that leave (0, 2), hit a degenerate step, or blow up are
// Escaped.
struct AdamBifurcationSpec {
    double beta1 = 0.9;
    double beta2_min = 0.01, beta2_max = 0.99;
    int count = 100;
    int k = 4;
    double eta = 0.01;
    double x0 = 1.0;
    V0Policy v0 = V0Policy::zero();
    int transient = 500;
    int record = 200;
    double tol = 1e-6;
};

std::vector<GammaLimitSet> run_adam_bifurcation_sweep(const AdamBifurcationSpec& spec);

}  // namespace sweeps
}  // namespace degenlab
