#include "degenlab/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace degenlab {
namespace sweeps {

void GridSpec::validate() const {
    if (beta1_count < 2 || beta2_count < 2) throw std::invalid_argument("GridSpec: counts must be >= 2");
    if (beta1_min < 0.0 || beta1_max > 1.0 || beta2_min < 0.0 || beta2_max > 1.0 ||
        beta1_min >= beta1_max || beta2_min >= beta2_max)
        throw std::invalid_argument("GridSpec: ranges must be increasing and within [0,1)");
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("GridSpec: k must be an even integer >= 2");
    if (!(eta > 0.0)) throw std::invalid_argument("GridSpec: eta must be > 0");
    if (max_steps < 1) throw std::invalid_argument("GridSpec: max_steps must be >= 1");
}

CellResult run_phase_cell(const GridSpec& spec, int i, int j) {
    CellResult cell;
    cell.i = i;
    cell.j = j;
    cell.beta1 = spec.beta1_at(i);
    cell.beta2 = spec.beta2_at(j);

    OptimizerParams p;
    p.eta = spec.eta;
    p.beta1 = cell.beta1;
    p.beta2 = cell.beta2;
    p.epsilon = 0.0;
    p.bias_correction = false;

    cell.theoretical = classify_regime_theoretical(p, spec.k, spec.boundary_delta);

    const PolynomialObjective obj(spec.k);
    try {
        const Trajectory traj = run(OptimizerKind::Adam, p, obj, spec.x0, spec.v0, spec.max_steps);
        analysis::AnalysisConfig acfg;
        acfg.smooth_window = spec.smooth_window;
        const analysis::EmpiricalRegime er = analysis::classify_empirical(traj, p, obj, acfg);
        cell.min_loss = er.evidence.min_loss;
        cell.final_loss = er.evidence.final_loss;
        cell.max_R = er.evidence.max_coupling_ratio;
        cell.final_R = er.evidence.final_coupling_ratio;
        cell.empirical = er.label;
        cell.termination = traj.termination;
    } catch (const std::exception&) {
        cell.empirical = analysis::EmpiricalLabel::Undetermined;
        cell.min_loss = quiet_nan();
        cell.final_loss = quiet_nan();
        cell.max_R = quiet_nan();
        cell.final_R = quiet_nan();
        cell.termination = Termination::DivisionHazard;
    }
    return cell;
}

SweepResult run_phase_sweep(const GridSpec& spec, int jobs) {
    spec.validate();
    if (jobs < 1) jobs = 1;

    SweepResult result;
    result.spec = spec;
    const int total = spec.beta1_count * spec.beta2_count;
    result.cells.resize(static_cast<std::size_t>(total));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= total) return;
            const int i = idx / spec.beta2_count;
            const int j = idx % spec.beta2_count;
            result.cells[static_cast<std::size_t>(idx)] = run_phase_cell(spec, i, j);
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

SweepResult run_quadratic_sweep(const GridSpec& spec, int jobs) {
    if (spec.k != 2) throw std::invalid_argument("run_quadratic_sweep: k must be 2");
    return run_phase_sweep(spec, jobs);
}

std::vector<GammaLimitSet> run_bifurcation_sweep(double gamma_min, double gamma_max, int count, int k,
                                                 double u0, int transient, int record, double tol) {
    if (count < 2) throw std::invalid_argument("run_bifurcation_sweep: count must be >= 2");
    const std::vector<double> gammas = linspace_inclusive(gamma_min, gamma_max, count);
    std::vector<GammaLimitSet> out;
    out.reserve(gammas.size());
    for (double g : gammas) {
        theory::SharpnessMapConfig cfg{g, k, u0};
        out.push_back({g, analysis::limit_set(cfg, transient, record, tol)});
    }
    return out;
}

std::vector<GammaLimitSet> run_adam_bifurcation_sweep(const AdamBifurcationSpec& spec) {
    if (spec.count < 2) throw std::invalid_argument("run_adam_bifurcation_sweep: count must be >= 2");
    if (spec.transient < 1 || spec.record < 1)
        throw std::invalid_argument("run_adam_bifurcation_sweep: transient and record must be >= 1");

    const PolynomialObjective obj(spec.k);
    const std::vector<double> betas = linspace_inclusive(spec.beta2_min, spec.beta2_max, spec.count);
    std::vector<GammaLimitSet> out;
    out.reserve(betas.size());

    for (double b2 : betas) {
        OptimizerParams p;
        p.eta = spec.eta;
        p.beta1 = spec.beta1;
        p.beta2 = b2;

        analysis::LimitSet ls;
        std::vector<double> recorded;
        recorded.reserve(static_cast<std::size_t>(spec.record));
        bool escaped = false;

        NormalizedState s = initial_normalized_state(p, obj, spec.x0, spec.v0);
        for (int t = 0; t < spec.transient + spec.record; ++t) {
            const double u = spec.eta * s.omega * s.lambda;
            if (t >= spec.transient) {
                if (!std::isfinite(u) || u <= 0.0 || u >= 2.0) {
                    escaped = true;
                    break;
                }
                recorded.push_back(u);
            }
            const NormStepResult r = step_normalized(s, p, spec.k);
            if (r.status != NormStatus::Ok) {
                escaped = true;
                break;
            }
            s = r.state;
        }

        if (escaped || recorded.size() < static_cast<std::size_t>(spec.record)) {
            ls.kind = analysis::LimitSet::Class::Escaped;
            ls.period = 0;
        } else {
            ls.points = analysis::cluster_values(std::move(recorded), spec.tol);
            const int n = static_cast<int>(ls.points.size());
            if (n == 1) {
                ls.kind = analysis::LimitSet::Class::FixedPoint;
                ls.period = 1;
            } else if (n <= 64) {
                ls.kind = analysis::LimitSet::Class::PeriodN;
                ls.period = n;
            } else {
                ls.kind = analysis::LimitSet::Class::ChaoticBounded;
                ls.period = 0;
            }
        }
        out.push_back({b2, std::move(ls)});
    }
    return out;
}

}  // namespace sweeps
}  // namespace degenlab
