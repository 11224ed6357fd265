// Batch CLI over the degenlab library: single-trajectory simulation, theory
// constants, phase/bifurcation sweeps, and trajectory post-processing.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "degenlab/analysis.hpp"
#include "degenlab/io.hpp"
#include "degenlab/normalized.hpp"
#include "degenlab/sweeps.hpp"
#include "degenlab/theory.hpp"

using namespace degenlab;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

V0Policy parse_v0(const std::string& text) {
    if (text == "zero") return V0Policy::zero();
    if (text == "g0sq") return V0Policy::g0sq();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !(v > 0.0))
        throw UsageError("--v0 must be 'zero', 'g0sq', or a positive number");
    return V0Policy::explicit_value(v);
}

json v0_to_json(const V0Policy& v0) {
    switch (v0.kind) {
        case V0Policy::Kind::ZeroThenFirstGrad: return "zero";
        case V0Policy::Kind::SeedWithG0Sq: return "g0sq";
        case V0Policy::Kind::Explicit: return v0.value;
    }
    return nullptr;
}

void require_even_k(int k, int minimum) {
    if (k < minimum || k % 2 != 0)
        throw UsageError("--k must be an even integer >= " + std::to_string(minimum));
}

void write_with_sidecar(const std::string& path, const std::string& content, const json& meta) {
    io::write_text_file(path, content);
    io::write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

json base_meta(const std::string& command) {
    json j;
    j["tool"] = "degenlab";
    j["version"] = kVersion;
    j["command"] = command;
    return j;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string opt = "adam";
    int k = 4;
    double eta = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 0.0;
    bool bias_correction = false;
    double x0 = 1.0;
    std::int64_t steps = 100000;
    std::string v0 = "zero";
    std::string backend = "raw";
    std::string out = "trajectory.csv";
};

int cmd_simulate(const SimulateOpts& o) {
    if (o.steps < 1) throw UsageError("--steps must be >= 1");
    require_even_k(o.k, 2);
    OptimizerParams p;
    p.eta = o.eta;
    p.beta1 = o.beta1;
    p.beta2 = o.beta2;
    p.epsilon = o.eps;
    p.bias_correction = o.bias_correction;
    p.validate();
    const V0Policy v0 = parse_v0(o.v0);
    const PolynomialObjective obj(o.k);

    json meta = base_meta("simulate");
    meta["config"] = {{"opt", o.opt},   {"k", o.k},           {"eta", o.eta},
                      {"beta1", o.beta1}, {"beta2", o.beta2}, {"eps", o.eps},
                      {"bias_correction", o.bias_correction}, {"x0", o.x0},
                      {"steps", o.steps}, {"v0", v0_to_json(v0)}, {"backend", o.backend},
                      {"out", o.out}};

    if (o.backend == "raw") {
        OptimizerKind kind;
        if (o.opt == "gd") kind = OptimizerKind::GD;
        else if (o.opt == "momentum") kind = OptimizerKind::Momentum;
        else if (o.opt == "rmsprop") kind = OptimizerKind::RMSProp;
        else if (o.opt == "adam") kind = OptimizerKind::Adam;
        else throw UsageError("--opt must be one of gd|momentum|rmsprop|adam");

        const Trajectory traj = run(kind, p, obj, o.x0, v0, o.steps);
        meta["termination"] = to_string(traj.termination);
        meta["samples"] = traj.samples.size();
        write_with_sidecar(o.out, io::trajectory_to_csv(traj), meta);
    } else if (o.backend == "normalized") {
        if (o.opt != "adam" && o.opt != "rmsprop")
            throw UsageError("--backend normalized supports adam or rmsprop");
        require_even_k(o.k, 4);
        OptimizerParams q = p;
        if (o.opt == "rmsprop") q.beta1 = 0.0;
        const NormalizedState init = initial_normalized_state(q, obj, o.x0, v0);
        const NormalizedTrajectory traj = run_normalized(q, o.k, init, o.steps);
        meta["termination"] = to_string(traj.termination);
        meta["samples"] = traj.samples.size();
        write_with_sidecar(o.out, io::normalized_trajectory_to_csv(traj), meta);
    } else {
        throw UsageError("--backend must be raw or normalized");
    }
    return kExitOk;
}

// ------------------------------------------------------------------ theory

struct TheoryOpts {
    int k = 4;
    std::optional<double> beta1, beta2, eta, alpha;
};

int cmd_theory(const TheoryOpts& o) {
    require_even_k(o.k, 2);
    json j;
    j["config"] = {{"k", o.k}};
    if (o.beta1) j["config"]["beta1"] = *o.beta1;
    if (o.beta2) j["config"]["beta2"] = *o.beta2;
    if (o.eta) j["config"]["eta"] = *o.eta;
    if (o.alpha) j["config"]["alpha"] = *o.alpha;

    if (o.k >= 4) {
        j["gamma_crit"] = theory::sharpness_critical_gamma(o.k);
        j["beta2_crit"] = theory::beta2_critical(o.k);
        j["gd_power_exponent"] = theory::gd_power_law(o.k).power_exponent;
        j["momentum_power_exponent"] = theory::momentum_power_law(o.k).power_exponent;
        if (o.alpha) {
            const theory::RatePrediction r = theory::exponential_schedule_rate(o.k, *o.alpha);
            j["exponential_schedule"] = {{"x_rate", r.x_contraction},
                                         {"per_time_rate", *o.alpha / (o.k - 2)},
                                         {"loss_log_slope", r.loss_log_slope}};
        }
        if (o.beta1 && o.beta2 && o.eta) {
            OptimizerParams p;
            p.eta = *o.eta;
            p.beta1 = *o.beta1;
            p.beta2 = *o.beta2;
            p.validate();
            j["fixed_point"] = io::fixed_point_report_to_json(stability_verdict(p, o.k));
            const theory::RatePrediction r = theory::adam_contraction(p, o.k);
            j["rates"] = {{"x_contraction", r.x_contraction},
                          {"loss_log_slope", r.loss_log_slope},
                          {"applicable", r.applicable}};
        }
    } else {
        // k = 2: only the trivial fixed-point line; report the quadratic-case
        // closed forms when the hyperparameters are given.
        if (o.beta1 && o.beta2) {
            OptimizerParams p;
            p.beta1 = *o.beta1;
            p.beta2 = *o.beta2;
            if (o.eta) p.eta = *o.eta;
            const double alpha = o.alpha ? *o.alpha : theory::alpha_from_beta2(p.beta2);
            const theory::QuadraticCase q = theory::quadratic_case(p, alpha, p.eta);
            j["quadratic"] = {{"alpha", q.alpha},
                              {"super_exp_coeff", q.super_exp_coeff},
                              {"momentum_limited_slope", q.momentum_limited_slope},
                              {"applicable", q.applicable},
                              {"fixed_line", {{"omega", q.fixed_line_omega}, {"lambda", q.fixed_line_lambda}}}};
        }
        j["fixed_point"] = {{"kind", "TrivialLine"}, {"regime", "RegimeIII_NoFP"}};
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------- phase

struct PhaseOpts {
    sweeps::GridSpec spec;
    std::string v0 = "zero";
    int jobs = 1;
    std::string out = "phase.csv";
};

int cmd_phase(const PhaseOpts& o_in) {
    PhaseOpts o = o_in;
    o.spec.v0 = parse_v0(o.v0);
    o.spec.validate();
    const sweeps::SweepResult result =
        o.spec.k == 2 ? sweeps::run_quadratic_sweep(o.spec, o.jobs) : sweeps::run_phase_sweep(o.spec, o.jobs);

    json meta = base_meta("phase");
    meta["config"] = io::grid_spec_to_json(o.spec);
    meta["config"]["jobs"] = o.jobs;
    meta["config"]["out"] = o.out;
    analysis::AnalysisConfig acfg;
    acfg.smooth_window = o.spec.smooth_window;
    meta["analysis_thresholds"] = io::analysis_config_to_json(acfg);
    write_with_sidecar(o.out, io::sweep_to_csv(result), meta);
    return kExitOk;
}

// ------------------------------------------------------------- bifurcation

struct BifurcationOpts {
    std::string mode = "map";
    int k = 4;
    double gamma_min = 1.1, gamma_max = 12.0;
    int cells = 400;
    double u0 = 0.1;
    int transient = 500;
    int record = 200;
    double tol = 1e-6;
    // adam mode
    double beta1 = 0.9;
    double beta2_min = 0.01, beta2_max = 0.99;
    double eta = 0.01;
    double x0 = 1.0;
    std::string out = "bifurcation.csv";
};

int cmd_bifurcation(const BifurcationOpts& o) {
    require_even_k(o.k, 4);
    if (o.cells < 2) throw UsageError("--cells must be >= 2");
    if (o.transient < 1 || o.record < 1) throw UsageError("--transient and --record must be >= 1");

    json meta = base_meta("bifurcation");
    std::vector<sweeps::GammaLimitSet> rows;
    if (o.mode == "map") {
        rows = sweeps::run_bifurcation_sweep(o.gamma_min, o.gamma_max, o.cells, o.k, o.u0, o.transient,
                                             o.record, o.tol);
        meta["config"] = {{"mode", "map"},       {"k", o.k},
                          {"gamma_min", o.gamma_min}, {"gamma_max", o.gamma_max},
                          {"cells", o.cells},    {"u0", o.u0},
                          {"transient", o.transient}, {"record", o.record},
                          {"tol", o.tol},        {"out", o.out}};
    } else if (o.mode == "adam") {
        sweeps::AdamBifurcationSpec spec;
        spec.beta1 = o.beta1;
        spec.beta2_min = o.beta2_min;
        spec.beta2_max = o.beta2_max;
        spec.count = o.cells;
        spec.k = o.k;
        spec.eta = o.eta;
        spec.x0 = o.x0;
        spec.transient = o.transient;
        spec.record = o.record;
        spec.tol = o.tol;
        rows = sweeps::run_adam_bifurcation_sweep(spec);
        meta["config"] = {{"mode", "adam"},      {"k", o.k},
                          {"beta1", o.beta1},    {"beta2_min", o.beta2_min},
                          {"beta2_max", o.beta2_max}, {"cells", o.cells},
                          {"eta", o.eta},        {"x0", o.x0},
                          {"transient", o.transient}, {"record", o.record},
                          {"tol", o.tol},        {"out", o.out},
                          {"swept_column", "beta2 reported in the gamma column"}};
    } else {
        throw UsageError("--mode must be map or adam");
    }
    write_with_sidecar(o.out, io::bifurcation_to_csv(rows), meta);
    return kExitOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyOpts {
    std::string in;
    std::optional<int> k;
    std::optional<double> eta;
    int window = 10;
};

int cmd_classify(const ClassifyOpts& o) {
    const std::string csv = io::read_text_file(o.in);
    Trajectory traj = io::trajectory_from_csv(csv);

    int k = o.k.value_or(0);
    double eta = o.eta.value_or(0.0);
    // the sidecar fills anything the flags left out
    try {
        const json meta = json::parse(io::read_text_file(o.in + ".meta.json"));
        if (!o.k && meta.contains("config") && meta["config"].contains("k"))
            k = meta["config"]["k"].get<int>();
        if (!o.eta && meta.contains("config") && meta["config"].contains("eta"))
            eta = meta["config"]["eta"].get<double>();
        if (meta.contains("termination")) {
            const std::string term = meta["termination"].get<std::string>();
            for (Termination t : {Termination::MaxSteps, Termination::Converged, Termination::Underflow,
                                  Termination::Diverged, Termination::DivisionHazard})
                if (term == to_string(t)) traj.termination = t;
        }
    } catch (const std::exception&) {
        // no sidecar: flags must carry the config
    }
    if (k < 2 || k % 2 != 0 || !(eta > 0.0))
        throw UsageError("classify: provide --k and --eta or a metadata sidecar");

    OptimizerParams p;
    p.eta = eta;
    const PolynomialObjective obj(k);
    analysis::AnalysisConfig acfg;
    acfg.smooth_window = o.window;
    const analysis::EmpiricalRegime r = analysis::classify_empirical(traj, p, obj, acfg);

    json j;
    j["config"] = {{"in", o.in}, {"k", k}, {"eta", eta}, {"window", o.window}};
    j["thresholds"] = io::analysis_config_to_json(acfg);
    j["result"] = io::empirical_regime_to_json(r);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitOpts {
    std::string in;
    std::string mode = "loglin";
    std::string series;  // default: loss for loglin, absx for loglog
    double window = -1.0;  // defaults depend on mode
};

int cmd_fit(const FitOpts& o) {
    const std::string csv = io::read_text_file(o.in);
    const Trajectory traj = io::trajectory_from_csv(csv);

    std::string series_name = o.series;
    if (series_name.empty()) series_name = o.mode == "loglog" ? "absx" : "loss";
    analysis::SeriesKind series;
    if (series_name == "loss") series = analysis::SeriesKind::Loss;
    else if (series_name == "absx") series = analysis::SeriesKind::AbsX;
    else if (series_name == "v") series = analysis::SeriesKind::SecondMoment;
    else throw UsageError("--series must be loss|absx|v");

    std::optional<analysis::FitResult> fit;
    double window = o.window;
    if (o.mode == "loglin") {
        if (window <= 0.0) window = 0.5;
        fit = analysis::fit_log_linear(traj, window, series);
    } else if (o.mode == "loglog") {
        if (window <= 0.0) window = 0.9;
        fit = analysis::fit_log_log(traj, window, series);
    } else {
        throw UsageError("--mode must be loglin or loglog");
    }
    if (!fit) throw UsageError("fit: insufficient finite positive samples in the window");

    json j;
    j["config"] = {{"in", o.in}, {"mode", o.mode}, {"series", series_name}, {"window_fraction", window}};
    j["result"] = io::fit_result_to_json(*fit);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimizer dynamics lab for degenerate polynomial objectives"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "run one trajectory and write it as CSV");
    c_sim->add_option("--opt", sim.opt, "gd|momentum|rmsprop|adam");
    c_sim->add_option("--k", sim.k, "even polynomial degree");
    c_sim->add_option("--eta", sim.eta, "learning rate");
    c_sim->add_option("--beta1", sim.beta1, "first-moment decay");
    c_sim->add_option("--beta2", sim.beta2, "second-moment decay");
    c_sim->add_option("--eps", sim.eps, "denominator epsilon");
    c_sim->add_flag("--bias-correction", sim.bias_correction, "enable bias correction");
    c_sim->add_option("--x0", sim.x0, "initial iterate");
    c_sim->add_option("--steps", sim.steps, "maximum steps");
    c_sim->add_option("--v0", sim.v0, "zero|g0sq|<positive value>");
    c_sim->add_option("--backend", sim.backend, "raw|normalized");
    c_sim->add_option("--out", sim.out, "output CSV path");

    TheoryOpts th;
    CLI::App* c_th = app.add_subcommand("theory", "print closed-form constants and predictions as JSON");
    c_th->add_option("--k", th.k, "even polynomial degree")->required();
    double th_b1 = 0, th_b2 = 0, th_eta = 0, th_alpha = 0;
    CLI::Option* o_b1 = c_th->add_option("--beta1", th_b1);
    CLI::Option* o_b2 = c_th->add_option("--beta2", th_b2);
    CLI::Option* o_eta = c_th->add_option("--eta", th_eta);
    CLI::Option* o_alpha = c_th->add_option("--alpha", th_alpha);

    PhaseOpts ph;
    CLI::App* c_ph = app.add_subcommand("phase", "hyperparameter grid sweep, CSV + metadata sidecar");
    c_ph->add_option("--b1-min", ph.spec.beta1_min);
    c_ph->add_option("--b1-max", ph.spec.beta1_max);
    c_ph->add_option("--b1-count", ph.spec.beta1_count);
    c_ph->add_option("--b2-min", ph.spec.beta2_min);
    c_ph->add_option("--b2-max", ph.spec.beta2_max);
    c_ph->add_option("--b2-count", ph.spec.beta2_count);
    c_ph->add_option("--k", ph.spec.k);
    c_ph->add_option("--eta", ph.spec.eta);
    c_ph->add_option("--x0", ph.spec.x0);
    c_ph->add_option("--steps", ph.spec.max_steps);
    c_ph->add_option("--window", ph.spec.smooth_window);
    c_ph->add_option("--boundary-delta", ph.spec.boundary_delta);
    c_ph->add_option("--v0", ph.v0);
    c_ph->add_option("--jobs", ph.jobs);
    c_ph->add_option("--out", ph.out);

    BifurcationOpts bf;
    CLI::App* c_bf = app.add_subcommand("bifurcation", "limit sets of the sharpness map (or adam variant)");
    c_bf->add_option("--mode", bf.mode, "map|adam");
    c_bf->add_option("--k", bf.k);
    c_bf->add_option("--gamma-min", bf.gamma_min);
    c_bf->add_option("--gamma-max", bf.gamma_max);
    c_bf->add_option("--cells", bf.cells);
    c_bf->add_option("--u0", bf.u0);
    c_bf->add_option("--transient", bf.transient);
    c_bf->add_option("--record", bf.record);
    c_bf->add_option("--tol", bf.tol);
    c_bf->add_option("--beta1", bf.beta1);
    c_bf->add_option("--beta2-min", bf.beta2_min);
    c_bf->add_option("--beta2-max", bf.beta2_max);
    c_bf->add_option("--eta", bf.eta);
    c_bf->add_option("--x0", bf.x0);
    c_bf->add_option("--out", bf.out);

    ClassifyOpts cl;
    CLI::App* c_cl = app.add_subcommand("classify", "label a trajectory CSV with its empirical regime");
    c_cl->add_option("--in", cl.in)->required();
    int cl_k = 0;
    double cl_eta = 0;
    CLI::Option* o_cl_k = c_cl->add_option("--k", cl_k);
    CLI::Option* o_cl_eta = c_cl->add_option("--eta", cl_eta);
    c_cl->add_option("--window", cl.window);

    FitOpts ft;
    CLI::App* c_ft = app.add_subcommand("fit", "slope fits over a trajectory CSV");
    c_ft->add_option("--in", ft.in)->required();
    c_ft->add_option("--mode", ft.mode, "loglin|loglog");
    c_ft->add_option("--series", ft.series, "loss|absx|v");
    c_ft->add_option("--window", ft.window, "trailing window fraction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*c_sim) return cmd_simulate(sim);
        if (*c_th) {
            if (*o_b1) th.beta1 = th_b1;
            if (*o_b2) th.beta2 = th_b2;
            if (*o_eta) th.eta = th_eta;
            if (*o_alpha) th.alpha = th_alpha;
            return cmd_theory(th);
        }
        if (*c_ph) return cmd_phase(ph);
        if (*c_bf) return cmd_bifurcation(bf);
        if (*c_cl) {
            if (*o_cl_k) cl.k = cl_k;
            if (*o_cl_eta) cl.eta = cl_eta;
            return cmd_classify(cl);
        }
        if (*c_ft) return cmd_fit(ft);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
