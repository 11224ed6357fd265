#include "degenlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace degenlab {
namespace io {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t,x,loss,grad,m,v,log_abs_x\n";
    for (const auto& s : traj.samples) {
        out += std::to_string(s.t);
        out += ',';
        out += fmt_double(s.x);
        out += ',';
        out += fmt_double(s.loss);
        out += ',';
        out += fmt_double(s.grad);
        out += ',';
        out += fmt_double(s.m);
        out += ',';
        out += fmt_double(s.v);
        out += ',';
        out += fmt_double(s.log_abs_x);
        out += '\n';
    }
    return out;
}

std::string normalized_trajectory_to_csv(const NormalizedTrajectory& traj) {
    const int k = traj.degree;
    std::string out = "t,omega,lambda,log_abs_x,sign_x,x,loss\n";
    for (const auto& s : traj.samples) {
        const double x = s.sign_x * std::exp(s.log_abs_x);
        const double loss = std::exp(k * s.log_abs_x) / k;
        out += std::to_string(s.t);
        out += ',';
        out += fmt_double(s.omega);
        out += ',';
        out += fmt_double(s.lambda);
        out += ',';
        out += fmt_double(s.log_abs_x);
        out += ',';
        out += std::to_string(s.sign_x);
        out += ',';
        out += fmt_double(x);
        out += ',';
        out += fmt_double(loss);
        out += '\n';
    }
    return out;
}

std::string sweep_to_csv(const sweeps::SweepResult& sweep) {
    std::string out = "i,j,beta1,beta2,min_loss,final_loss,max_R,final_R,empirical,theoretical,termination\n";
    for (const auto& c : sweep.cells) {
        out += std::to_string(c.i);
        out += ',';
        out += std::to_string(c.j);
        out += ',';
        out += fmt_double(c.beta1);
        out += ',';
        out += fmt_double(c.beta2);
        out += ',';
        out += fmt_double(c.min_loss);
        out += ',';
        out += fmt_double(c.final_loss);
        out += ',';
        out += fmt_double(c.max_R);
        out += ',';
        out += fmt_double(c.final_R);
        out += ',';
        out += analysis::to_string(c.empirical);
        out += ',';
        out += to_string(c.theoretical);
        out += ',';
        out += to_string(c.termination);
        out += '\n';
    }
    return out;
}

std::string bifurcation_to_csv(const std::vector<sweeps::GammaLimitSet>& rows) {
    std::string out = "gamma,u_value\n";
    for (const auto& r : rows) {
        for (double u : r.limits.points) {
            out += fmt_double(r.gamma);
            out += ',';
            out += fmt_double(u);
            out += '\n';
        }
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory_from_csv: empty input");
    if (line != "t,x,loss,grad,m,v,log_abs_x")
        throw std::runtime_error("trajectory_from_csv: unexpected header: " + line);

    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TrajectorySample s;
        const char* p = line.c_str();
        char* end = nullptr;
        s.t = std::strtoll(p, &end, 10);
        double* fields[6] = {&s.x, &s.loss, &s.grad, &s.m, &s.v, &s.log_abs_x};
        for (double* f : fields) {
            if (*end != ',') throw std::runtime_error("trajectory_from_csv: malformed row: " + line);
            p = end + 1;
            *f = std::strtod(p, &end);
        }
        traj.samples.push_back(s);
    }
    return traj;
}

json fixed_point_report_to_json(const FixedPointReport& r) {
    json j;
    j["omega_star"] = r.omega_star;
    j["lambda_star"] = r.lambda_star;
    j["gamma"] = r.gamma_factor;
    j["jacobian"] = json::array({json::array({r.jacobian.a11, r.jacobian.a12}),
                                 json::array({r.jacobian.a21, r.jacobian.a22})});
    j["spectral_radius"] = r.spectral_radius;
    j["x_eigenvalue"] = r.x_eigenvalue;
    j["stable"] = r.stable;
    j["regime"] = to_string(r.regime);
    j["conditions"] = {{"primary", r.conditions.primary}, {"lower", r.conditions.lower}};
    j["kind"] = to_string(r.kind);
    j["numeric_analytic_disagree"] = r.numeric_analytic_disagree;
    return j;
}

json fit_result_to_json(const analysis::FitResult& r) {
    json j;
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["r_squared"] = r.r_squared;
    j["window"] = {{"t_start", r.t_start}, {"t_end", r.t_end}};
    j["n_points"] = r.n_points;
    return j;
}

json empirical_regime_to_json(const analysis::EmpiricalRegime& r) {
    json j;
    j["label"] = analysis::to_string(r.label);
    j["evidence"] = {{"min_loss", r.evidence.min_loss},
                     {"final_loss", r.evidence.final_loss},
                     {"spike_times", r.evidence.spike_times},
                     {"signgd_floor", r.evidence.signgd_floor},
                     {"max_coupling_ratio", r.evidence.max_coupling_ratio},
                     {"final_coupling_ratio", r.evidence.final_coupling_ratio}};
    return j;
}

json analysis_config_to_json(const analysis::AnalysisConfig& c) {
    json j;
    j["smooth_window"] = c.smooth_window;
    j["spike_rise_factor"] = c.spike_rise_factor;
    j["deep_loss"] = c.deep_loss;
    j["saturation_margin"] = c.saturation_margin;
    j["chaotic_uphill_fraction"] = c.chaotic_uphill_fraction;
    return j;
}

json grid_spec_to_json(const sweeps::GridSpec& s) {
    json j;
    j["beta1"] = {{"min", s.beta1_min}, {"max", s.beta1_max}, {"count", s.beta1_count}};
    j["beta2"] = {{"min", s.beta2_min}, {"max", s.beta2_max}, {"count", s.beta2_count}};
    j["k"] = s.k;
    j["eta"] = s.eta;
    j["x0"] = s.x0;
    j["max_steps"] = s.max_steps;
    j["smooth_window"] = s.smooth_window;
    j["boundary_delta"] = s.boundary_delta;
    j["endpoint_convention"] = "include min, exclude max, spacing (max-min)/count";
    switch (s.v0.kind) {
        case V0Policy::Kind::ZeroThenFirstGrad: j["v0"] = "zero"; break;
        case V0Policy::Kind::SeedWithG0Sq: j["v0"] = "g0sq"; break;
        case V0Policy::Kind::Explicit: j["v0"] = s.v0.value; break;
    }
    return j;
}

json optimizer_params_to_json(const OptimizerParams& p) {
    json j;
    j["eta"] = p.eta;
    j["beta1"] = p.beta1;
    j["beta2"] = p.beta2;
    j["epsilon"] = p.epsilon;
    j["bias_correction"] = p.bias_correction;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace io
}  // namespace degenlab
