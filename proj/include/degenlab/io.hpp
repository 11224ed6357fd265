#pragma once

#include <string>

#include "json.hpp"

#include "degenlab/analysis.hpp"
#include "degenlab/normalized.hpp"
#include "degenlab/sweeps.hpp"

namespace degenlab {
namespace io {

using nlohmann::json;

// %.17g: enough digits to round-trip a double exactly.
std::string fmt_double(double v);

// Exact header: t,x,loss,grad,m,v,log_abs_x
std::string trajectory_to_csv(const Trajectory& traj);

// Header: t,omega,lambda,log_abs_x,sign_x,x,loss. x and loss are the
// reconstructed raw values; both underflow to 0 once log|x| is deep enough,
// which is expected for this backend.
std::string normalized_trajectory_to_csv(const NormalizedTrajectory& traj);

// Exact header: i,j,beta1,beta2,min_loss,final_loss,max_R,final_R,empirical,theoretical,termination
std::string sweep_to_csv(const sweeps::SweepResult& sweep);

// Exact header: gamma,u_value — one row per limit-set point; escaped cells
// contribute no rows.
std::string bifurcation_to_csv(const std::vector<sweeps::GammaLimitSet>& rows);

// Parses a trajectory CSV produced by trajectory_to_csv. Termination is not
// part of the CSV; callers restore it from the metadata sidecar.
Trajectory trajectory_from_csv(const std::string& text);

json fixed_point_report_to_json(const FixedPointReport& r);
json fit_result_to_json(const analysis::FitResult& r);
json empirical_regime_to_json(const analysis::EmpiricalRegime& r);
json analysis_config_to_json(const analysis::AnalysisConfig& c);
json grid_spec_to_json(const sweeps::GridSpec& s);
json optimizer_params_to_json(const OptimizerParams& p);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace io
}  // namespace degenlab
