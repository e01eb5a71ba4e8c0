#include "tvpbreak/breakpipe.hpp"

#include <cmath>
#include <sstream>

#include "tvpbreak/diff_operator.hpp"
#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {

// Below this fraction of ||y|| the residual target counts as exactly zero.
constexpr double kZeroResidual = 1e-10;

BreakReport assemble(const RegressionPanel& panel, const Eigen::VectorXd& beta0, const GroupLassoSolution& sol) {
  BreakReport report;
  report.path = reconstruct_path(beta0, sol.deltas);
  for (int period : sol.active_set) {
    BreakEvent event;
    event.period = period;
    event.label = panel.label(period - 1);
    event.jump = sol.deltas.col(period - 1);
    event.magnitude = event.jump.norm();
    report.breaks.push_back(std::move(event));
  }
  report.diagnostics.sweeps = sol.sweeps;
  report.diagnostics.objective = sol.objective;
  report.diagnostics.kkt_residual = sol.kkt_residual;
  report.diagnostics.converged = sol.converged;
  return report;
}

}  // namespace

std::string describe(const std::variant<FixedLambda, PathSelection>& choice) {
  if (std::holds_alternative<FixedLambda>(choice)) return "fixed-lambda";
  const auto& criterion = std::get<PathSelection>(choice).criterion;
  if (const auto* fixed = std::get_if<FixedKCriterion>(&criterion)) {
    std::ostringstream out;
    out << "fixed-k=" << fixed->k;
    return out.str();
  }
  return "bic";
}

BreakReport detect_breaks(const RegressionPanel& panel, const DetectConfig& config) {
  const OlsBaseline baseline = fit_baseline(panel, config.ridge_fallback);
  Eigen::VectorXd beta0 = baseline.beta0;
  if (config.beta0_override) {
    if (config.beta0_override->size() != panel.coef_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "beta0 override has the wrong length");
    }
    beta0 = *config.beta0_override;
  }

  auto [design, target] = build_design(panel, beta0, /*normalize=*/true);
  SolverConfig solver = config.solver;
  solver.group_weights = make_group_weights(panel.periods(), panel.coef_dim(), config.weighting);

  BreakDiagnostics diag;
  diag.response_scale = design.response_scale();
  diag.ridge_used = baseline.ridge_used;
  diag.baseline_rank = baseline.rank;
  diag.baseline_residual_norm = baseline.residual_norm;
  diag.kkt_tol = solver.kkt_tol;
  diag.max_sweeps = solver.max_sweeps;
  diag.objective_tol = solver.objective_tol;

  const double y_norm = panel.stacked_response().norm();
  const std::string criterion = describe(config.lambda_choice);

  if (target.r.norm() <= kZeroResidual * std::max(1.0, y_norm)) {
    BreakReport report;
    report.path = reconstruct_path(beta0, Eigen::MatrixXd::Zero(panel.coef_dim(), panel.periods()));
    report.lambda_used = 0.0;
    report.criterion = criterion;
    diag.degenerate = true;
    report.diagnostics = diag;
    return report;
  }

  diag.lambda_max = lambda_max(design, target, solver.group_weights);

  BreakReport report;
  if (const auto* fixed = std::get_if<FixedLambda>(&config.lambda_choice)) {
    solver.lambda = fixed->lambda;
    const GroupLassoSolution sol = solve(design, target, solver);
    report = assemble(panel, beta0, sol);
    report.lambda_used = sol.lambda;
    diag.not_converged_warning = !sol.converged;
  } else {
    const auto& selection = std::get<PathSelection>(config.lambda_choice);
    PathOptions options = selection.path;
    const auto* fixed_k = std::get_if<FixedKCriterion>(&selection.criterion);
    if (fixed_k && selection.stop_at_fixed_k) options.stop_at_active_count = fixed_k->k;
    const std::vector<PathPoint> path = solve_path(design, target, solver, options);
    const std::size_t chosen = select_lambda(path, design, target, selection.criterion);
    report = assemble(panel, beta0, path[chosen].solution);
    report.lambda_used = path[chosen].lambda;
    for (const auto& point : path) {
      const auto& sol = point.solution;
      report.lambda_path.push_back({point.lambda, static_cast<int>(sol.active_set.size()), sol.objective,
                                    sol.sweeps, sol.converged, sol.kkt_residual,
                                    bic_score(design, target, sol)});
      if (!sol.converged) ++diag.unconverged_path_points;
    }
    diag.not_converged_warning = !path[chosen].solution.converged;
  }
  diag.sweeps = report.diagnostics.sweeps;
  diag.objective = report.diagnostics.objective;
  diag.kkt_residual = report.diagnostics.kkt_residual;
  diag.converged = report.diagnostics.converged;
  report.diagnostics = diag;
  report.criterion = criterion;
  return report;
}

}  // namespace tvpbreak
