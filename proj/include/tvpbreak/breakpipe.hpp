#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tvpbreak/baseline.hpp"
#include "tvpbreak/group_lasso.hpp"
#include "tvpbreak/panel.hpp"

namespace tvpbreak {

/// Solve once at a given lambda.
struct FixedLambda {
  double lambda = 0.0;
};

/// Trace a lambda path and pick one point on it.
struct PathSelection {
  PathOptions path;
  SelectionCriterion criterion = BicCriterion{};
  /// Fixed-k only: end the path at the first point with k active periods.
  bool stop_at_fixed_k = true;
};

struct DetectConfig {
  std::variant<FixedLambda, PathSelection> lambda_choice = PathSelection{};
  SolverConfig solver;  // lambda is overwritten per solve
  GroupWeighting weighting = GroupWeighting::Unit;
  double ridge_fallback = kDefaultRidgeFallback;
  /// Use this baseline instead of the pooled OLS fit (the VEC pipeline passes vec(Pi)).
  std::optional<Eigen::VectorXd> beta0_override;
};

struct BreakEvent {
  int period = 0;  // 1-based
  std::optional<std::string> label;
  double magnitude = 0.0;  // ||jump||_2, original units
  Eigen::VectorXd jump;
};

struct PathSummaryRow {
  double lambda = 0.0;
  int active_count = 0;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  double bic = 0.0;
};

struct BreakDiagnostics {
  int sweeps = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  bool converged = true;
  bool not_converged_warning = false;  // the reported solve missed the KKT target
  int unconverged_path_points = 0;
  double lambda_max = 0.0;
  double response_scale = 0.0;
  bool ridge_used = false;
  int baseline_rank = 0;
  double baseline_residual_norm = 0.0;
  bool degenerate = false;  // zero residual target; no solve was run
  double kkt_tol = 0.0;
  int max_sweeps = 0;
  double objective_tol = 0.0;
};

struct BreakReport {
  std::vector<BreakEvent> breaks;
  CoefficientPath path;
  double lambda_used = 0.0;
  std::string criterion;  // "fixed-lambda", "bic", "fixed-k=2", ...
  BreakDiagnostics diagnostics;
  std::vector<PathSummaryRow> lambda_path;  // empty for fixed-lambda runs
};

/// Baseline fit, difference-form construction (normalized), group-LASSO solve
/// or path + selection, and path reconstruction.
///
/// A zero residual target short-circuits to the baseline with no breaks and
/// lambda_used = 0.
BreakReport detect_breaks(const RegressionPanel& panel, const DetectConfig& config = {});

/// Human-readable name of a selection setting.
std::string describe(const std::variant<FixedLambda, PathSelection>& choice);

}  // namespace tvpbreak
