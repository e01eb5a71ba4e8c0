#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tvpbreak/diff_operator.hpp"

namespace tvpbreak {

enum class GroupWeighting {
  Unit,      // w_t = 1
  SqrtSize,  // w_t = sqrt(n)
};

Eigen::VectorXd make_group_weights(int periods, int coef_dim, GroupWeighting weighting);

struct SolverConfig {
  double lambda = 1.0;
  Eigen::VectorXd group_weights;  // length T; empty means all ones
  double kkt_tol = 1e-6;
  int max_sweeps = 10000;
  double objective_tol = 1e-10;
  bool record_objective_trace = false;
  bool extrapolate = true;
};

/// Result of one group-LASSO solve. `deltas` are in original units; the
/// diagnostics (objective, kkt_residual) refer to the solver's scaled problem.
struct GroupLassoSolution {
  double lambda = 0.0;
  Eigen::MatrixXd deltas;         // n x T, original units, dust groups zeroed
  Eigen::MatrixXd scaled_deltas;  // n x T, solver coordinates, as iterated
  std::vector<int> active_set;    // 1-based periods, ascending
  double objective = 0.0;
  int sweeps = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // per sweep, index 0 = start point; filled on request
};

struct PathPoint {
  double lambda = 0.0;
  GroupLassoSolution solution;
};

enum class PathMode {
  SequentialWarmStart,
  ConcurrentColdStart,
};

struct PathOptions {
  int num_lambdas = 50;
  double min_ratio = 0.01;
  PathMode mode = PathMode::SequentialWarmStart;
  /// Sequential mode only: end the path at the first point with exactly this
  /// many active periods (nothing past it can change a fixed-k selection).
  std::optional<int> stop_at_active_count;
};

struct BicCriterion {};
struct FixedKCriterion {
  int k = 0;
};
using SelectionCriterion = std::variant<BicCriterion, FixedKCriterion>;

/// max(0, 1 - tau/||v||) * v, and 0 for v = 0.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double tau);

/// Smallest lambda at which Delta beta = 0 satisfies the optimality conditions:
/// max_t ||Xtilde_t' rhat|| / w_t on the solver's problem.
double lambda_max(const DifferenceDesign& design, const ResidualTarget& target, const Eigen::VectorXd& weights = {});

/// Largest violation of the optimality conditions at scaled_deltas.
///
/// Active groups contribute ||g_t + lambda w_t d_t/||d_t|| ||; inactive groups
/// contribute max(0, ||g_t||/w_t - lambda), with g the gradient of the smooth part.
double kkt_residual(const DifferenceDesign& design, const ResidualTarget& target, double lambda,
                    const Eigen::VectorXd& weights, const Eigen::MatrixXd& scaled_deltas);

/// Block proximal coordinate descent over periods t = 1..T.
///
/// `warm_start` is given in original units (n x T). Reaching max_sweeps is not
/// an exception: the solution comes back with converged == false.
GroupLassoSolution solve(const DifferenceDesign& design, const ResidualTarget& target, const SolverConfig& config,
                         const std::optional<Eigen::MatrixXd>& warm_start = std::nullopt);

/// Log-spaced lambda grid from lambda_max down to min_ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, int num_lambdas, double min_ratio);

/// Solutions along lambda_grid(), in decreasing-lambda order (possibly truncated,
/// see PathOptions::stop_at_active_count).
std::vector<PathPoint> solve_path(const DifferenceDesign& design, const ResidualTarget& target,
                                  const SolverConfig& config_base, const PathOptions& options = {});

/// Residual sum of squares in original units for given deltas.
double residual_sum_squares(const DifferenceDesign& design, const ResidualTarget& target,
                            const Eigen::MatrixXd& deltas);

/// BIC value mT log(RSS/mT) + log(mT) * (n + nonzero coefficients).
double bic_score(const DifferenceDesign& design, const ResidualTarget& target, const GroupLassoSolution& solution);

/// Index into `path` of the chosen point. Throws NoMatchingLambda when a
/// fixed-k criterion has no grid point with exactly k active periods.
std::size_t select_lambda(const std::vector<PathPoint>& path, const DifferenceDesign& design,
                          const ResidualTarget& target, const SelectionCriterion& criterion);

}  // namespace tvpbreak
