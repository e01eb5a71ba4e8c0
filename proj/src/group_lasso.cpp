#include "tvpbreak/group_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {

// A group counts as a break only above this fraction of ||r|| (original units).
constexpr double kActiveThreshold = 1e-8;
// Flat sweeps without KKT progress before a solve is declared stuck.
constexpr int kStallSweeps = 500;

Eigen::VectorXd resolve_weights(const Eigen::VectorXd& weights, int periods) {
  if (weights.size() == 0) return Eigen::VectorXd::Ones(periods);
  if (weights.size() != periods) {
    std::ostringstream msg;
    msg << "expected " << periods << " group weights, got " << weights.size();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (!(weights.array() > 0.0).all() || !weights.allFinite()) {
    throw Error(ErrorCode::InvalidConfig, "group weights must be positive and finite");
  }
  return weights;
}

void check_config(const SolverConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
    throw Error(ErrorCode::InvalidConfig, "lambda must be positive and finite");
  }
  if (!(config.kkt_tol > 0.0) || !(config.objective_tol > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "tolerances must be positive");
  }
  if (config.max_sweeps < 1) throw Error(ErrorCode::InvalidConfig, "max_sweeps must be at least 1");
}

double penalty(const Eigen::MatrixXd& scaled, const Eigen::VectorXd& weights) {
  double sum = 0.0;
  for (Eigen::Index t = 0; t < scaled.cols(); ++t) sum += weights(t) * scaled.col(t).norm();
  return sum;
}

// Gradient of 1/2 ||rhat - A delta||^2 with respect to the solver coordinates, n x T.
Eigen::MatrixXd smooth_gradient(const DifferenceDesign& design, const Eigen::VectorXd& rhat,
                                const Eigen::MatrixXd& scaled, Eigen::VectorXd* residual) {
  const auto& mult = design.coefficient_multipliers();
  Eigen::VectorXd res = rhat - design.raw_apply(mult.cwiseProduct(scaled));
  Eigen::MatrixXd grad = -design.raw_adjoint(res).cwiseProduct(mult);
  if (residual) *residual = std::move(res);
  return grad;
}

double kkt_from_gradient(const Eigen::MatrixXd& grad, const Eigen::MatrixXd& scaled, double lambda,
                         const Eigen::VectorXd& weights) {
  double worst = 0.0;
  for (Eigen::Index t = 0; t < scaled.cols(); ++t) {
    const double norm = scaled.col(t).norm();
    double violation = 0.0;
    if (norm > 0.0) {
      violation = (grad.col(t) + (lambda * weights(t) / norm) * scaled.col(t)).norm();
    } else {
      violation = std::max(0.0, grad.col(t).norm() / weights(t) - lambda);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace

Eigen::VectorXd make_group_weights(int periods, int coef_dim, GroupWeighting weighting) {
  const double w = weighting == GroupWeighting::SqrtSize ? std::sqrt(static_cast<double>(coef_dim)) : 1.0;
  return Eigen::VectorXd::Constant(periods, w);
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double tau) {
  const double norm = v.norm();
  if (norm == 0.0 || norm <= tau) return Eigen::VectorXd::Zero(v.size());
  return (1.0 - tau / norm) * v;
}

double lambda_max(const DifferenceDesign& design, const ResidualTarget& target, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd w = resolve_weights(weights, design.periods());
  const Eigen::MatrixXd corr =
      design.raw_adjoint(design.solver_target(target)).cwiseProduct(design.coefficient_multipliers());
  double best = 0.0;
  for (Eigen::Index t = 0; t < corr.cols(); ++t) best = std::max(best, corr.col(t).norm() / w(t));
  return best;
}

double kkt_residual(const DifferenceDesign& design, const ResidualTarget& target, double lambda,
                    const Eigen::VectorXd& weights, const Eigen::MatrixXd& scaled_deltas) {
  const Eigen::VectorXd w = resolve_weights(weights, design.periods());
  const Eigen::MatrixXd grad = smooth_gradient(design, design.solver_target(target), scaled_deltas, nullptr);
  return kkt_from_gradient(grad, scaled_deltas, lambda, w);
}

GroupLassoSolution solve(const DifferenceDesign& design, const ResidualTarget& target, const SolverConfig& config,
                         const std::optional<Eigen::MatrixXd>& warm_start) {
  check_config(config);
  const int T = design.periods();
  const int n = design.coef_dim();
  const Eigen::VectorXd weights = resolve_weights(config.group_weights, T);
  const Eigen::VectorXd rhat = design.solver_target(target);
  const auto& mult = design.coefficient_multipliers();
  const auto& grams = design.suffix_grams();
  const auto& inert = design.inert_columns();
  const double lambda = config.lambda;

  // Column t holds sum_{s >= t} X_s' rhat_s: the gradient's constant part.
  const Eigen::MatrixXd corr = design.raw_adjoint(rhat);
  Eigen::VectorXd lipschitz = design.group_lipschitz();

  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, T);
  if (warm_start) {
    if (warm_start->rows() != n || warm_start->cols() != T) {
      throw Error(ErrorCode::DimensionMismatch, "warm start must be n x T");
    }
    delta = design.scale(*warm_start);
  }
  Eigen::MatrixXd coef = mult.cwiseProduct(delta);  // E = D delta, unscaled columns

  GroupLassoSolution sol;
  sol.lambda = lambda;

  auto evaluate = [&](double* objective) {
    Eigen::VectorXd res;
    const Eigen::MatrixXd grad = smooth_gradient(design, rhat, delta, &res);
    *objective = 0.5 * res.squaredNorm() + lambda * penalty(delta, weights);
    return kkt_from_gradient(grad, delta, lambda, weights);
  };

  double objective = 0.0;
  double kkt = evaluate(&objective);
  if (config.record_objective_trace) sol.objective_trace.push_back(objective);
  const double kkt_target = config.kkt_tol * lambda;

  auto objective_at = [&](const Eigen::MatrixXd& scaled) {
    const Eigen::VectorXd res = rhat - design.raw_apply(mult.cwiseProduct(scaled));
    return 0.5 * res.squaredNorm() + lambda * penalty(scaled, weights);
  };
  Eigen::MatrixXd before_sweep = delta;
  Eigen::VectorXd suffix(n);
  Eigen::VectorXd prefix(n);
  Eigen::VectorXd q(n);
  double reference_kkt = kkt;
  int stalled = 0;
  int sweep = 0;
  while (kkt > kkt_target && sweep < config.max_sweeps) {
    ++sweep;
    before_sweep = delta;
    // suffix = sum_{tau >= t} S_tau E_tau, prefix = sum_{tau < t} E_tau (already updated).
    suffix.setZero();
    for (int t = 0; t < T; ++t) {
      if (!coef.col(t).isZero(0.0)) suffix.noalias() += grams[static_cast<std::size_t>(t)] * coef.col(t);
    }
    prefix.setZero();
    bool prefix_zero = true;

    for (int t = 0; t < T; ++t) {
      const auto& S = grams[static_cast<std::size_t>(t)];
      const Eigen::VectorXd coef_old = coef.col(t);
      const bool old_zero = coef_old.isZero(0.0);

      q = corr.col(t) - suffix;
      if (!prefix_zero) q.noalias() -= S * prefix;
      const Eigen::VectorXd neg_grad = mult.col(t).cwiseProduct(q);

      Eigen::VectorXd next;
      for (;;) {
        next = group_soft_threshold(delta.col(t) + neg_grad / lipschitz(t), lambda * weights(t) / lipschitz(t));
        for (int j = 0; j < n; ++j) {
          if (inert[static_cast<std::size_t>(t) * n + j]) next(j) = 0.0;
        }
        const Eigen::VectorXd step = next - delta.col(t);
        const double step_sq = step.squaredNorm();
        if (step_sq == 0.0) break;
        const Eigen::VectorXd coef_step = mult.col(t).cwiseProduct(step);
        const double curvature = coef_step.dot(S * coef_step);
        // The prox step is a majorization step only if L_t bounds the curvature along it.
        if (curvature <= lipschitz(t) * step_sq * (1.0 + 1e-12)) break;
        lipschitz(t) = (curvature / step_sq) * (1.0 + 1e-9);
      }

      delta.col(t) = next;
      coef.col(t) = mult.col(t).cwiseProduct(next);
      if (!old_zero) suffix.noalias() -= S * coef_old;
      if (!coef.col(t).isZero(0.0)) {
        prefix += coef.col(t);
        prefix_zero = false;
      }
    }

    const double previous = objective;
    double swept = objective_at(delta);
    // Extrapolate along the sweep's displacement while the objective keeps dropping.
    if (config.extrapolate && sweep > 1) {
      const Eigen::MatrixXd direction = delta - before_sweep;
      Eigen::MatrixXd best = delta;
      for (double factor = 1.0; factor <= 1024.0; factor *= 2.0) {
        Eigen::MatrixXd candidate = delta + factor * direction;
        const double value = objective_at(candidate);
        if (!(value < swept)) break;
        swept = value;
        best = std::move(candidate);
      }
      if (!best.isApprox(delta, 0.0)) {
        delta = std::move(best);
        coef = mult.cwiseProduct(delta);
      }
    }
    kkt = evaluate(&objective);
    if (config.record_objective_trace) sol.objective_trace.push_back(objective);
    // The objective test only ends a solve whose KKT residual has also stopped
    // improving: kStallSweeps flat sweeps without a 10% drop below the reference.
    const bool flat = std::abs(previous - objective) < config.objective_tol * std::abs(objective);
    if (!flat || kkt < 0.9 * reference_kkt) {
      reference_kkt = kkt;
      stalled = 0;
    } else if (++stalled >= kStallSweeps) {
      break;
    }
  }

  sol.sweeps = sweep;
  sol.objective = objective;
  sol.kkt_residual = kkt;
  sol.converged = kkt <= kkt_target;
  sol.scaled_deltas = delta;
  sol.deltas = design.unscale(delta);
  const double threshold = kActiveThreshold * design.response_scale();
  for (int t = 0; t < T; ++t) {
    if (sol.deltas.col(t).norm() > threshold) {
      sol.active_set.push_back(t + 1);
    } else {
      sol.deltas.col(t).setZero();
    }
  }
  return sol;
}

std::vector<double> lambda_grid(double lambda_max, int num_lambdas, double min_ratio) {
  if (num_lambdas < 1) throw Error(ErrorCode::InvalidConfig, "num_lambdas must be at least 1");
  if (!(min_ratio > 0.0) || min_ratio > 1.0) throw Error(ErrorCode::InvalidConfig, "min_ratio must be in (0, 1]");
  std::vector<double> grid(static_cast<std::size_t>(num_lambdas));
  grid[0] = lambda_max;
  for (int k = 1; k < num_lambdas; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(num_lambdas - 1);
    grid[static_cast<std::size_t>(k)] = lambda_max * std::pow(min_ratio, frac);
  }
  return grid;
}

std::vector<PathPoint> solve_path(const DifferenceDesign& design, const ResidualTarget& target,
                                  const SolverConfig& config_base, const PathOptions& options) {
  const double top = lambda_max(design, target, config_base.group_weights);
  if (!(top > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "lambda_max is zero (residual target is zero); no path to trace");
  }
  const std::vector<double> grid = lambda_grid(top, options.num_lambdas, options.min_ratio);
  std::vector<PathPoint> path(grid.size());

  if (options.mode == PathMode::SequentialWarmStart) {
    std::optional<Eigen::MatrixXd> warm;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      SolverConfig config = config_base;
      config.lambda = grid[k];
      path[k] = {grid[k], solve(design, target, config, warm)};
      warm = path[k].solution.deltas;
      if (options.stop_at_active_count &&
          static_cast<int>(path[k].solution.active_set.size()) == *options.stop_at_active_count) {
        path.resize(k + 1);
        break;
      }
    }
    return path;
  }

  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < grid.size(); begin += workers) {
    const std::size_t end = std::min(grid.size(), begin + workers);
    std::vector<std::future<GroupLassoSolution>> pending;
    for (std::size_t k = begin; k < end; ++k) {
      SolverConfig config = config_base;
      config.lambda = grid[k];
      pending.push_back(std::async(std::launch::async, [&design, &target, config] {
        return solve(design, target, config);
      }));
    }
    for (std::size_t k = begin; k < end; ++k) path[k] = {grid[k], pending[k - begin].get()};
  }
  return path;
}

double residual_sum_squares(const DifferenceDesign& design, const ResidualTarget& target,
                            const Eigen::MatrixXd& deltas) {
  return (target.r - design.raw_apply(deltas)).squaredNorm();
}

double bic_score(const DifferenceDesign& design, const ResidualTarget& target, const GroupLassoSolution& solution) {
  const double rows = static_cast<double>(design.rows());
  const double rss = std::max(residual_sum_squares(design, target, solution.deltas),
                              std::numeric_limits<double>::min());
  const auto nonzero = (solution.deltas.array() != 0.0).count();
  const double df = static_cast<double>(design.coef_dim()) + static_cast<double>(nonzero);
  return rows * std::log(rss / rows) + std::log(rows) * df;
}

std::size_t select_lambda(const std::vector<PathPoint>& path, const DifferenceDesign& design,
                          const ResidualTarget& target, const SelectionCriterion& criterion) {
  if (path.empty()) throw Error(ErrorCode::InvalidConfig, "cannot select from an empty path");
  if (const auto* fixed = std::get_if<FixedKCriterion>(&criterion)) {
    std::size_t best = path.size();
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (static_cast<int>(path[k].solution.active_set.size()) != fixed->k) continue;
      if (best == path.size() || path[k].lambda > path[best].lambda) best = k;
    }
    if (best == path.size()) {
      std::ostringstream msg;
      msg << "no lambda on the grid yields exactly " << fixed->k << " active periods";
      throw Error(ErrorCode::NoMatchingLambda, msg.str());
    }
    return best;
  }
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double score = bic_score(design, target, path[k].solution);
    if (score < best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

}  // namespace tvpbreak
