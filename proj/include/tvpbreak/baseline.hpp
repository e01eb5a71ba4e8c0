#pragma once

#include <Eigen/Dense>

#include "tvpbreak/panel.hpp"

namespace tvpbreak {

inline constexpr double kDefaultRidgeFallback = 1e-6;

/// Time-invariant pooled least-squares fit used to center the difference form.
struct OlsBaseline {
  Eigen::VectorXd beta0;
  double residual_norm = 0.0;  // sqrt(sum_t ||y_t - X_t beta0||^2)
  int rank = 0;                // numerical rank of sum_t X_t' X_t
  bool ridge_used = false;
};

/// Minimizes sum_t ||y_t - X_t beta||^2 via the pooled normal equations.
///
/// When the pooled Gram is numerically rank-deficient (smallest eigenvalue below
/// 1e-10 times the largest) and ridge_fallback > 0, solves (G + ridge I) beta = b
/// instead and sets ridge_used. With ridge_fallback == 0 the minimum-norm solution
/// is returned. Throws DegenerateDesign if every X_t is zero and ridge_fallback == 0.
OlsBaseline fit_baseline(const RegressionPanel& panel, double ridge_fallback = kDefaultRidgeFallback);

}  // namespace tvpbreak
