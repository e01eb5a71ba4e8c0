#pragma once

#include <Eigen/Dense>

namespace tvpbreak {

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power iteration.
///
/// Stops when the Rayleigh quotient changes by less than tol (relative) between
/// iterations. The start vector is fixed, so results are deterministic.
PowerIterationResult largest_eigenvalue(const Eigen::MatrixXd& sym, double tol = 1e-10, int max_iter = 1000);

}  // namespace tvpbreak
