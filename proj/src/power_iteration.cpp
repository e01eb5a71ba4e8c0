#include "tvpbreak/power_iteration.hpp"

#include <cmath>

namespace tvpbreak {

PowerIterationResult largest_eigenvalue(const Eigen::MatrixXd& sym, double tol, int max_iter) {
  const Eigen::Index n = sym.rows();
  PowerIterationResult result;
  if (n == 0) return result;

  // Uneven entries keep the start vector off any coordinate-aligned eigenspace.
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 1.0 / static_cast<double>(i + 2);
  v.normalize();

  Eigen::VectorXd w = sym * v;
  double rayleigh = v.dot(w);
  for (int iter = 1; iter <= max_iter; ++iter) {
    const double norm = w.norm();
    result.iterations = iter;
    if (norm == 0.0) {
      result.eigenvalue = 0.0;
      result.converged = true;
      return result;
    }
    v = w / norm;
    w.noalias() = sym * v;
    const double next = v.dot(w);
    if (std::abs(next - rayleigh) <= tol * std::abs(next)) {
      result.eigenvalue = next;
      result.converged = true;
      return result;
    }
    rayleigh = next;
  }
  result.eigenvalue = rayleigh;
  return result;
}

}  // namespace tvpbreak
