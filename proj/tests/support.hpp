#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tvpbreak/diff_operator.hpp"
#include "tvpbreak/panel.hpp"
#include "tvpbreak/rng.hpp"

namespace testing {

inline Eigen::MatrixXd random_matrix(tvpbreak::PortableRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
  return a;
}

inline Eigen::VectorXd random_vector(tvpbreak::PortableRng& rng, Eigen::Index size) {
  return random_matrix(rng, size, 1);
}

inline int random_int(tvpbreak::PortableRng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
}

inline tvpbreak::RegressionPanel random_panel(tvpbreak::PortableRng& rng, int T, int m, int n) {
  tvpbreak::PanelData data;
  for (int t = 0; t < T; ++t) {
    data.design_blocks.push_back(random_matrix(rng, m, n));
    data.responses.push_back(random_vector(rng, m));
  }
  return tvpbreak::validate_panel(std::move(data));
}

inline tvpbreak::RegressionPanel panel_from(std::vector<Eigen::MatrixXd> X, std::vector<Eigen::VectorXd> y) {
  tvpbreak::PanelData data;
  data.design_blocks = std::move(X);
  data.responses = std::move(y);
  return tvpbreak::validate_panel(std::move(data));
}

/// Explicit mT x nT difference-form matrix: block (s, t) is X_s for s >= t.
inline Eigen::MatrixXd dense_difference_matrix(const tvpbreak::RegressionPanel& panel) {
  const int T = panel.periods();
  const int m = panel.obs_dim();
  const int n = panel.coef_dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * T, static_cast<Eigen::Index>(n) * T);
  for (int s = 0; s < T; ++s) {
    for (int t = 0; t <= s; ++t) A.block(s * m, t * n, m, n) = panel.design(s);
  }
  return A;
}

/// The solver's scaled matrix: dense matrix with columns divided by the design's scales.
inline Eigen::MatrixXd dense_scaled_matrix(const tvpbreak::DifferenceDesign& design) {
  Eigen::MatrixXd A = dense_difference_matrix(design.panel());
  const Eigen::MatrixXd& mult = design.coefficient_multipliers();
  const Eigen::Map<const Eigen::VectorXd> d(mult.data(), mult.size());
  return A * d.asDiagonal();
}

inline Eigen::VectorXd flatten(const Eigen::MatrixXd& a) { return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()); }

inline Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, v.size() / rows);
}

/// Minimum-norm least squares through an explicit SVD pseudoinverse.
inline Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-12 * (s.size() ? s(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * b;
}

/// Objective 1/2||b - A x||^2 + lambda sum_t w_t ||x_t|| with groups of size n.
inline double dense_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x, int n,
                              double lambda, const Eigen::VectorXd& w) {
  double penalty = 0.0;
  for (Eigen::Index t = 0; t < w.size(); ++t) penalty += w(t) * x.segment(t * n, n).norm();
  return 0.5 * (b - A * x).squaredNorm() + lambda * penalty;
}

/// Accelerated proximal gradient on the dense problem, run for a fixed number
/// of iterations with a restart whenever the objective rises.
inline Eigen::VectorXd dense_prox_gradient(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int n, double lambda,
                                           const Eigen::VectorXd& w, int iterations) {
  const double L = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  const double step = 1.0 / (L * L);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  Eigen::VectorXd y = x;
  double theta = 1.0;
  double f_prev = dense_objective(A, b, x, n, lambda, w);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd z = y + step * A.transpose() * (b - A * y);
    Eigen::VectorXd next(x.size());
    for (Eigen::Index t = 0; t < w.size(); ++t) {
      const Eigen::VectorXd v = z.segment(t * n, n);
      const double norm = v.norm();
      const double tau = step * lambda * w(t);
      next.segment(t * n, n) = norm > tau ? Eigen::VectorXd((1.0 - tau / norm) * v) : Eigen::VectorXd::Zero(n);
    }
    const double f = dense_objective(A, b, next, n, lambda, w);
    if (f > f_prev) {
      theta = 1.0;
      y = x;
      continue;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = next + ((theta - 1.0) / theta_next) * (next - x);
    x = next;
    theta = theta_next;
    f_prev = f;
  }
  return x;
}

/// LASSO (n = 1) refinement: solves the stationarity equations exactly on the
/// support and sign pattern of x. Returns x unchanged if the signs disagree.
inline Eigen::VectorXd lasso_polish(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x,
                                    double lambda, const Eigen::VectorXd& w) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0) support.push_back(j);
  }
  if (support.empty()) return x;
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd As(A.rows(), k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index j = support[static_cast<std::size_t>(i)];
    As.col(i) = A.col(j);
    rhs(i) = A.col(j).dot(b) - lambda * w(j) * (x(j) > 0.0 ? 1.0 : -1.0);
  }
  const Eigen::VectorXd xs = (As.transpose() * As).ldlt().solve(rhs);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index j = support[static_cast<std::size_t>(i)];
    if ((xs(i) > 0.0) != (x(j) > 0.0)) return x;
    out(j) = xs(i);
  }
  return out;
}

/// Largest violation of the subgradient optimality conditions, computed densely.
inline double dense_kkt(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x, int n,
                        double lambda, const Eigen::VectorXd& w) {
  const Eigen::VectorXd g = A.transpose() * (A * x - b);
  double worst = 0.0;
  for (Eigen::Index t = 0; t < w.size(); ++t) {
    const Eigen::VectorXd gt = g.segment(t * n, n);
    const Eigen::VectorXd xt = x.segment(t * n, n);
    const double nx = xt.norm();
    const double v = nx > 0.0 ? (gt + lambda * w(t) * xt / nx).norm() : std::max(0.0, gt.norm() - lambda * w(t));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace testing
