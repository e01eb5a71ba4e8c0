#include "tvpbreak/baseline.hpp"

#include <Eigen/Eigenvalues>

#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {
constexpr double kRankTolerance = 1e-10;
}

OlsBaseline fit_baseline(const RegressionPanel& panel, double ridge_fallback) {
  if (!(ridge_fallback >= 0.0)) throw Error(ErrorCode::InvalidConfig, "ridge_fallback must be nonnegative");
  const int n = panel.coef_dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd cross = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < panel.periods(); ++t) {
    const auto& X = panel.design(t);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
    cross.noalias() += X.transpose() * panel.response(t);
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  const double largest = values(n - 1);
  const double cutoff = kRankTolerance * largest;

  OlsBaseline fit;
  fit.rank = largest > 0.0 ? static_cast<int>((values.array() > cutoff).count()) : 0;

  if (largest <= 0.0 && ridge_fallback == 0.0) {
    throw Error(ErrorCode::DegenerateDesign, "every design block is zero and no ridge fallback is configured");
  }

  if (fit.rank == n) {
    fit.beta0 = gram.llt().solve(cross);
  } else if (ridge_fallback > 0.0) {
    fit.ridge_used = true;
    Eigen::VectorXd shifted = values.array() + ridge_fallback;
    fit.beta0 = eig.eigenvectors() * ((eig.eigenvectors().transpose() * cross).array() / shifted.array()).matrix();
  } else {
    // Minimum-norm solution of the (always consistent) normal equations.
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (values(i) > cutoff) inv(i) = 1.0 / values(i);
    }
    fit.beta0 = eig.eigenvectors() * (inv.asDiagonal() * (eig.eigenvectors().transpose() * cross));
  }

  double rss = 0.0;
  for (int t = 0; t < panel.periods(); ++t) {
    rss += (panel.response(t) - panel.design(t) * fit.beta0).squaredNorm();
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

}  // namespace tvpbreak
