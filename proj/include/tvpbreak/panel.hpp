#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tvpbreak {

/// Unchecked input for a time-varying regression y_t = X_t beta_t + u_t, t = 1..T.
struct PanelData {
  std::vector<Eigen::MatrixXd> design_blocks;  // X_t, each m x n
  std::vector<Eigen::VectorXd> responses;      // y_t, each length m
  std::optional<std::vector<std::string>> period_labels;
};

/// A validated, immutable regression panel. Obtain one through validate_panel().
///
/// Period labels are metadata; every computation indexes periods 1..T.
class RegressionPanel {
 public:
  int periods() const noexcept { return static_cast<int>(blocks_.size()); }
  int obs_dim() const noexcept { return obs_dim_; }
  int coef_dim() const noexcept { return coef_dim_; }

  /// Zero-based access: design(0) is X_1.
  const Eigen::MatrixXd& design(int t) const { return blocks_.at(static_cast<std::size_t>(t)); }
  const Eigen::VectorXd& response(int t) const { return responses_.at(static_cast<std::size_t>(t)); }

  const std::vector<Eigen::MatrixXd>& design_blocks() const noexcept { return blocks_; }
  const std::vector<Eigen::VectorXd>& responses() const noexcept { return responses_; }
  const std::optional<std::vector<std::string>>& period_labels() const noexcept { return labels_; }

  /// Label of the zero-based period t, when labels are present.
  std::optional<std::string> label(int t) const;

  /// All y_t stacked into one vector of length m*T.
  Eigen::VectorXd stacked_response() const;

 private:
  friend RegressionPanel validate_panel(PanelData data);
  RegressionPanel() = default;

  int obs_dim_ = 0;
  int coef_dim_ = 0;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::VectorXd> responses_;
  std::optional<std::vector<std::string>> labels_;
};

/// Checks shapes, finiteness and label order.
///
/// Throws Error with EmptyPanel, DimensionMismatch, NonFiniteEntry or NonMonotonicDates.
RegressionPanel validate_panel(PanelData data);

/// Natural order on period labels: numeric when both are integers, lexicographic
/// otherwise (which orders ISO-8601 dates chronologically).
bool label_less(const std::string& a, const std::string& b);

/// beta_t = beta0 + sum_{tau <= t} delta_tau, with deltas and betas stored as
/// n x T matrices (column t-1 holds period t).
struct CoefficientPath {
  Eigen::VectorXd beta0;
  Eigen::MatrixXd deltas;
  Eigen::MatrixXd betas;

  int periods() const noexcept { return static_cast<int>(deltas.cols()); }
};

/// Prefix-sum reconstruction of the coefficient path. Throws DimensionMismatch
/// when deltas.rows() != beta0.size().
CoefficientPath reconstruct_path(const Eigen::VectorXd& beta0, const Eigen::MatrixXd& deltas);

/// Inverse of reconstruct_path: successive differences of betas with beta0 prepended.
Eigen::MatrixXd difference_path(const Eigen::VectorXd& beta0, const Eigen::MatrixXd& betas);

}  // namespace tvpbreak
