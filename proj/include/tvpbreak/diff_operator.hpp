#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tvpbreak/panel.hpp"

namespace tvpbreak {

/// r_t = y_t - X_t beta0, stacked (length m*T), in original units.
struct ResidualTarget {
  Eigen::VectorXd r;
};

class DifferenceDesign;

/// The columns of one period's group: block s of the group submatrix is X_s
/// (column-scaled when normalized) for s >= t and zero before.
class GroupColumns {
 public:
  GroupColumns(const DifferenceDesign& design, int period);

  int period() const noexcept { return period_; }
  /// u (length n) -> stacked vector of length m*T.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  /// v (length m*T) -> length n.
  Eigen::VectorXd adjoint(const Eigen::VectorXd& v) const;
  /// D_t S_t D_t, the Gram of the (scaled) group columns.
  Eigen::MatrixXd gram() const;

 private:
  const DifferenceDesign* design_;
  int period_;  // 1-based
};

/// Matrix-free form of the difference-form design Xtilde = blockdiag(X_t) * L,
/// where L is the block lower-triangular matrix of n x n identities. Column j of
/// group t is the stacked vector (0, ..., 0, X_t e_j, ..., X_T e_j).
///
/// Coefficient vectors of length n*T are laid out period-major: entries
/// [n*(t-1), n*t) belong to period t. Only O(T n^2) state is held besides the panel.
class DifferenceDesign {
 public:
  int periods() const noexcept { return panel_.periods(); }
  int obs_dim() const noexcept { return panel_.obs_dim(); }
  int coef_dim() const noexcept { return panel_.coef_dim(); }
  Eigen::Index rows() const noexcept { return static_cast<Eigen::Index>(obs_dim()) * periods(); }
  Eigen::Index cols() const noexcept { return static_cast<Eigen::Index>(coef_dim()) * periods(); }

  const RegressionPanel& panel() const noexcept { return panel_; }
  bool normalized() const noexcept { return normalized_; }

  /// l2 norm of every column of Xtilde (1 for zero columns), length n*T.
  const Eigen::VectorXd& column_scales() const noexcept { return column_scales_; }
  /// l2 norm of r (floored at 1e-12).
  double response_scale() const noexcept { return response_scale_; }
  /// S_t = sum_{s >= t} X_s' X_s, zero-based: suffix_grams()[0] is S_1.
  const std::vector<Eigen::MatrixXd>& suffix_grams() const noexcept { return suffix_grams_; }
  /// Largest eigenvalue of each group Gram (scaled when normalized); 1 for inert groups.
  const Eigen::VectorXd& group_lipschitz() const noexcept { return group_lipschitz_; }
  /// Per-coefficient flag for zero columns, length n*T. Their coefficients stay at zero.
  const std::vector<bool>& inert_columns() const noexcept { return inert_columns_; }
  bool group_inert(int period) const;

  /// Multipliers applied to coefficients before the raw operator: reciprocal
  /// column scales when normalized, ones otherwise. Shape n x T.
  const Eigen::MatrixXd& coefficient_multipliers() const noexcept { return multipliers_; }

  /// Xtilde * delta (scaled columns when normalized).
  Eigen::VectorXd apply(const Eigen::VectorXd& delta) const;
  /// Xtilde' * v (scaled columns when normalized).
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& v) const;

  /// 1-based period; throws IndexOutOfRange.
  GroupColumns group_columns(int period) const;

  /// Stacked vector whose block s is X_s * sum_{t <= s} E.col(t); E is n x T in
  /// unscaled coordinates.
  Eigen::VectorXd raw_apply(const Eigen::MatrixXd& E) const;
  /// n x T matrix whose column t is sum_{s >= t} X_s' v_s.
  Eigen::MatrixXd raw_adjoint(const Eigen::VectorXd& v) const;

  /// The response the solver fits: r / response_scale when normalized, else r.
  Eigen::VectorXd solver_target(const ResidualTarget& target) const;

  /// Coefficients of the solver's problem -> original units (n x T).
  Eigen::MatrixXd unscale(const Eigen::MatrixXd& scaled) const;
  /// Original units -> coefficients of the solver's problem (n x T). Inert entries become 0.
  Eigen::MatrixXd scale(const Eigen::MatrixXd& original) const;

 private:
  friend std::pair<DifferenceDesign, ResidualTarget> build_design(const RegressionPanel&, const Eigen::VectorXd&,
                                                                  bool);
  explicit DifferenceDesign(RegressionPanel panel) : panel_(std::move(panel)) {}

  RegressionPanel panel_;
  bool normalized_ = false;
  Eigen::VectorXd column_scales_;
  double response_scale_ = 1.0;
  std::vector<Eigen::MatrixXd> suffix_grams_;
  Eigen::VectorXd group_lipschitz_;
  std::vector<bool> inert_columns_;
  Eigen::MatrixXd multipliers_;
};

/// Builds the difference-form operator and the residual target r_t = y_t - X_t beta0.
/// Throws DimensionMismatch when beta0 has the wrong length.
std::pair<DifferenceDesign, ResidualTarget> build_design(const RegressionPanel& panel, const Eigen::VectorXd& beta0,
                                                         bool normalize);

}  // namespace tvpbreak
