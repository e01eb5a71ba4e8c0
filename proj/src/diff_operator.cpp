#include "tvpbreak/diff_operator.hpp"

#include <sstream>

#include "tvpbreak/error.hpp"
#include "tvpbreak/power_iteration.hpp"

namespace tvpbreak {

namespace {

constexpr double kScaleFloor = 1e-12;
constexpr double kPowerTol = 1e-10;
constexpr int kPowerMaxIter = 1000;

void check_length(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << " has length " << got << ", expected " << want;
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

}  // namespace

std::pair<DifferenceDesign, ResidualTarget> build_design(const RegressionPanel& panel, const Eigen::VectorXd& beta0,
                                                         bool normalize) {
  check_length(beta0.size(), panel.coef_dim(), "beta0");
  const int T = panel.periods();
  const int m = panel.obs_dim();
  const int n = panel.coef_dim();

  ResidualTarget target{Eigen::VectorXd(static_cast<Eigen::Index>(m) * T)};
  for (int t = 0; t < T; ++t) {
    target.r.segment(static_cast<Eigen::Index>(t) * m, m) = panel.response(t) - panel.design(t) * beta0;
  }

  DifferenceDesign design(panel);
  design.normalized_ = normalize;
  design.response_scale_ = std::max(target.r.norm(), kScaleFloor);

  design.suffix_grams_.assign(static_cast<std::size_t>(T), Eigen::MatrixXd());
  Eigen::MatrixXd running = Eigen::MatrixXd::Zero(n, n);
  for (int t = T - 1; t >= 0; --t) {
    const auto& X = panel.design(t);
    running.noalias() += X.transpose() * X;
    design.suffix_grams_[static_cast<std::size_t>(t)] = running;
  }

  design.column_scales_.resize(static_cast<Eigen::Index>(n) * T);
  design.inert_columns_.assign(static_cast<std::size_t>(n) * T, false);
  design.multipliers_ = Eigen::MatrixXd::Ones(n, T);
  design.group_lipschitz_.resize(T);
  for (int t = 0; t < T; ++t) {
    const auto& S = design.suffix_grams_[static_cast<std::size_t>(t)];
    bool all_inert = true;
    for (int j = 0; j < n; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(t) * n + j;
      const double norm = std::sqrt(std::max(S(j, j), 0.0));
      if (norm < kScaleFloor) {
        design.column_scales_(k) = 1.0;
        design.inert_columns_[static_cast<std::size_t>(k)] = true;
      } else {
        design.column_scales_(k) = norm;
        all_inert = false;
      }
      if (normalize) design.multipliers_(j, t) = 1.0 / design.column_scales_(k);
    }
    if (all_inert) {
      design.group_lipschitz_(t) = 1.0;
      continue;
    }
    const auto& d = design.multipliers_.col(t);
    const Eigen::MatrixXd gram = d.asDiagonal() * S * d.asDiagonal();
    const double top = largest_eigenvalue(gram, kPowerTol, kPowerMaxIter).eigenvalue;
    design.group_lipschitz_(t) = top > 0.0 ? top : 1.0;
  }
  return {std::move(design), std::move(target)};
}

bool DifferenceDesign::group_inert(int period) const {
  if (period < 1 || period > periods()) throw Error(ErrorCode::IndexOutOfRange, "period out of range");
  const std::size_t base = static_cast<std::size_t>(period - 1) * static_cast<std::size_t>(coef_dim());
  for (int j = 0; j < coef_dim(); ++j) {
    if (!inert_columns_[base + static_cast<std::size_t>(j)]) return false;
  }
  return true;
}

Eigen::VectorXd DifferenceDesign::raw_apply(const Eigen::MatrixXd& E) const {
  const int m = obs_dim();
  Eigen::VectorXd out(rows());
  Eigen::VectorXd running = Eigen::VectorXd::Zero(coef_dim());
  for (int s = 0; s < periods(); ++s) {
    running += E.col(s);
    out.segment(static_cast<Eigen::Index>(s) * m, m).noalias() = panel_.design(s) * running;
  }
  return out;
}

Eigen::MatrixXd DifferenceDesign::raw_adjoint(const Eigen::VectorXd& v) const {
  const int m = obs_dim();
  Eigen::MatrixXd out(coef_dim(), periods());
  Eigen::VectorXd running = Eigen::VectorXd::Zero(coef_dim());
  for (int s = periods() - 1; s >= 0; --s) {
    running.noalias() += panel_.design(s).transpose() * v.segment(static_cast<Eigen::Index>(s) * m, m);
    out.col(s) = running;
  }
  return out;
}

Eigen::VectorXd DifferenceDesign::apply(const Eigen::VectorXd& delta) const {
  check_length(delta.size(), cols(), "coefficient vector");
  const Eigen::Map<const Eigen::MatrixXd> D(delta.data(), coef_dim(), periods());
  return raw_apply(multipliers_.cwiseProduct(D));
}

Eigen::VectorXd DifferenceDesign::apply_adjoint(const Eigen::VectorXd& v) const {
  check_length(v.size(), rows(), "stacked vector");
  Eigen::MatrixXd out = raw_adjoint(v).cwiseProduct(multipliers_);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
}

GroupColumns DifferenceDesign::group_columns(int period) const { return GroupColumns(*this, period); }

Eigen::VectorXd DifferenceDesign::solver_target(const ResidualTarget& target) const {
  check_length(target.r.size(), rows(), "residual target");
  return normalized_ ? Eigen::VectorXd(target.r / response_scale_) : target.r;
}

Eigen::MatrixXd DifferenceDesign::unscale(const Eigen::MatrixXd& scaled) const {
  if (!normalized_) return scaled;
  return scaled.cwiseProduct(multipliers_) * response_scale_;
}

Eigen::MatrixXd DifferenceDesign::scale(const Eigen::MatrixXd& original) const {
  Eigen::MatrixXd out = normalized_ ? Eigen::MatrixXd(original.cwiseQuotient(multipliers_) / response_scale_)
                                    : original;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    if (inert_columns_[static_cast<std::size_t>(k)]) out.data()[k] = 0.0;
  }
  return out;
}

GroupColumns::GroupColumns(const DifferenceDesign& design, int period) : design_(&design), period_(period) {
  if (period < 1 || period > design.periods()) {
    std::ostringstream msg;
    msg << "period " << period << " outside 1.." << design.periods();
    throw Error(ErrorCode::IndexOutOfRange, msg.str());
  }
}

Eigen::VectorXd GroupColumns::apply(const Eigen::VectorXd& u) const {
  check_length(u.size(), design_->coef_dim(), "group coefficient vector");
  const int m = design_->obs_dim();
  const Eigen::VectorXd scaled = design_->coefficient_multipliers().col(period_ - 1).cwiseProduct(u);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(design_->rows());
  for (int s = period_ - 1; s < design_->periods(); ++s) {
    out.segment(static_cast<Eigen::Index>(s) * m, m).noalias() = design_->panel().design(s) * scaled;
  }
  return out;
}

Eigen::VectorXd GroupColumns::adjoint(const Eigen::VectorXd& v) const {
  check_length(v.size(), design_->rows(), "stacked vector");
  const int m = design_->obs_dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(design_->coef_dim());
  for (int s = period_ - 1; s < design_->periods(); ++s) {
    acc.noalias() += design_->panel().design(s).transpose() * v.segment(static_cast<Eigen::Index>(s) * m, m);
  }
  return design_->coefficient_multipliers().col(period_ - 1).cwiseProduct(acc);
}

Eigen::MatrixXd GroupColumns::gram() const {
  const auto& d = design_->coefficient_multipliers().col(period_ - 1);
  return d.asDiagonal() * design_->suffix_grams()[static_cast<std::size_t>(period_ - 1)] * d.asDiagonal();
}

}  // namespace tvpbreak
