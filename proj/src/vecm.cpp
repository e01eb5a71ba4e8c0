#include "tvpbreak/vecm.hpp"

#include <sstream>

#include "tvpbreak/baseline.hpp"
#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {

int regressor_count(int m, const VecmSpec& spec) { return m * spec.lag_order + m + (spec.include_intercept ? 1 : 0); }

Eigen::MatrixXd kron_identity(const Eigen::VectorXd& z, int m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(m) * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    out.block(0, j * m, m, m).diagonal().setConstant(z(j));
  }
  return out;
}

Eigen::VectorXd difference(const Eigen::MatrixXd& values, int i) {
  return (values.row(i) - values.row(i - 1)).transpose();
}

std::optional<std::vector<std::string>> panel_labels(const MultivariateSeries& series, int k, int periods) {
  if (!series.labels) return std::nullopt;
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(periods));
  for (int t = 1; t <= periods; ++t) out.push_back(series.labels->at(static_cast<std::size_t>(t + k)));
  return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& a) { return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()); }

}  // namespace

void check_vecm_inputs(const MultivariateSeries& series, const VecmSpec& spec) {
  const int m = series.dim();
  if (spec.lag_order < 1) throw Error(ErrorCode::InvalidConfig, "lag order must be at least 1");
  if (m < 1) throw Error(ErrorCode::DimensionMismatch, "series has no columns");
  if (spec.coint_rank < 1) throw Error(ErrorCode::InvalidConfig, "cointegration rank must be at least 1");
  if (spec.coint_rank > m) {
    std::ostringstream msg;
    msg << "cointegration rank " << spec.coint_rank << " exceeds series dimension " << m;
    throw Error(ErrorCode::RankTooLarge, msg.str());
  }
  if (series.length() <= spec.lag_order + 1) {
    std::ostringstream msg;
    msg << "series of length " << series.length() << " is too short for lag order " << spec.lag_order;
    throw Error(ErrorCode::SeriesTooShort, msg.str());
  }
  if (!series.values.allFinite()) throw Error(ErrorCode::NonFiniteEntry, "series contains a non-finite entry");
  if (series.labels && static_cast<int>(series.labels->size()) != series.length()) {
    throw Error(ErrorCode::DimensionMismatch, "series labels and values differ in length");
  }
}

int vecm_coefficients_per_period(int dim, const VecmSpec& spec, TimeVarying mode) {
  return mode == TimeVarying::PiOnly ? dim * dim : dim * regressor_count(dim, spec);
}

RegressionPanel build_vecm_panel(const MultivariateSeries& series, const VecmSpec& spec, TimeVarying mode) {
  check_vecm_inputs(series, spec);
  if (mode == TimeVarying::PiOnly) return build_pi_panel(series, spec, fit_vecm_invariant(series, spec));

  const int m = series.dim();
  const int k = spec.lag_order;
  const int T = series.length() - k - 1;
  const int p = regressor_count(m, spec);
  PanelData data;
  for (int t = 1; t <= T; ++t) {
    const int i = t + k;
    Eigen::VectorXd z(p);
    for (int l = 1; l <= k; ++l) z.segment((l - 1) * m, m) = difference(series.values, i - l);
    z.segment(k * m, m) = series.values.row(i - k).transpose();
    if (spec.include_intercept) z(p - 1) = 1.0;
    data.design_blocks.push_back(kron_identity(z, m));
    data.responses.push_back(difference(series.values, i));
  }
  data.period_labels = panel_labels(series, k, T);
  return validate_panel(std::move(data));
}

RegressionPanel build_pi_panel(const MultivariateSeries& series, const VecmSpec& spec, const VecmFit& fit) {
  check_vecm_inputs(series, spec);
  const int m = series.dim();
  const int k = spec.lag_order;
  const int T = series.length() - k - 1;
  if (fit.pi.rows() != m || static_cast<int>(fit.gammas.size()) != k) {
    throw Error(ErrorCode::DimensionMismatch, "VEC fit does not match the series and lag order");
  }
  PanelData data;
  for (int t = 1; t <= T; ++t) {
    const int i = t + k;
    Eigen::VectorXd y = difference(series.values, i) - fit.mu;
    for (int l = 1; l <= k; ++l) y.noalias() -= fit.gammas[static_cast<std::size_t>(l - 1)] * difference(series.values, i - l);
    data.design_blocks.push_back(kron_identity(series.values.row(i - k).transpose(), m));
    data.responses.push_back(std::move(y));
  }
  data.period_labels = panel_labels(series, k, T);
  return validate_panel(std::move(data));
}

VecmFit fit_vecm_invariant(const MultivariateSeries& series, const VecmSpec& spec) {
  const RegressionPanel panel = build_vecm_panel(series, spec, TimeVarying::All);
  const OlsBaseline ols = fit_baseline(panel);
  const int m = series.dim();
  const int k = spec.lag_order;
  const Eigen::Map<const Eigen::MatrixXd> coef(ols.beta0.data(), m, regressor_count(m, spec));

  VecmFit fit;
  for (int l = 0; l < k; ++l) fit.gammas.emplace_back(coef.block(0, l * m, m, m));
  fit.pi = coef.block(0, k * m, m, m);
  fit.mu = spec.include_intercept ? Eigen::VectorXd(coef.col(k * m + m)) : Eigen::VectorXd::Zero(m);
  std::tie(fit.alpha, fit.beta_star) = decompose_pi(fit.pi, spec.coint_rank);
  fit.effective_T = panel.periods();
  fit.ridge_used = ols.ridge_used;
  fit.residual_norm = ols.residual_norm;
  return fit;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> decompose_pi(const Eigen::MatrixXd& pi, int rank) {
  const Eigen::Index m = pi.rows();
  if (pi.cols() != m) throw Error(ErrorCode::DimensionMismatch, "Pi must be square");
  if (rank < 1) throw Error(ErrorCode::InvalidConfig, "rank must be at least 1");
  if (rank > m) {
    std::ostringstream msg;
    msg << "rank " << rank << " exceeds dimension " << m;
    throw Error(ErrorCode::RankTooLarge, msg.str());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(pi, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd beta_star = svd.matrixV().leftCols(rank);
  Eigen::MatrixXd alpha = svd.matrixU().leftCols(rank) * svd.singularValues().head(rank).asDiagonal();
  for (int c = 0; c < rank; ++c) {
    Eigen::Index pivot = 0;
    beta_star.col(c).cwiseAbs().maxCoeff(&pivot);
    if (beta_star(pivot, c) < 0.0) {
      beta_star.col(c) *= -1.0;
      alpha.col(c) *= -1.0;
    }
  }
  return {std::move(alpha), std::move(beta_star)};
}

Eigen::MatrixXd recover_alpha(const Eigen::MatrixXd& pi_t, const Eigen::MatrixXd& beta_star) {
  if (pi_t.cols() != beta_star.rows()) throw Error(ErrorCode::DimensionMismatch, "Pi_t and beta* do not conform");
  const Eigen::MatrixXd gram = beta_star.transpose() * beta_star;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const auto& values = eig.eigenvalues();
  if (values.size() == 0 || values(values.size() - 1) <= 0.0 || values(0) <= 1e-12 * values(values.size() - 1)) {
    throw Error(ErrorCode::SingularBetaGram, "beta*' beta* is singular");
  }
  // alpha_t' = (beta*' beta*)^{-1} beta*' Pi_t'
  return gram.ldlt().solve(beta_star.transpose() * pi_t.transpose()).transpose();
}

double comovement_degree(const Eigen::MatrixXd& alpha, DegreeNorm norm) {
  if (norm == DegreeNorm::Frobenius) return alpha.norm();
  if (alpha.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(alpha).singularValues()(0);
}

ComovementResult comovement_pipeline(const MultivariateSeries& series, const VecmSpec& spec,
                                     const DetectConfig& lasso, TimeVarying mode) {
  check_vecm_inputs(series, spec);
  ComovementResult result;
  result.fit = fit_vecm_invariant(series, spec);
  const int m = series.dim();
  const int k = spec.lag_order;

  DetectConfig config = lasso;
  RegressionPanel panel = mode == TimeVarying::PiOnly ? build_pi_panel(series, spec, result.fit)
                                                      : build_vecm_panel(series, spec, TimeVarying::All);
  Eigen::Index pi_offset = 0;
  if (mode == TimeVarying::PiOnly) {
    config.beta0_override = vec(result.fit.pi);
  } else {
    Eigen::MatrixXd coef(m, regressor_count(m, spec));
    for (int l = 0; l < k; ++l) coef.block(0, l * m, m, m) = result.fit.gammas[static_cast<std::size_t>(l)];
    coef.block(0, k * m, m, m) = result.fit.pi;
    if (spec.include_intercept) coef.col(coef.cols() - 1) = result.fit.mu;
    config.beta0_override = vec(coef);
    pi_offset = static_cast<Eigen::Index>(k) * m * m;
  }
  result.report = detect_breaks(panel, config);

  const int T = panel.periods();
  auto& como = result.comovement;
  como.degrees.resize(T);
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd column = result.report.path.betas.col(t).segment(pi_offset, static_cast<Eigen::Index>(m) * m);
    result.pi_path.emplace_back(Eigen::Map<const Eigen::MatrixXd>(column.data(), m, m));
    como.alphas.push_back(recover_alpha(result.pi_path.back(), result.fit.beta_star));
    como.degrees(t) = comovement_degree(como.alphas.back(), spec.degree_norm);
    como.periods.push_back(panel.label(t).value_or(std::to_string(t + 1)));
  }
  for (const auto& event : result.report.breaks) como.break_periods.push_back(event.period);
  return result;
}

}  // namespace tvpbreak
