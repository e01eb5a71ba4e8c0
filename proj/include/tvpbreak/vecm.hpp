#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tvpbreak/breakpipe.hpp"
#include "tvpbreak/panel.hpp"
#include "tvpbreak/series.hpp"

namespace tvpbreak {

enum class DegreeNorm {
  Spectral,   // largest singular value of alpha_t
  Frobenius,
};

/// dX_t = Gamma_1 dX_{t-1} + ... + Gamma_k dX_{t-k} + Pi X_{t-k} + mu + u_t.
///
/// The lag convention follows that equation literally: k difference lags and the
/// level term at lag k. A levels VAR(p) in the usual Johansen form corresponds to
/// k = p - 1 difference lags with the level at lag 1; both describe the same
/// regressor span once Gamma_k absorbs the difference between X_{t-k} and X_{t-k-1}.
struct VecmSpec {
  int lag_order = 1;
  int coint_rank = 1;
  bool include_intercept = true;
  DegreeNorm degree_norm = DegreeNorm::Spectral;
};

enum class TimeVarying {
  PiOnly,  // only Pi varies; Gamma and mu are frozen at their time-invariant fit
  All,     // every VEC coefficient varies
};

struct VecmFit {
  std::vector<Eigen::MatrixXd> gammas;  // k matrices, m x m
  Eigen::VectorXd mu;                   // zeros when the intercept is excluded
  Eigen::MatrixXd pi;
  Eigen::MatrixXd alpha;      // m x r
  Eigen::MatrixXd beta_star;  // m x r, orthonormal columns
  int effective_T = 0;
  bool ridge_used = false;
  double residual_norm = 0.0;
};

struct ComovementSeries {
  std::vector<std::string> periods;  // labels, or 1-based indices when the series has none
  std::vector<Eigen::MatrixXd> alphas;
  Eigen::VectorXd degrees;
  std::vector<int> break_periods;  // 1-based
};

struct ComovementResult {
  VecmFit fit;
  BreakReport report;
  ComovementSeries comovement;
  std::vector<Eigen::MatrixXd> pi_path;  // Pi_t per effective period
};

/// Validates spec against an m-variate series of length N; throws SeriesTooShort,
/// NonFiniteEntry, RankTooLarge or InvalidConfig.
void check_vecm_inputs(const MultivariateSeries& series, const VecmSpec& spec);

/// Number of coefficients per period in the panel built for `mode`.
int vecm_coefficients_per_period(int dim, const VecmSpec& spec, TimeVarying mode);

/// VEC regression as a panel with T = N - k - 1 periods, y_t = dX_t.
///
/// All: X_t = z_t' (x) I_m with z_t = (dX_{t-1}, ..., dX_{t-k}, X_{t-k}, 1); the
/// coefficient is vec([Gamma_1 ... Gamma_k Pi mu]).
/// PiOnly: X_t = X_{t-k}' (x) I_m, coefficient vec(Pi), and the response is
/// dX_t minus the frozen Gamma/mu terms of the time-invariant fit.
RegressionPanel build_vecm_panel(const MultivariateSeries& series, const VecmSpec& spec, TimeVarying mode);

/// PiOnly panel using an existing time-invariant fit for the frozen terms.
RegressionPanel build_pi_panel(const MultivariateSeries& series, const VecmSpec& spec, const VecmFit& fit);

/// Pooled OLS with every coefficient time-invariant, then decompose_pi.
VecmFit fit_vecm_invariant(const MultivariateSeries& series, const VecmSpec& spec);

/// Pi = U S V': beta* = first r columns of V, alpha = first r columns of U S,
/// with each beta* column's largest-magnitude entry made positive.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> decompose_pi(const Eigen::MatrixXd& pi, int rank);

/// Least-squares alpha_t = Pi_t beta* (beta*' beta*)^{-1}. Throws SingularBetaGram.
Eigen::MatrixXd recover_alpha(const Eigen::MatrixXd& pi_t, const Eigen::MatrixXd& beta_star);

double comovement_degree(const Eigen::MatrixXd& alpha, DegreeNorm norm);

/// Time-invariant fit, Pi decomposition, break detection on the time-varying
/// panel, Pi_t by cumulative sums, alpha_t recovery and degree series.
ComovementResult comovement_pipeline(const MultivariateSeries& series, const VecmSpec& spec,
                                     const DetectConfig& lasso, TimeVarying mode = TimeVarying::PiOnly);

}  // namespace tvpbreak
