#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tvpbreak/panel.hpp"
#include "tvpbreak/series.hpp"

namespace tvpbreak {

enum class DesignDistribution {
  StandardNormal,  // iid N(0,1) entries
  UnitConstant,    // every entry of X_t equals 1
};

enum class LabelStyle {
  None,
  Index,    // "1", "2", ...
  Monthly,  // "1990-05-01", "1990-06-01", ...
};

struct PanelJump {
  int period = 0;  // 1-based, in 2..T
  Eigen::VectorXd jump;
};

struct SyntheticScenario {
  std::uint64_t seed = 0;
  int periods = 0;
  int obs_dim = 0;
  int coef_dim = 0;
  std::vector<PanelJump> jumps;
  Eigen::VectorXd base_beta;  // length n
  double noise_scale = 0.0;
  DesignDistribution design = DesignDistribution::StandardNormal;
  LabelStyle labels = LabelStyle::None;
};

/// Draws the panel and returns it with its true coefficient path.
///
/// Per period t = 1..T the generator draws X_t (column-major, m*n normals unless
/// UnitConstant) and then m noise normals. Throws InvalidSchedule for jump
/// periods outside 2..T, repeated periods or wrongly sized jumps.
std::pair<RegressionPanel, CoefficientPath> generate_panel(const SyntheticScenario& scenario);

struct PiJump {
  int period = 0;  // 1-based effective period of the VEC panel, in 2..T
  Eigen::MatrixXd change;  // m x m added to Pi from this period on
};

struct VecmScenario {
  std::uint64_t seed = 0;
  int lag_order = 1;
  int effective_periods = 0;  // usable VEC rows; the series has effective_periods + lag_order + 1 points
  std::vector<Eigen::MatrixXd> gammas;  // lag_order matrices, m x m
  Eigen::VectorXd mu;                   // length m
  Eigen::MatrixXd pi;                   // m x m, Pi before any jump
  std::vector<PiJump> jumps;
  double noise_scale = 1.0;
  Eigen::VectorXd initial_level;  // length m; zeros when empty
  int burn_in = 100;
  LabelStyle labels = LabelStyle::None;
};

struct VecmTruth {
  CoefficientPath pi_path;  // vec(Pi_t), column-major, m*m coefficients
  std::vector<Eigen::MatrixXd> gammas;
  Eigen::VectorXd mu;
};

/// Spectral radius of the levels-VAR companion matrix once the m - rank(Pi)
/// unit roots every VEC system carries have been set aside.
double stationary_spectral_radius(const std::vector<Eigen::MatrixXd>& gammas, const Eigen::MatrixXd& pi);

/// Simulates dX_t = sum_i Gamma_i dX_{t-i} + Pi_t X_{t-k} + mu + u_t forward,
/// discarding burn_in points. Throws UnstableSystem if any regime's stationary
/// spectral radius reaches 0.98, InvalidSchedule for bad jumps.
std::pair<MultivariateSeries, VecmTruth> generate_vecm(const VecmScenario& scenario);

/// Labels of the requested style for count consecutive periods.
std::vector<std::string> make_labels(LabelStyle style, int count);

}  // namespace tvpbreak
