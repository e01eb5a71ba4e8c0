#include "tvpbreak/synthgen.hpp"

#include <algorithm>
#include <complex>
#include <cstdio>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tvpbreak/error.hpp"
#include "tvpbreak/rng.hpp"

namespace tvpbreak {

namespace {

constexpr double kStabilityBound = 0.98;

void check_jump_period(int period, int periods, std::set<int>& seen) {
  if (period < 2 || period > periods) {
    std::ostringstream msg;
    msg << "jump period " << period << " outside 2.." << periods;
    throw Error(ErrorCode::InvalidSchedule, msg.str());
  }
  if (!seen.insert(period).second) {
    std::ostringstream msg;
    msg << "jump period " << period << " scheduled twice";
    throw Error(ErrorCode::InvalidSchedule, msg.str());
  }
}

int numerical_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = 1e-10 * sv(0);
  return static_cast<int>((sv.array() > cutoff).count());
}

Eigen::VectorXd vec(const Eigen::MatrixXd& a) { return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()); }

}  // namespace

std::vector<std::string> make_labels(LabelStyle style, int count) {
  std::vector<std::string> labels;
  if (style == LabelStyle::None) return labels;
  labels.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (style == LabelStyle::Index) {
      labels.push_back(std::to_string(i + 1));
    } else {
      const int month_index = 4 + i;  // first label is May 1990
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%04d-%02d-01", 1990 + month_index / 12, month_index % 12 + 1);
      labels.emplace_back(buf);
    }
  }
  return labels;
}

std::pair<RegressionPanel, CoefficientPath> generate_panel(const SyntheticScenario& sc) {
  if (sc.periods < 1 || sc.obs_dim < 1 || sc.coef_dim < 1) {
    throw Error(ErrorCode::InvalidSchedule, "scenario dimensions must be positive");
  }
  if (sc.base_beta.size() != sc.coef_dim) throw Error(ErrorCode::InvalidSchedule, "base_beta must have length n");
  if (!(sc.noise_scale >= 0.0)) throw Error(ErrorCode::InvalidSchedule, "noise_scale must be nonnegative");

  Eigen::MatrixXd deltas = Eigen::MatrixXd::Zero(sc.coef_dim, sc.periods);
  std::set<int> seen;
  for (const auto& jump : sc.jumps) {
    check_jump_period(jump.period, sc.periods, seen);
    if (jump.jump.size() != sc.coef_dim) throw Error(ErrorCode::InvalidSchedule, "jump vector must have length n");
    deltas.col(jump.period - 1) = jump.jump;
  }
  CoefficientPath truth = reconstruct_path(sc.base_beta, deltas);

  PortableRng rng(sc.seed);
  PanelData data;
  data.design_blocks.reserve(static_cast<std::size_t>(sc.periods));
  data.responses.reserve(static_cast<std::size_t>(sc.periods));
  for (int t = 0; t < sc.periods; ++t) {
    Eigen::MatrixXd X(sc.obs_dim, sc.coef_dim);
    if (sc.design == DesignDistribution::UnitConstant) {
      X.setOnes();
    } else {
      for (Eigen::Index k = 0; k < X.size(); ++k) X.data()[k] = rng.normal();
    }
    Eigen::VectorXd y = X * truth.betas.col(t);
    for (int i = 0; i < sc.obs_dim; ++i) y(i) += sc.noise_scale * rng.normal();
    data.design_blocks.push_back(std::move(X));
    data.responses.push_back(std::move(y));
  }
  if (sc.labels != LabelStyle::None) data.period_labels = make_labels(sc.labels, sc.periods);
  return {validate_panel(std::move(data)), std::move(truth)};
}

double stationary_spectral_radius(const std::vector<Eigen::MatrixXd>& gammas, const Eigen::MatrixXd& pi) {
  const int m = static_cast<int>(pi.rows());
  const int k = static_cast<int>(gammas.size());
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "at least one Gamma matrix is required");
  const int order = k + 1;

  // Levels form: X_t = sum_{i=1}^{k+1} A_i X_{t-i} + ...
  std::vector<Eigen::MatrixXd> A(static_cast<std::size_t>(order), Eigen::MatrixXd::Zero(m, m));
  A[0] = Eigen::MatrixXd::Identity(m, m) + gammas[0];
  for (int i = 1; i < k; ++i) A[static_cast<std::size_t>(i)] = gammas[static_cast<std::size_t>(i)] - gammas[static_cast<std::size_t>(i - 1)];
  A[static_cast<std::size_t>(k)] = -gammas[static_cast<std::size_t>(k - 1)];
  A[static_cast<std::size_t>(k - 1)] += pi;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m * order, m * order);
  for (int i = 0; i < order; ++i) companion.block(0, i * m, m, m) = A[static_cast<std::size_t>(i)];
  companion.block(m, 0, m * (order - 1), m * (order - 1)).setIdentity();

  Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> values(eig.eigenvalues().begin(), eig.eigenvalues().end());
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    return std::abs(a - 1.0) < std::abs(b - 1.0);
  });
  const std::size_t unit_roots = static_cast<std::size_t>(m - numerical_rank(pi));
  double radius = 0.0;
  for (std::size_t i = unit_roots; i < values.size(); ++i) radius = std::max(radius, std::abs(values[i]));
  return radius;
}

std::pair<MultivariateSeries, VecmTruth> generate_vecm(const VecmScenario& sc) {
  const int m = static_cast<int>(sc.pi.rows());
  const int k = sc.lag_order;
  if (m < 1 || sc.pi.cols() != m) throw Error(ErrorCode::InvalidSchedule, "Pi must be square and non-empty");
  if (k < 1 || static_cast<int>(sc.gammas.size()) != k) {
    throw Error(ErrorCode::InvalidSchedule, "need exactly lag_order Gamma matrices");
  }
  for (const auto& g : sc.gammas) {
    if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::InvalidSchedule, "Gamma matrices must be m x m");
  }
  if (sc.mu.size() != m) throw Error(ErrorCode::InvalidSchedule, "mu must have length m");
  if (sc.effective_periods < 1) throw Error(ErrorCode::InvalidSchedule, "effective_periods must be positive");
  if (sc.burn_in < 0 || !(sc.noise_scale >= 0.0)) throw Error(ErrorCode::InvalidSchedule, "bad burn-in or noise");

  const int T = sc.effective_periods;
  Eigen::MatrixXd deltas = Eigen::MatrixXd::Zero(m * m, T);
  std::set<int> seen;
  for (const auto& jump : sc.jumps) {
    check_jump_period(jump.period, T, seen);
    if (jump.change.rows() != m || jump.change.cols() != m) {
      throw Error(ErrorCode::InvalidSchedule, "Pi jumps must be m x m");
    }
    deltas.col(jump.period - 1) = vec(jump.change);
  }
  VecmTruth truth{reconstruct_path(vec(sc.pi), deltas), sc.gammas, sc.mu};

  auto pi_at = [&](int period) {
    return Eigen::Map<const Eigen::MatrixXd>(truth.pi_path.betas.col(period - 1).data(), m, m);
  };
  {
    double radius = stationary_spectral_radius(sc.gammas, sc.pi);
    for (const auto& jump : sc.jumps) radius = std::max(radius, stationary_spectral_radius(sc.gammas, pi_at(jump.period)));
    if (radius >= kStabilityBound) {
      std::ostringstream msg;
      msg << "stationary spectral radius " << radius << " is not below " << kStabilityBound;
      throw Error(ErrorCode::UnstableSystem, msg.str());
    }
  }

  const int length = T + k + 1;
  const int total = sc.burn_in + length;
  const Eigen::VectorXd start = sc.initial_level.size() == m ? sc.initial_level : Eigen::VectorXd::Zero(m);
  // Presample: k+1 copies of the start level, so every early difference is zero.
  const int pad = k + 1;
  std::vector<Eigen::VectorXd> level(static_cast<std::size_t>(pad + total), start);

  PortableRng rng(sc.seed);
  Eigen::VectorXd noise(m);
  for (int j = 0; j < total; ++j) {
    const int at = pad + j;
    const int index = j - sc.burn_in;  // position in the returned series
    const int period = index - k;      // effective period of this equation
    const Eigen::MatrixXd pi = period >= 1 ? Eigen::MatrixXd(pi_at(period)) : sc.pi;

    Eigen::VectorXd diff = pi * level[static_cast<std::size_t>(at - k)] + sc.mu;
    for (int i = 1; i <= k; ++i) {
      diff.noalias() += sc.gammas[static_cast<std::size_t>(i - 1)] *
                        (level[static_cast<std::size_t>(at - i)] - level[static_cast<std::size_t>(at - i - 1)]);
    }
    for (int i = 0; i < m; ++i) noise(i) = rng.normal();
    level[static_cast<std::size_t>(at)] = level[static_cast<std::size_t>(at - 1)] + diff + sc.noise_scale * noise;
  }

  MultivariateSeries series;
  series.values.resize(length, m);
  for (int i = 0; i < length; ++i) series.values.row(i) = level[static_cast<std::size_t>(pad + sc.burn_in + i)].transpose();
  if (sc.labels != LabelStyle::None) series.labels = make_labels(sc.labels, length);
  return {std::move(series), std::move(truth)};
}

}  // namespace tvpbreak
