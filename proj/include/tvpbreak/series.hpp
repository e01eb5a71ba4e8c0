#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tvpbreak {

/// Observations of an m-variate time series, one row per time point (N x m).
struct MultivariateSeries {
  Eigen::MatrixXd values;
  std::optional<std::vector<std::string>> labels;

  int length() const noexcept { return static_cast<int>(values.rows()); }
  int dim() const noexcept { return static_cast<int>(values.cols()); }
};

}  // namespace tvpbreak
