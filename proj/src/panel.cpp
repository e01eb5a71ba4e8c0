#include "tvpbreak/panel.hpp"

#include <charconv>
#include <cstdint>
#include <sstream>

#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {

std::optional<std::int64_t> parse_integer(const std::string& s) {
  std::int64_t value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

}  // namespace

bool label_less(const std::string& a, const std::string& b) {
  const auto ia = parse_integer(a);
  const auto ib = parse_integer(b);
  if (ia && ib) return *ia < *ib;
  return a < b;
}

std::optional<std::string> RegressionPanel::label(int t) const {
  if (!labels_) return std::nullopt;
  return labels_->at(static_cast<std::size_t>(t));
}

Eigen::VectorXd RegressionPanel::stacked_response() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(obs_dim_) * periods());
  for (int t = 0; t < periods(); ++t) out.segment(static_cast<Eigen::Index>(t) * obs_dim_, obs_dim_) = responses_[t];
  return out;
}

RegressionPanel validate_panel(PanelData data) {
  const std::size_t T = data.design_blocks.size();
  if (T == 0) throw Error(ErrorCode::EmptyPanel, "panel has no periods");
  if (data.responses.size() != T) {
    std::ostringstream msg;
    msg << "panel has " << T << " design blocks but " << data.responses.size() << " responses";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  const Eigen::Index m = data.design_blocks.front().rows();
  const Eigen::Index n = data.design_blocks.front().cols();
  if (m == 0 || n == 0) throw Error(ErrorCode::DimensionMismatch, "design blocks must be non-empty");

  for (std::size_t t = 0; t < T; ++t) {
    const auto& X = data.design_blocks[t];
    const auto& y = data.responses[t];
    if (X.rows() != m || X.cols() != n || y.size() != m) {
      std::ostringstream msg;
      msg << "period " << t + 1 << ": expected X " << m << "x" << n << " and y of length " << m << ", got X "
          << X.rows() << "x" << X.cols() << " and y of length " << y.size();
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    if (!X.allFinite() || !y.allFinite()) {
      std::ostringstream msg;
      msg << "period " << t + 1 << " contains a non-finite entry";
      throw Error(ErrorCode::NonFiniteEntry, msg.str());
    }
  }

  if (data.period_labels) {
    const auto& labels = *data.period_labels;
    if (labels.size() != T) {
      std::ostringstream msg;
      msg << "expected " << T << " period labels, got " << labels.size();
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    for (std::size_t t = 1; t < T; ++t) {
      if (!label_less(labels[t - 1], labels[t])) {
        std::ostringstream msg;
        msg << "period labels not strictly increasing at period " << t + 1 << " ('" << labels[t - 1] << "' then '"
            << labels[t] << "')";
        throw Error(ErrorCode::NonMonotonicDates, msg.str());
      }
    }
  }

  RegressionPanel panel;
  panel.obs_dim_ = static_cast<int>(m);
  panel.coef_dim_ = static_cast<int>(n);
  panel.blocks_ = std::move(data.design_blocks);
  panel.responses_ = std::move(data.responses);
  panel.labels_ = std::move(data.period_labels);
  return panel;
}

CoefficientPath reconstruct_path(const Eigen::VectorXd& beta0, const Eigen::MatrixXd& deltas) {
  if (deltas.rows() != beta0.size()) {
    std::ostringstream msg;
    msg << "deltas have length " << deltas.rows() << " but beta0 has length " << beta0.size();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  CoefficientPath path{beta0, deltas, Eigen::MatrixXd(deltas.rows(), deltas.cols())};
  Eigen::VectorXd running = beta0;
  for (Eigen::Index t = 0; t < deltas.cols(); ++t) {
    running += deltas.col(t);
    path.betas.col(t) = running;
  }
  return path;
}

Eigen::MatrixXd difference_path(const Eigen::VectorXd& beta0, const Eigen::MatrixXd& betas) {
  if (betas.rows() != beta0.size()) throw Error(ErrorCode::DimensionMismatch, "betas and beta0 lengths differ");
  Eigen::MatrixXd deltas(betas.rows(), betas.cols());
  for (Eigen::Index t = 0; t < betas.cols(); ++t) {
    deltas.col(t) = betas.col(t) - (t == 0 ? beta0 : Eigen::VectorXd(betas.col(t - 1)));
  }
  return deltas;
}

}  // namespace tvpbreak
