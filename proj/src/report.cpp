#include "tvpbreak/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "tvpbreak/csv_io.hpp"
#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// Row-major nested arrays.
json to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) rows.push_back(to_json(Eigen::VectorXd(a.row(i).transpose())));
  return rows;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json label_json(const RegressionPanel& panel, int t) {
  const auto label = panel.label(t);
  return label ? json(*label) : json(nullptr);
}

std::string label_or_index(const RegressionPanel& panel, int t) { return panel.label(t).value_or(std::to_string(t + 1)); }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

json break_report_json(const BreakReport& report, const RegressionPanel& panel, std::string_view kind,
                       const json& run_config) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = kind;
  doc["run_config"] = run_config;
  doc["dimensions"] = {{"periods", panel.periods()}, {"obs_dim", panel.obs_dim()}, {"coef_dim", panel.coef_dim()}};
  doc["lambda"] = report.lambda_used;
  doc["criterion"] = report.criterion;

  json breaks = json::array();
  for (const auto& event : report.breaks) {
    breaks.push_back({{"period_index", event.period},
                      {"label", event.label ? json(*event.label) : json(nullptr)},
                      {"magnitude", event.magnitude},
                      {"jump", to_json(event.jump)}});
  }
  doc["breaks"] = std::move(breaks);

  const auto& d = report.diagnostics;
  doc["diagnostics"] = {{"sweeps", d.sweeps},
                        {"objective", number_or_null(d.objective)},
                        {"kkt_residual", number_or_null(d.kkt_residual)},
                        {"converged", d.converged},
                        {"not_converged_warning", d.not_converged_warning},
                        {"unconverged_path_points", d.unconverged_path_points},
                        {"lambda_max", d.lambda_max},
                        {"response_scale", d.response_scale},
                        {"degenerate", d.degenerate},
                        {"kkt_tol", d.kkt_tol},
                        {"max_sweeps", d.max_sweeps},
                        {"objective_tol", d.objective_tol}};
  doc["baseline"] = {{"beta0", to_json(report.path.beta0)},
                     {"rank", d.baseline_rank},
                     {"ridge_used", d.ridge_used},
                     {"residual_norm", d.baseline_residual_norm}};

  json path = json::array();
  for (const auto& row : report.lambda_path) {
    path.push_back({{"lambda", row.lambda},
                    {"active_count", row.active_count},
                    {"objective", number_or_null(row.objective)},
                    {"sweeps", row.sweeps},
                    {"converged", row.converged},
                    {"kkt_residual", number_or_null(row.kkt_residual)},
                    {"bic", number_or_null(row.bic)}});
  }
  doc["lambda_path"] = std::move(path);
  return doc;
}

json comovement_report_json(const ComovementResult& result, const RegressionPanel& panel, const json& run_config) {
  json doc = break_report_json(result.report, panel, "vecm", run_config);
  const VecmFit& fit = result.fit;
  json gammas = json::array();
  for (const auto& g : fit.gammas) gammas.push_back(to_json(g));

  json periods = json::array();
  const auto& como = result.comovement;
  for (std::size_t t = 0; t < como.alphas.size(); ++t) {
    periods.push_back({{"period_index", static_cast<int>(t) + 1},
                       {"label", label_json(panel, static_cast<int>(t))},
                       {"degree", como.degrees(static_cast<Eigen::Index>(t))},
                       {"alpha", to_json(como.alphas[t])}});
  }
  doc["vecm"] = {{"effective_periods", fit.effective_T},
                 {"gammas", std::move(gammas)},
                 {"mu", to_json(fit.mu)},
                 {"pi", to_json(fit.pi)},
                 {"alpha", to_json(fit.alpha)},
                 {"beta_star", to_json(fit.beta_star)},
                 {"ridge_used", fit.ridge_used},
                 {"residual_norm", fit.residual_norm},
                 {"break_periods", como.break_periods},
                 {"periods", std::move(periods)}};
  return doc;
}

void write_path_plot_csv(std::ostream& out, const BreakReport& report, const RegressionPanel& panel) {
  const auto& betas = report.path.betas;
  out << "period,label";
  for (Eigen::Index j = 1; j <= betas.rows(); ++j) out << ",beta_" << j;
  out << '\n';
  for (int t = 0; t < panel.periods(); ++t) {
    out << t + 1 << ',' << csv_cell(label_or_index(panel, t));
    for (Eigen::Index j = 0; j < betas.rows(); ++j) out << ',' << format_double(betas(j, t));
    out << '\n';
  }
}

void write_degree_plot_csv(std::ostream& out, const ComovementSeries& series) {
  out << "period,label,degree\n";
  for (Eigen::Index t = 0; t < series.degrees.size(); ++t) {
    out << t + 1 << ',' << csv_cell(series.periods.at(static_cast<std::size_t>(t))) << ','
        << format_double(series.degrees(t)) << '\n';
  }
}

void write_lambda_plot_csv(std::ostream& out, const BreakReport& report) {
  out << "lambda,active_count,objective\n";
  for (const auto& row : report.lambda_path) {
    out << format_double(row.lambda) << ',' << row.active_count << ',' << format_double(row.objective) << '\n';
  }
}

std::filesystem::path plot_path_for(const std::filesystem::path& report_path) {
  std::filesystem::path out = report_path;
  out.replace_extension(".plot.csv");
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace tvpbreak
