#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <json.hpp>

#include "tvpbreak/breakpipe.hpp"
#include "tvpbreak/panel.hpp"
#include "tvpbreak/vecm.hpp"

namespace tvpbreak {

inline constexpr std::string_view kReportSchemaVersion = "1.0";

/// Report document for a fit or lambda-path run (docs/report.schema.json).
/// `kind` is "fit" or "lambda-path"; run_config is embedded verbatim.
nlohmann::json break_report_json(const BreakReport& report, const RegressionPanel& panel, std::string_view kind,
                                 const nlohmann::json& run_config);

/// Report document for a vecm run: the break report of the VEC panel plus a
/// "vecm" section with the time-invariant fit and the degree series.
nlohmann::json comovement_report_json(const ComovementResult& result, const RegressionPanel& panel,
                                      const nlohmann::json& run_config);

/// Plot data next to a report: period,label,beta_1..beta_n.
void write_path_plot_csv(std::ostream& out, const BreakReport& report, const RegressionPanel& panel);
/// period,label,degree with one row per effective period.
void write_degree_plot_csv(std::ostream& out, const ComovementSeries& series);
/// lambda,active_count,objective with one row per path point.
void write_lambda_plot_csv(std::ostream& out, const BreakReport& report);

/// `report.json` -> `report.plot.csv`.
std::filesystem::path plot_path_for(const std::filesystem::path& report_path);

/// Writes text to path, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace tvpbreak
