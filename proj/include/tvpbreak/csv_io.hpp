#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "tvpbreak/panel.hpp"
#include "tvpbreak/series.hpp"

namespace tvpbreak {

/// Shortest decimal form of x that parses back to the same double.
std::string format_double(double x);

/// Multivariate series CSV: a header row, then one row per time point with the
/// period label (integer or ISO-8601 date) first and m numeric columns after it.
///
/// Throws ParseError (with row and column), NonMonotonicDates or NonFiniteEntry.
MultivariateSeries parse_series_csv(std::istream& in, std::string_view source = "<stream>");
MultivariateSeries read_series_csv(const std::filesystem::path& path);

/// Panel CSV: header `label,y,x1,...,xn`, then m consecutive rows per period
/// sharing one label. Row i of period t holds y_t(i) and row i of X_t.
RegressionPanel parse_panel_csv(std::istream& in, std::string_view source = "<stream>");
RegressionPanel read_panel_csv(const std::filesystem::path& path);

/// Writers emit full round-trip precision. Periods without labels are written
/// as 1, 2, ... Throws IoError when the file cannot be written.
void write_series_csv(std::ostream& out, const MultivariateSeries& series);
void write_series_csv(const std::filesystem::path& path, const MultivariateSeries& series);
void write_panel_csv(std::ostream& out, const RegressionPanel& panel);
void write_panel_csv(const std::filesystem::path& path, const RegressionPanel& panel);

}  // namespace tvpbreak
