#include "tvpbreak/csv_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "tvpbreak/error.hpp"

namespace tvpbreak {

namespace {

enum class LabelKind { Integer, Date };

struct Row {
  int line = 0;  // 1-based line in the file
  std::vector<std::string> cells;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::string_view source, int line, int column, const std::string& what) {
  std::ostringstream msg;
  msg << source << ": row " << line << ", column " << column << ": " << what;
  throw Error(ErrorCode::ParseError, msg.str());
}

// Comma-separated cells; a cell may be double-quoted, with "" as an escaped quote.
std::vector<std::string> split_cells(std::string_view line, std::string_view source, int line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"' && trim(cell).empty()) {
      quoted = was_quoted = true;
      cell.clear();
    } else if (c == ',') {
      cells.emplace_back(was_quoted ? cell : std::string(trim(cell)));
      cell.clear();
      was_quoted = false;
    } else if (was_quoted) {
      if (c != ' ' && c != '\t') {
        parse_error(source, line_no, static_cast<int>(cells.size()) + 1, "text after a closing quote");
      }
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) parse_error(source, line_no, static_cast<int>(cells.size()) + 1, "unterminated quoted cell");
  cells.emplace_back(was_quoted ? cell : std::string(trim(cell)));
  return cells;
}

std::vector<Row> read_rows(std::istream& in, std::string_view source) {
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back({line_no, split_cells(line, source, line_no)});
  }
  if (in.bad()) throw Error(ErrorCode::IoError, std::string(source) + ": read failed");
  return rows;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

bool is_integer_label(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  return all_digits(s);
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// YYYY-MM-DD, optionally followed by THH:MM[:SS] and a Z or +HH:MM offset, or YYYY-MM.
bool is_iso_date(std::string_view s) {
  if (s.size() < 7 || !all_digits(s.substr(0, 4)) || s[4] != '-' || !all_digits(s.substr(5, 2))) return false;
  const int year = to_int(s.substr(0, 4));
  const int month = to_int(s.substr(5, 2));
  if (month < 1 || month > 12) return false;
  if (s.size() == 7) return true;
  if (s.size() < 10 || s[7] != '-' || !all_digits(s.substr(8, 2))) return false;
  static constexpr std::array<int, 12> kDays{31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const int day = to_int(s.substr(8, 2));
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (day < 1 || day > kDays[static_cast<std::size_t>(month - 1)] || (month == 2 && day == 29 && !leap)) return false;
  if (s.size() == 10) return true;

  std::string_view rest = s.substr(10);
  if (rest.front() != 'T' && rest.front() != ' ') return false;
  rest.remove_prefix(1);
  auto two_digits = [&](int max) {
    if (rest.size() < 2 || !all_digits(rest.substr(0, 2)) || to_int(rest.substr(0, 2)) > max) return false;
    rest.remove_prefix(2);
    return true;
  };
  if (!two_digits(23) || rest.empty() || rest.front() != ':') return false;
  rest.remove_prefix(1);
  if (!two_digits(59)) return false;
  if (!rest.empty() && rest.front() == ':') {
    rest.remove_prefix(1);
    if (!two_digits(60)) return false;
  }
  if (rest.empty() || rest == "Z") return true;
  if (rest.front() != '+' && rest.front() != '-') return false;
  rest.remove_prefix(1);
  if (!two_digits(23) || rest.empty() || rest.front() != ':') return false;
  rest.remove_prefix(1);
  return two_digits(59) && rest.empty();
}

LabelKind classify_label(const std::string& label, std::string_view source, int line) {
  if (is_integer_label(label)) return LabelKind::Integer;
  if (is_iso_date(label)) return LabelKind::Date;
  parse_error(source, line, 1, "period label '" + label + "' is neither an integer nor an ISO-8601 date");
}

double parse_number(const std::string& cell, std::string_view source, int line, int column) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (first == last || ptr != last) parse_error(source, line, column, "'" + cell + "' is not a number");
  if (ec == std::errc::result_out_of_range) {
    std::ostringstream msg;
    msg << source << ": row " << line << ", column " << column << ": '" << cell << "' overflows a double";
    throw Error(ErrorCode::NonFiniteEntry, msg.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << source << ": row " << line << ", column " << column << ": non-finite value '" << cell << "'";
    throw Error(ErrorCode::NonFiniteEntry, msg.str());
  }
  return value;
}

// Checks the header and the width of every row, and label kinds and order across
// distinct consecutive labels. Returns the data rows.
std::vector<Row> checked_rows(std::istream& in, std::string_view source, std::size_t min_columns,
                              const char* layout) {
  std::vector<Row> rows = read_rows(in, source);
  if (rows.empty()) parse_error(source, 1, 1, "missing header row");
  const Row header = rows.front();
  rows.erase(rows.begin());
  if (header.cells.size() < min_columns) {
    parse_error(source, header.line, static_cast<int>(header.cells.size()),
                std::string("header must have the layout ") + layout);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyPanel, std::string(source) + ": no data rows");

  std::optional<LabelKind> kind;
  const std::string* previous = nullptr;
  for (const Row& row : rows) {
    if (row.cells.size() != header.cells.size()) {
      std::ostringstream what;
      what << "expected " << header.cells.size() << " columns, found " << row.cells.size();
      parse_error(source, row.line, static_cast<int>(std::min(row.cells.size(), header.cells.size())) + 1,
                  what.str());
    }
    const std::string& label = row.cells.front();
    const LabelKind k = classify_label(label, source, row.line);
    if (kind && *kind != k) parse_error(source, row.line, 1, "period labels mix integers and dates");
    kind = k;
    if (previous && *previous != label && !label_less(*previous, label)) {
      std::ostringstream msg;
      msg << source << ": row " << row.line << ": label '" << label << "' does not follow '" << *previous << "'";
      throw Error(ErrorCode::NonMonotonicDates, msg.str());
    }
    previous = &label;
  }
  return rows;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

MultivariateSeries parse_series_csv(std::istream& in, std::string_view source) {
  const std::vector<Row> rows = checked_rows(in, source, 2, "label,series_1,...");
  const std::size_t m = rows.front().cells.size() - 1;
  MultivariateSeries series;
  series.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  series.labels.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (i > 0 && rows[i - 1].cells.front() == row.cells.front()) {
      std::ostringstream msg;
      msg << source << ": row " << row.line << ": label '" << row.cells.front() << "' repeats";
      throw Error(ErrorCode::NonMonotonicDates, msg.str());
    }
    series.labels->push_back(row.cells.front());
    for (std::size_t j = 0; j < m; ++j) {
      series.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_number(row.cells[j + 1], source, row.line, static_cast<int>(j) + 2);
    }
  }
  return series;
}

MultivariateSeries read_series_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_series_csv(in, path.string());
}

RegressionPanel parse_panel_csv(std::istream& in, std::string_view source) {
  const std::vector<Row> rows = checked_rows(in, source, 3, "label,y,x1,...,xn");
  const std::size_t n = rows.front().cells.size() - 2;

  PanelData data;
  data.period_labels.emplace();
  std::size_t start = 0;
  std::optional<std::size_t> obs_dim;
  while (start < rows.size()) {
    std::size_t end = start;
    while (end < rows.size() && rows[end].cells.front() == rows[start].cells.front()) ++end;
    const std::size_t m = end - start;
    if (obs_dim && *obs_dim != m) {
      std::ostringstream msg;
      msg << source << ": row " << rows[start].line << ": period '" << rows[start].cells.front() << "' has " << m
          << " rows, earlier periods have " << *obs_dim;
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
    obs_dim = m;

    Eigen::MatrixXd X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const Row& row = rows[start + i];
      const auto r = static_cast<Eigen::Index>(i);
      y(r) = parse_number(row.cells[1], source, row.line, 2);
      for (std::size_t j = 0; j < n; ++j) {
        X(r, static_cast<Eigen::Index>(j)) = parse_number(row.cells[j + 2], source, row.line, static_cast<int>(j) + 3);
      }
    }
    data.design_blocks.push_back(std::move(X));
    data.responses.push_back(std::move(y));
    data.period_labels->push_back(rows[start].cells.front());
    start = end;
  }
  return validate_panel(std::move(data));
}

RegressionPanel read_panel_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_panel_csv(in, path.string());
}

void write_series_csv(std::ostream& out, const MultivariateSeries& series) {
  out << "label";
  for (int j = 1; j <= series.dim(); ++j) out << ",x" << j;
  out << '\n';
  for (int i = 0; i < series.length(); ++i) {
    out << (series.labels ? quote_if_needed(series.labels->at(static_cast<std::size_t>(i))) : std::to_string(i + 1));
    for (int j = 0; j < series.dim(); ++j) out << ',' << format_double(series.values(i, j));
    out << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const MultivariateSeries& series) {
  auto out = open_output(path);
  write_series_csv(out, series);
  finish(out, path);
}

void write_panel_csv(std::ostream& out, const RegressionPanel& panel) {
  out << "label,y";
  for (int j = 1; j <= panel.coef_dim(); ++j) out << ",x" << j;
  out << '\n';
  for (int t = 0; t < panel.periods(); ++t) {
    const std::string label = quote_if_needed(panel.label(t).value_or(std::to_string(t + 1)));
    const auto& X = panel.design(t);
    const auto& y = panel.response(t);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out << label << ',' << format_double(y(i));
      for (Eigen::Index j = 0; j < X.cols(); ++j) out << ',' << format_double(X(i, j));
      out << '\n';
    }
  }
}

void write_panel_csv(const std::filesystem::path& path, const RegressionPanel& panel) {
  auto out = open_output(path);
  write_panel_csv(out, panel);
  finish(out, path);
}

}  // namespace tvpbreak
