#pragma once

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lancaster/error.hpp"
#include "lancaster/kernels.hpp"
#include "lancaster/statistics.hpp"

namespace lancaster::io {

// ---------------------------------------------------------------------------
// Plain CSV (comma separated, header row, no quoting)
// ---------------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) { return fmt::format("{:.17g}", v); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace detail

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size())
        throw InputError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                         " fields, header has " + std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw InputError("CSV input is empty");
  return table;
}

inline CsvTable read_csv(const std::string& path) { return parse_csv(detail::read_file(path)); }

// Numeric column by name; errors carry the offending line and column.
inline std::vector<double> numeric_column(const CsvTable& table, std::string_view name) {
  const std::size_t c = table.column(name);
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto v = detail::parse_double(table.rows[r][c]);
    if (!v || !std::isfinite(*v))
      throw InputError("non-numeric cell '" + table.rows[r][c] + "' at data row " + std::to_string(r + 1) +
                       ", column '" + std::string(name) + "'");
    out.push_back(*v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Returns preprocessing
// ---------------------------------------------------------------------------

// First differences divided by their sample standard deviation (n - 1 denominator).
inline std::vector<double> preprocess_returns(const std::vector<double>& levels, std::string_view name = "series") {
  if (levels.size() < 3)
    throw InputError("column '" + std::string(name) + "' needs at least 3 rows, got " + std::to_string(levels.size()));
  std::vector<double> r(levels.size() - 1);
  for (std::size_t t = 1; t < levels.size(); ++t) r[t - 1] = levels[t] - levels[t - 1];
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double ss = 0.0;
  for (double v : r) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(r.size() - 1));
  if (!(sd > 0.0))
    throw InputError("column '" + std::string(name) + "' has zero standard deviation of returns; cannot normalise");
  for (double& v : r) v /= sd;
  return r;
}

struct IngestOptions {
  std::size_t first = 0;                         // first processed row used
  std::optional<std::size_t> count;              // rows used (default: all that fit)
  std::map<std::string, std::size_t> shifts;     // extra per-column offset
};

// Reads three named columns, converts each to normalised returns, then takes
// rows [first + shift, first + shift + count) of each processed column.
inline TripleSeries ingest_returns_table(const CsvTable& table, const std::array<std::string, 3>& columns,
                                         const IngestOptions& opt = {}) {
  for (const auto& [name, _] : opt.shifts)
    if (std::find(columns.begin(), columns.end(), name) == columns.end())
      throw InputError("--shift names column '" + name + "' which is not one of the selected columns");
  std::array<std::vector<double>, 3> processed;
  std::size_t max_shift = 0;
  for (std::size_t v = 0; v < 3; ++v) {
    processed[v] = preprocess_returns(numeric_column(table, columns[v]), columns[v]);
    auto it = opt.shifts.find(columns[v]);
    if (it != opt.shifts.end()) max_shift = std::max(max_shift, it->second);
  }
  const std::size_t len = processed[0].size();
  if (opt.first + max_shift >= len) throw InputError("row selection starts beyond the end of the processed series");
  const std::size_t count = opt.count.value_or(len - opt.first - max_shift);
  std::array<std::vector<double>, 3> cut;
  for (std::size_t v = 0; v < 3; ++v) {
    auto it = opt.shifts.find(columns[v]);
    const std::size_t start = opt.first + (it == opt.shifts.end() ? 0 : it->second);
    if (start + count > len)
      throw InputError("row selection [" + std::to_string(start) + ", " + std::to_string(start + count) +
                       ") exceeds the " + std::to_string(len) + " processed rows of column '" + columns[v] + "'");
    cut[v].assign(processed[v].begin() + static_cast<std::ptrdiff_t>(start),
                  processed[v].begin() + static_cast<std::ptrdiff_t>(start + count));
  }
  return {Series::scalars(std::move(cut[0])), Series::scalars(std::move(cut[1])), Series::scalars(std::move(cut[2]))};
}

inline TripleSeries ingest_returns_csv(const std::string& path, const std::array<std::string, 3>& columns,
                                       const IngestOptions& opt = {}) {
  return ingest_returns_table(read_csv(path), columns, opt);
}

// Writes named scalar columns as CSV with 17 significant digits.
inline std::string columns_to_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols) {
  lancaster::detail::require(names.size() == cols.size() && !cols.empty(), "column names and data disagree");
  std::string out;
  for (std::size_t c = 0; c < names.size(); ++c) out += (c ? "," : "") + names[c];
  out += '\n';
  for (std::size_t r = 0; r < cols[0].size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      lancaster::detail::require(cols[c].size() == cols[0].size(), "columns differ in length");
      out += (c ? "," : "") + detail::format_double(cols[c][r]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment results
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string experiment;
  double coefficient = 0.0;
  std::string method;
  std::string correction;
  double rejection_rate = 0.0;
  std::size_t replications = 0;
  double mean_statistic = 0.0;
  double seconds = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kResultsHeader =
    "experiment,coefficient,method,correction,rejection_rate,replications,mean_statistic,seconds";

inline std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.experiment, detail::format_double(r.coefficient), r.method,
                       r.correction, detail::format_double(r.rejection_rate), r.replications,
                       detail::format_double(r.mean_statistic), detail::format_double(r.seconds));
  return out;
}

inline std::vector<ResultRow> results_from_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  std::string joined;
  for (std::size_t c = 0; c < t.header.size(); ++c) joined += (c ? "," : "") + t.header[c];
  if (joined != kResultsHeader) throw InputError("unexpected results header '" + joined + "'");
  auto num = [](const std::string& s, const char* what) {
    auto v = detail::parse_double(s);
    if (!v) throw InputError(std::string("non-numeric ") + what + " '" + s + "'");
    return *v;
  };
  std::vector<ResultRow> rows;
  for (const auto& f : t.rows) {
    ResultRow r;
    r.experiment = f[0];
    r.coefficient = num(f[1], "coefficient");
    r.method = f[2];
    r.correction = f[3];
    r.rejection_rate = num(f[4], "rejection_rate");
    r.replications = static_cast<std::size_t>(num(f[5], "replications"));
    r.mean_statistic = num(f[6], "mean_statistic");
    r.seconds = num(f[7], "seconds");
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json results_to_json(const std::vector<ResultRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"experiment", r.experiment},
                   {"coefficient", r.coefficient},
                   {"method", r.method},
                   {"correction", r.correction},
                   {"rejection_rate", r.rejection_rate},
                   {"replications", r.replications},
                   {"mean_statistic", r.mean_statistic},
                   {"seconds", r.seconds}});
  return arr;
}

inline std::vector<ResultRow> results_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw InputError("results JSON must be an array");
  std::vector<ResultRow> rows;
  try {
    for (const auto& o : arr)
      rows.push_back({o.at("experiment").get<std::string>(), o.at("coefficient").get<double>(),
                      o.at("method").get<std::string>(), o.at("correction").get<std::string>(),
                      o.at("rejection_rate").get<double>(), o.at("replications").get<std::size_t>(),
                      o.at("mean_statistic").get<double>(), o.at("seconds").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed results JSON: ") + e.what());
  }
  return rows;
}

enum class ResultFormat { csv, json };

inline void emit_results(const std::vector<ResultRow>& rows, ResultFormat format, const std::string& path) {
  lancaster::detail::require(!rows.empty(), "no result rows to emit");
  detail::write_file(path, format == ResultFormat::csv ? results_to_csv(rows) : results_to_json(rows).dump(2) + "\n");
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Line chart of rejection rate against coefficient, one polyline per
// (method, correction) pair.
inline std::string results_to_svg(const std::vector<ResultRow>& rows) {
  lancaster::detail::require(!rows.empty(), "no result rows to plot");
  constexpr double width = 640, height = 420, left = 60, right = 200, top = 30, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto [lo_it, hi_it] = std::minmax_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.coefficient < b.coefficient;
  });
  double lo = lo_it->coefficient, hi = hi_it->coefficient;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto px = [&](double c) { return left + (c - lo) / (hi - lo) * plot_w; };
  auto py = [&](double r) { return top + (1.0 - r) * plot_h; };

  std::vector<std::string> keys;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    const std::string key = r.method + " (" + r.correction + ")";
    if (!series.count(key)) keys.push_back(key);
    series[key].emplace_back(r.coefficient, r.rejection_rate);
  }
  static constexpr std::array<const char*, 6> colours{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "  <rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "  <line x1=\"{2}\" y1=\"{4}\" x2=\"{3}\" y2=\"{4}\" stroke=\"black\"/>\n"
      "  <line x1=\"{2}\" y1=\"{5}\" x2=\"{2}\" y2=\"{4}\" stroke=\"black\"/>\n",
      width, height, left, left + plot_w, top + plot_h, top);
  for (int i = 0; i <= 4; ++i) {
    const double r = i / 4.0;
    svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.2f}</text>\n",
                       left - 6, py(r) + 4, r);
  }
  svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", px(lo),
                     top + plot_h + 16, detail::format_double(lo));
  svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", px(hi),
                     top + plot_h + 16, detail::format_double(hi));
  svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">coefficient</text>\n",
                     left + plot_w / 2, height - 10);
  svg += fmt::format(
      "  <text x=\"16\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">"
      "rejection rate</text>\n",
      top + plot_h / 2, top + plot_h / 2);
  svg += fmt::format("  <text x=\"{:.2f}\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                     left + plot_w / 2, detail::xml_escape(rows.front().experiment));
  for (std::size_t s = 0; s < keys.size(); ++s) {
    auto pts = series[keys[s]];
    std::sort(pts.begin(), pts.end());
    std::string coords;
    for (const auto& [c, r] : pts) coords += fmt::format("{}{:.2f},{:.2f}", coords.empty() ? "" : " ", px(c), py(r));
    const char* colour = colours[s % colours.size()];
    svg += fmt::format("  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", colour, coords);
    const double ly = top + 14 + 18 * static_cast<double>(s);
    svg += fmt::format("  <line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                       left + plot_w + 12, ly, left + plot_w + 32, colour);
    svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{}</text>\n", left + plot_w + 36, ly + 4,
                       detail::xml_escape(keys[s]));
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_plot(const std::vector<ResultRow>& rows, const std::string& path) {
  detail::write_file(path, results_to_svg(rows));
}

}  // namespace lancaster::io
