#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lingcast/errors.hpp"
#include "lingcast/series.hpp"

namespace lingcast::io {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error(ErrorKind::InvalidArgument, "cannot format value");
  return std::string(buf.data(), end);
}

/// Whole-field strict parse; surrounding blanks are not accepted here.
inline std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct LabeledSeries {
  TimeSeries series;
  std::vector<std::string> labels;  ///< empty for the single-column layout
  std::optional<std::string> value_header;
  std::optional<std::string> label_header;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Accepts one column (value) or two columns (label, value). A first row
/// whose value field is not numeric is taken as a header. Blank lines are
/// skipped; row numbers in errors count every physical line from 1.
inline LabeledSeries parse_csv(std::string_view text) {
  std::vector<double> values;
  std::vector<std::string> labels;
  std::optional<std::string> value_header;
  std::optional<std::string> label_header;
  std::size_t columns = 0;
  std::size_t row = 0;
  bool first = true;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++row;
    if (detail::trim(line).empty()) continue;

    const auto fields = detail::split_fields(line);
    if (first) {
      columns = fields.size();
      if (columns != 1 && columns != 2)
        throw Error(ErrorKind::ParseError, "row " + std::to_string(row) + ": expected 1 or 2 columns, got " +
                                               std::to_string(columns) + " in '" + std::string(line) + "'");
    } else if (fields.size() != columns) {
      throw Error(ErrorKind::ParseError, "row " + std::to_string(row) + ": expected " + std::to_string(columns) +
                                             " columns in '" + std::string(detail::trim(line)) + "'");
    }

    const std::string_view value_field = fields.back();
    const auto v = parse_double(value_field);
    if (!v) {
      if (first) {
        value_header = std::string(value_field);
        if (columns == 2) label_header = std::string(fields.front());
        first = false;
        continue;
      }
      throw Error(ErrorKind::ParseError,
                  "row " + std::to_string(row) + ": cannot parse '" + std::string(value_field) + "' as a number");
    }
    first = false;
    values.push_back(*v);
    if (columns == 2) labels.emplace_back(fields.front());
  }
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "no data rows found");
  return {TimeSeries(std::move(values)), std::move(labels), std::move(value_header), std::move(label_header)};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LabeledSeries ingest_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

/// Single-column layout, no header.
inline std::string series_csv(std::span<const double> values) {
  std::string out;
  for (double v : values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

/// "index,value" rows with 1-based indices starting at `first_index`.
inline std::string indexed_csv(std::span<const double> values, std::size_t first_index) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(first_index + i);
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

}  // namespace lingcast::io
