#ifndef XILAB_CSV_HPP
#define XILAB_CSV_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "xilab/core_stat.hpp"
#include "xilab/error.hpp"

namespace xilab {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ConfigError("line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(v)) throw ConfigError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

}  // namespace detail

/// Reads a headered two-column "x,y" CSV with decimal-point reals.
inline PairedSample read_xy_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<double> x, y;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected exactly two comma-separated fields");
    }
    if (!header_seen) {
      std::string a(detail::trim(view.substr(0, comma))), b(detail::trim(view.substr(comma + 1)));
      std::transform(a.begin(), a.end(), a.begin(), [](unsigned char c) { return std::tolower(c); });
      std::transform(b.begin(), b.end(), b.begin(), [](unsigned char c) { return std::tolower(c); });
      if (a != "x" || b != "y") throw ConfigError("line 1: expected header 'x,y'");
      header_seen = true;
      continue;
    }
    x.push_back(detail::parse_real(view.substr(0, comma), line_no));
    y.push_back(detail::parse_real(view.substr(comma + 1), line_no));
  }
  if (!header_seen) throw ConfigError("empty input: expected header 'x,y'");
  return PairedSample(std::move(x), std::move(y));
}

inline PairedSample read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file '" + path + "'");
  return read_xy_csv(in);
}

}  // namespace xilab

#endif  // XILAB_CSV_HPP
