#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "dpmnet/error.hpp"

namespace dpmnet::detail {

struct NumberedLine {
  std::size_t number = 0;  // 1-based position in the file
  std::string text;
};

// Non-blank lines with their original numbers; trailing \r stripped.
inline std::vector<NumberedLine> read_lines(std::istream& in) {
  std::vector<NumberedLine> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back({number, line});
  }
  return lines;
}

inline std::vector<NumberedLine> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  return read_lines(in);
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

// Locale-independent; accepts an optional leading '+' that from_chars rejects.
inline std::optional<double> parse_double(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) return std::nullopt;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

// 17 significant digits: lossless double round-trip.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general);
  if (ec != std::errc()) throw numeric_error("number formatting failed");
  return std::string(buf, ptr);
}

inline std::string join_tabs(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += '\t';
    out += tokens[i];
  }
  return out;
}

}  // namespace dpmnet::detail
