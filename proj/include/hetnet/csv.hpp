#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace hetnet::csv {

/// Formats a double with 12 significant digits, the library-wide CSV float
/// convention (plot-ready and diff-stable across runs).
inline std::string field(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string field(const std::string& s) { return s; }
inline std::string field(const char* s) { return s; }

inline void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

}  // namespace hetnet::csv
