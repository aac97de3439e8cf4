#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "specedge/errors.hpp"

namespace specedge {

/// Round-trip-faithful decimal rendering; identical inputs yield identical
/// output bytes.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  row += '\n';
  return row;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << body;
  out.flush();
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace specedge
