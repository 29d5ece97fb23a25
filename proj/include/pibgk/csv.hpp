#pragma once

// CSV output helpers. All numbers are written with %.17g so files round-trip
// exactly and do not depend on the locale.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pibgk/core.hpp"

namespace pibgk {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < header.size(); ++c)
      out_ << (c ? "," : "") << header[c];
    out_ << "\n";
  }

  void row(std::span<const double> values) {
    for (std::size_t c = 0; c < values.size(); ++c)
      out_ << (c ? "," : "") << g17(values[c]);
    out_ << "\n";
  }
  void row(std::initializer_list<double> values) {
    row(std::span<const double>(values.begin(), values.size()));
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      out_ << (c ? "," : "") << cells[c];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// Macroscopic snapshot: header x[,y],u1..uK, row-major over cells.
inline void write_macro_csv(const std::string& path, const Grid& g,
                            const MacroField& u) {
  std::vector<std::string> header;
  header.push_back("x");
  if (g.dim == 2) header.push_back("y");
  for (int k = 0; k < u.n_components; ++k)
    header.push_back("u" + std::to_string(k + 1));
  CsvWriter w(path, header);
  std::vector<double> r;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      r.clear();
      r.push_back(g.x_center(i));
      if (g.dim == 2) r.push_back(g.y_center(j));
      for (int k = 0; k < u.n_components; ++k) r.push_back(u.at(k, i, j));
      w.row(r);
    }
}

}  // namespace pibgk
