#include "nvfactor/text_format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nvfactor {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0 as well
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
  return buf;
}

double round_significant(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
  os << '\n';
}

void write_csv_row(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k) os << (k ? "," : "") << format_number(values[k]);
  os << '\n';
}

}  // namespace nvfactor
