#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nvfactor {

// Every float written to an artifact goes through these: 12 significant digits.
inline constexpr int kSignificantDigits = 12;

std::string format_number(double v);
// The double nearest to format_number(v); JSON emitters store this so their
// shortest round-trip output never exceeds 12 digits.
double round_significant(double v);

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);
void write_csv_row(std::ostream& os, const std::vector<double>& values);

}  // namespace nvfactor
