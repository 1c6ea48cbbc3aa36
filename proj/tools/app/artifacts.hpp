#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvfactor/qcore.hpp"

namespace nvfactor::app {

// JSON numbers pass through round_significant so the dump never carries more
// than 12 significant digits.
double num(double v);
nlohmann::ordered_json nums(const std::vector<double>& v);
nlohmann::ordered_json matrix_json(const ComplexMatrix& m);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

// Bit string label of a basis index, qubit 0 first ("01").
std::string basis_label(int index, int n_qubits);

}  // namespace nvfactor::app
