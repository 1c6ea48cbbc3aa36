#include "app/artifacts.hpp"

#include <fstream>

#include "nvfactor/errors.hpp"
#include "nvfactor/text_format.hpp"

namespace nvfactor::app {

double num(double v) { return v == 0.0 ? 0.0 : round_significant(v); }

nlohmann::ordered_json nums(const std::vector<double>& v) {
  auto out = nlohmann::ordered_json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

nlohmann::ordered_json matrix_json(const ComplexMatrix& m) {
  auto re = nlohmann::ordered_json::array();
  auto im = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto rr = nlohmann::ordered_json::array();
    auto ri = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(num(m(i, k).real()));
      ri.push_back(num(m(i, k).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  nlohmann::ordered_json j;
  j["real"] = std::move(re);
  j["imag"] = std::move(im);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string basis_label(int index, int n_qubits) {
  std::string s;
  for (int q = n_qubits - 1; q >= 0; --q) s += ((index >> q) & 1) ? '1' : '0';
  return s;
}

}  // namespace nvfactor::app
