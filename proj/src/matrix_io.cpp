#include "paving_lab/matrix_io.hpp"

#include <fstream>
#include <stdexcept>

namespace paving_lab {

nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> re, im;
  re.reserve(m.data().size());
  im.reserve(m.data().size());
  for (const auto& z : m.data()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  for (const char* key : {"rows", "cols", "re", "im"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("matrix json: missing field '") + key + "'");
  }
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != rows * cols || im.size() != rows * cols)
    throw std::invalid_argument("matrix json: re/im length does not match rows*cols");
  std::vector<Complex> entries(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) entries[i] = {re[i], im[i]};
  return Matrix(rows, cols, std::move(entries));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

Matrix read_matrix_file(const std::filesystem::path& path) { return matrix_from_json(read_json_file(path)); }

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace paving_lab
