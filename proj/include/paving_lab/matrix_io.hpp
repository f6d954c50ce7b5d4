#pragma once

#include <filesystem>

#include "json.hpp"
#include "paving_lab/matrix.hpp"

namespace paving_lab {

/// {rows, cols, re: [...], im: [...]} in row-major order.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

Matrix read_matrix_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace paving_lab
