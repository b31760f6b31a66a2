#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <string>

namespace pinnbound {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

/// Rejects ragged rows, non-numeric entries, and non-finite values (FormatError).
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// Pretty-printed, trailing newline. Parent directories are created.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Shortest round-trip decimal text for a double (same formatting as the JSON writer).
std::string format_double(double v);

}  // namespace pinnbound
