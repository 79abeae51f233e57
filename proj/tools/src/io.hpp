#pragma once
// File formats for the command-line tool: JSON for parameters, projections
// and reports; CSV for datasets, sweeps and grids.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "kldproj/eval.hpp"

namespace kldproj::cli {

using nlohmann::json;

json to_json(const Vector& v);
json to_json(const Matrix& m);  ///< array of rows
Vector vector_from_json(const json& j, const std::string& what);
Matrix matrix_from_json(const json& j, const std::string& what);

json params_to_json(const GaussianParams& p);
GaussianParams params_from_json(const json& j, const std::string& what);

json projection_to_json(const ProjectionResult& p);
ProjectionResult projection_from_json(const json& j);

json read_json(const std::filesystem::path& path);
GaussianParams read_params(const std::filesystem::path& path);

/// Columns x1..xd then label.
LabeledDataset read_dataset(const std::filesystem::path& path);
std::string dataset_csv(const LabeledDataset& data);

/// Shortest text that reads back to the same double ("%.17g").
std::string number(double value);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace kldproj::cli
