#include "io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kldproj/error.hpp"

namespace kldproj::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_format(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "malformed " + what);
}

}  // namespace

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) bad_format(what);
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad_format(what);
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad_format(what);
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != cols) bad_format(what + " (ragged rows)");
    m.row(static_cast<Index>(i)) = vector_from_json(j[i], what).transpose();
  }
  return m;
}

json params_to_json(const GaussianParams& p) {
  return {{"dim", p.dim()}, {"mean", to_json(p.mean)}, {"covariance", to_json(p.covariance)}};
}

GaussianParams params_from_json(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("mean") || !j.contains("covariance")) bad_format(what);
  GaussianParams p{vector_from_json(j["mean"], what + " mean"),
                   matrix_from_json(j["covariance"], what + " covariance")};
  if (p.covariance.rows() != p.mean.size() || p.covariance.cols() != p.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, what + ": mean and covariance sizes differ");
  }
  return p;
}

json projection_to_json(const ProjectionResult& p) {
  json out;
  out["method"] = std::string(to_string(p.method));
  out["frame"] = std::string(to_string(p.frame));
  out["r"] = p.matrix.rows();
  out["d"] = p.matrix.cols();
  out["matrix"] = to_json(p.matrix);
  out["original_matrix"] = to_json(p.original_matrix);
  out["center"] = to_json(p.center);
  out["achieved_kld"] = p.achieved_kld;
  out["component_scores"] = p.component_scores;
  out["warnings"] = p.warnings;
  return out;
}

ProjectionResult projection_from_json(const json& j) {
  if (!j.is_object() || !j.contains("original_matrix") || !j.contains("center")) {
    bad_format("projection file");
  }
  ProjectionResult p;
  p.matrix = matrix_from_json(j.at("matrix"), "projection matrix");
  p.original_matrix = matrix_from_json(j.at("original_matrix"), "projection original_matrix");
  p.center = vector_from_json(j.at("center"), "projection center");
  p.method = parse_method(j.value("method", "refined"));
  p.frame = j.value("frame", "original") == "whitened_class1" ? Frame::WhitenedByClass1
                                                               : Frame::Original;
  p.achieved_kld = j.value("achieved_kld", 0.0);
  if (p.center.size() != p.original_matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "projection center and matrix sizes differ");
  }
  return p;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

GaussianParams read_params(const fs::path& path) {
  return params_from_json(read_json(path), path.string());
}

LabeledDataset read_dataset(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, path.string() + " is empty");
  const auto columns = static_cast<Index>(std::count(line.begin(), line.end(), ',') + 1);
  if (columns < 2) throw Error(ErrorCode::InvalidArgument, path.string() + ": need x columns and a label");
  const Index d = columns - 1;

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* cursor = line.c_str();
    for (Index c = 0; c < columns; ++c) {
      char* end = nullptr;
      const double value = std::strtod(cursor, &end);
      const bool last = c + 1 == columns;
      if (end == cursor || (*end != (last ? '\0' : ','))) {
        throw Error(ErrorCode::InvalidArgument,
                    path.string() + ": bad field on line " + std::to_string(line_no));
      }
      if (last) {
        labels.push_back(static_cast<int>(value));
      } else {
        values.push_back(value);
      }
      cursor = end + (last ? 0 : 1);
    }
  }
  LabeledDataset data;
  data.samples = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                Eigen::RowMajor>>(
      values.data(), static_cast<Index>(labels.size()), d);
  data.labels = std::move(labels);
  return data;
}

std::string number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string dataset_csv(const LabeledDataset& data) {
  std::string out;
  for (Index j = 0; j < data.dim(); ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "label\n";
  for (Index i = 0; i < data.samples.rows(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out += number(data.samples(i, j)) + ",";
    out += std::to_string(data.labels[static_cast<std::size_t>(i)]) + "\n";
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename into " + path.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

}  // namespace kldproj::cli
