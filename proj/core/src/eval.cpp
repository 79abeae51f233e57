#include "kldproj/eval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "kldproj/error.hpp"

namespace kldproj {

namespace {

GaussianParams project_centered(const ProjectionResult& projection, const GaussianParams& p) {
  GaussianParams shifted{p.mean - projection.center, p.covariance};
  return project(projection.original_matrix, shifted);
}

ProjectionResult run_method(Method method, const GaussianParams& p1, const GaussianParams& p2,
                            Index r, const Matrix& pooled) {
  switch (method) {
    case Method::Alg1: return algorithm1(p1, p2, r);
    case Method::Alg2: return algorithm2(p1, p2, r);
    case Method::Lol: return lol_projection(p1, p2, r, pooled);
    case Method::Lda: return lda_direction(p1, p2);
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "method '" + std::string(to_string(method)) + "' is not a two-class sweep method");
  }
}

}  // namespace

SweepTable sweep_r(const GaussianParams& p1, const GaussianParams& p2, const SweepOptions& opts) {
  const Index d = p1.dim();
  for (Index r : opts.r_values) {
    if (r < 1 || r > d) {
      std::ostringstream os;
      os << "sweep dimension r=" << r << " outside [1, " << d << "]";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  validate(opts.ascent);
  const Matrix pooled = opts.pooled_cov ? *opts.pooled_cov
                                        : symmetrize(0.5 * (p1.covariance + p2.covariance));

  SweepTable table;
  table.full_kld = kld(p1, p2);

  std::vector<std::pair<Method, Index>> tasks;
  for (Method method : opts.methods) {
    for (Index r : opts.r_values) {
      if (method == Method::Lda && r != 1) continue;
      tasks.emplace_back(method, r);
    }
  }
  const auto evaluate = [&](Method method, Index r) {
    const ProjectionResult base = run_method(method, p1, p2, r, pooled);
    const std::string tag(to_string(method));
    std::vector<SweepRow> rows{{tag, r, base.achieved_kld}};
    if (opts.refine) {
      const AscentTrace trace = gradient_ascent(base.original_matrix, p1, p2, opts.ascent);
      rows.push_back({tag + "+ascent", r, trace.final_objective});
    }
    return rows;
  };
  const std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < tasks.size(); begin += workers) {
    std::vector<std::future<std::vector<SweepRow>>> batch;
    for (std::size_t i = begin; i < std::min(tasks.size(), begin + workers); ++i) {
      batch.push_back(std::async(std::launch::async, evaluate, tasks[i].first, tasks[i].second));
    }
    for (auto& job : batch) {
      for (SweepRow& row : job.get()) table.rows.push_back(std::move(row));
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.method != b.method ? a.method < b.method : a.r < b.r;
  });

  std::ostringstream full;
  full.precision(17);
  full << table.full_kld;
  table.metadata["full_kld"] = full.str();
  table.metadata["dimension"] = std::to_string(d);
  table.metadata["refine"] = opts.refine ? "true" : "false";
  return table;
}

std::vector<std::string> sweep_violations(const SweepTable& table, Index d, bool require_monotone) {
  std::vector<std::string> out;
  const double slack = 1e-10 * std::max(1.0, table.full_kld);
  std::map<std::string, std::vector<const SweepRow*>> by_method;
  for (const SweepRow& row : table.rows) by_method[row.method].push_back(&row);
  for (auto& [method, rows] : by_method) {
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->r < b->r; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SweepRow& row = *rows[i];
      std::ostringstream os;
      os.precision(17);
      if (row.kld > table.full_kld + 1e-8) {
        os << method << " r=" << row.r << " exceeds full divergence: " << row.kld << " > "
           << table.full_kld;
      } else if (require_monotone && i > 0 && row.kld < rows[i - 1]->kld - slack) {
        os << method << " decreases from r=" << rows[i - 1]->r << " (" << rows[i - 1]->kld
           << ") to r=" << row.r << " (" << row.kld << ")";
      } else if (row.r == d &&
                 std::abs(row.kld - table.full_kld) > 1e-8 * std::max(1.0, table.full_kld)) {
        os << method << " at r=d recovers " << row.kld << " of " << table.full_kld;
      }
      if (!os.str().empty()) out.push_back(os.str());
    }
  }
  return out;
}

Matrix pairwise_preservation(const std::vector<GaussianParams>& params, const Matrix& a) {
  const auto k = static_cast<Index>(params.size());
  Matrix ratios = Matrix::Ones(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto& pi = params[static_cast<std::size_t>(i)];
      const auto& pj = params[static_cast<std::size_t>(j)];
      const double full = kld(pi, pj);
      const double projected = kld_projected(a, pi, pj);
      ratios(i, j) = full > 0.0 ? projected / full : 1.0;
    }
  }
  return ratios;
}

PluginClassifier PluginClassifier::train(const LabeledDataset& train,
                                         const ProjectionResult& projection, double ridge) {
  PluginClassifier out;
  out.projection_ = projection.original_matrix;
  out.center_ = projection.center;
  const Index r = out.projection_.rows();

  LabeledDataset projected{projection.apply(train.samples), train.labels};
  out.class_ids_ = projected.classes();
  const auto n = static_cast<double>(projected.size());
  for (int id : out.class_ids_) {
    const auto count = std::count(projected.labels.begin(), projected.labels.end(), id);
    if (count <= r + 1) {
      std::ostringstream os;
      os << "class " << id << " has " << count << " training samples; need more than " << r + 1;
      throw Error(ErrorCode::InsufficientSamples, os.str());
    }
    GaussianParams p = estimate_params(projected, id, ridge);
    Eigen::LLT<Matrix> llt(p.covariance);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    out.log_norm_.push_back(std::log(static_cast<double>(count) / n) - 0.5 * log_det);
    out.factors_.push_back(std::move(llt));
    out.params_.push_back(std::move(p));
  }
  return out;
}

PluginClassifier PluginClassifier::train_full(const LabeledDataset& train, double ridge) {
  ProjectionResult identity;
  identity.matrix = Matrix::Identity(train.dim(), train.dim());
  identity.original_matrix = identity.matrix;
  identity.center = Vector::Zero(train.dim());
  return PluginClassifier::train(train, identity, ridge);
}

int PluginClassifier::predict_projected(const Eigen::Ref<const Vector>& y) const {
  int best_id = class_ids_.front();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const Vector diff = y - params_[k].mean;
    const double score =
        log_norm_[k] - 0.5 * factors_[k].matrixL().solve(diff).squaredNorm();
    if (score > best) {
      best = score;
      best_id = class_ids_[k];
    }
  }
  return best_id;
}

std::vector<int> PluginClassifier::predict(const Matrix& samples) const {
  const Matrix y = (samples.rowwise() - center_.transpose()) * projection_.transpose();
  std::vector<int> out(static_cast<std::size_t>(y.rows()));
  for (Index i = 0; i < y.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = predict_projected(y.row(i).transpose());
  }
  return out;
}

double PluginClassifier::accuracy(const LabeledDataset& test) const {
  if (test.size() == 0) throw Error(ErrorCode::InsufficientSamples, "empty test set");
  const std::vector<int> predicted = predict(test.samples);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == test.labels[i];
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

Matrix gaussian_density_on_grid(const GaussianParams& projected, const Vector& x_axis,
                                const Vector& y_axis) {
  if (projected.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "density grid needs r = 2");
  validate(projected);
  const Matrix precision = projected.covariance.inverse();
  const double peak =
      1.0 / (2.0 * std::numbers::pi * std::sqrt(projected.covariance.determinant()));
  Matrix values(y_axis.size(), x_axis.size());
  for (Index j = 0; j < y_axis.size(); ++j) {
    for (Index i = 0; i < x_axis.size(); ++i) {
      const double dx = x_axis(i) - projected.mean(0);
      const double dy = y_axis(j) - projected.mean(1);
      const double q = precision(0, 0) * dx * dx + 2.0 * precision(0, 1) * dx * dy +
                       precision(1, 1) * dy * dy;
      values(j, i) = peak * std::exp(-0.5 * q);
    }
  }
  return values;
}

GridSpec default_grid(const ProjectionResult& projection, const GaussianParams& p1,
                      const GaussianParams& p2, double width, Index resolution) {
  if (projection.rank() != 2) throw Error(ErrorCode::DimensionMismatch, "density grid needs r = 2");
  GridSpec grid;
  grid.nx = resolution;
  grid.ny = resolution;
  bool first = true;
  for (const GaussianParams* p : {&p1, &p2}) {
    const GaussianParams q = project_centered(projection, *p);
    const double sx = width * std::sqrt(q.covariance(0, 0));
    const double sy = width * std::sqrt(q.covariance(1, 1));
    if (first) {
      grid.x_min = q.mean(0) - sx;
      grid.x_max = q.mean(0) + sx;
      grid.y_min = q.mean(1) - sy;
      grid.y_max = q.mean(1) + sy;
      first = false;
    } else {
      grid.x_min = std::min(grid.x_min, q.mean(0) - sx);
      grid.x_max = std::max(grid.x_max, q.mean(0) + sx);
      grid.y_min = std::min(grid.y_min, q.mean(1) - sy);
      grid.y_max = std::max(grid.y_max, q.mean(1) + sy);
    }
  }
  return grid;
}

DensityGrid density_grid(const ProjectionResult& projection, const GaussianParams& p1,
                         const GaussianParams& p2, const GridSpec& grid) {
  if (projection.rank() != 2) throw Error(ErrorCode::DimensionMismatch, "density grid needs r = 2");
  if (grid.nx < 2 || grid.ny < 2 || !(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 2x2 points over a nonempty box");
  }
  DensityGrid out;
  out.x_axis = Vector::LinSpaced(grid.nx, grid.x_min, grid.x_max);
  out.y_axis = Vector::LinSpaced(grid.ny, grid.y_min, grid.y_max);
  const GaussianParams q1 = project_centered(projection, p1);
  const GaussianParams q2 = project_centered(projection, p2);
  out.values_class1 = gaussian_density_on_grid(q1, out.x_axis, out.y_axis);
  out.values_class2 = gaussian_density_on_grid(q2, out.x_axis, out.y_axis);
  out.peak_class1 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(q1.covariance.determinant()));
  out.peak_class2 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(q2.covariance.determinant()));
  return out;
}

}  // namespace kldproj
