#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kldproj/projections.hpp"
#include "kldproj/refine.hpp"

namespace kldproj {

struct SweepRow {
  std::string method;  ///< "alg1", "alg2", "lol", "lda", or "<base>+ascent"
  Index r = 0;
  double kld = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;  ///< sorted by (method, r)
  double full_kld = 0.0;
  std::map<std::string, std::string> metadata;
};

struct SweepOptions {
  std::vector<Method> methods{Method::Alg1, Method::Alg2};
  std::vector<Index> r_values;
  /// Adds "<method>+ascent" rows started from each closed-form matrix.
  bool refine = false;
  AscentOptions ascent;
  /// Pooled covariance for the LoL rows; (Sigma1 + Sigma2)/2 when empty.
  std::optional<Matrix> pooled_cov;
};

/// Recovered divergence for every (method, r). Rows are computed
/// concurrently and assembled in (method, r) order. LDA contributes only its
/// r = 1 row.
SweepTable sweep_r(const GaussianParams& p1, const GaussianParams& p2, const SweepOptions& opts);

/// Violations of the sweep invariants (non-decreasing in r per method,
/// bounded by full_kld + 1e-8, equal to full_kld at r = d within rel. 1e-8);
/// empty when the table is consistent.
std::vector<std::string> sweep_violations(const SweepTable& table, Index d,
                                          bool require_monotone = true);

/// K x K matrix of D(q_i || q_j) / D(p_i || p_j), 1 on the diagonal and
/// wherever both divergences vanish.
Matrix pairwise_preservation(const std::vector<GaussianParams>& params, const Matrix& a);

/// Quadratic discriminant rule on projected samples.
class PluginClassifier {
 public:
  /// Projects `train` with `projection`, fits one Gaussian per class and
  /// empirical priors. Throws InsufficientSamples unless each class has more
  /// than r + 1 samples.
  static PluginClassifier train(const LabeledDataset& train, const ProjectionResult& projection,
                                double ridge = 0.0);

  /// Classifier on raw features (identity projection).
  static PluginClassifier train_full(const LabeledDataset& train, double ridge = 0.0);

  int predict_projected(const Eigen::Ref<const Vector>& y) const;
  std::vector<int> predict(const Matrix& samples) const;
  double accuracy(const LabeledDataset& test) const;

  const std::vector<int>& class_ids() const { return class_ids_; }
  const std::vector<GaussianParams>& class_params() const { return params_; }

 private:
  Matrix projection_;
  Vector center_;
  std::vector<int> class_ids_;
  std::vector<GaussianParams> params_;
  std::vector<Eigen::LLT<Matrix>> factors_;
  std::vector<double> log_norm_;  ///< log prior - 1/2 log|Sigma_k|
};

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  Index nx = 200;
  Index ny = 200;
};

struct DensityGrid {
  Vector x_axis;
  Vector y_axis;
  Matrix values_class1;  ///< (ny x nx): row j is y_axis(j)
  Matrix values_class2;
  double contour_level_fraction = 1e-3;
  double peak_class1 = 0.0;  ///< analytic peak density
  double peak_class2 = 0.0;

  double contour_level_class1() const { return contour_level_fraction * peak_class1; }
  double contour_level_class2() const { return contour_level_fraction * peak_class2; }
};

/// Bounding box covering mean +/- `width` standard deviations of each
/// projected class, per axis.
GridSpec default_grid(const ProjectionResult& projection, const GaussianParams& p1,
                      const GaussianParams& p2, double width = 4.0, Index resolution = 200);

/// Analytic densities of both projected classes on the grid. The projection
/// must have two rows.
DensityGrid density_grid(const ProjectionResult& projection, const GaussianParams& p1,
                         const GaussianParams& p2, const GridSpec& grid);

/// Density of a 2-D Gaussian on the grid, (ny x nx).
Matrix gaussian_density_on_grid(const GaussianParams& projected, const Vector& x_axis,
                                const Vector& y_axis);

}  // namespace kldproj
