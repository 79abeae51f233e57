#include "kldproj/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kldproj/error.hpp"

namespace kldproj {

namespace {

// Relative Gram-Schmidt residual below which a candidate direction counts as
// dependent on the rows already accepted. Stricter than the rank tolerance of
// orthonormalize_rows so the accepted stack always orthonormalizes.
constexpr double kDependenceTol = 1e-8;

void require_rank_in_range(Index r, Index d) {
  if (r < 1 || r > d) {
    std::ostringstream os;
    os << "target dimension r=" << r << " outside [1, " << d << "]";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

void validate_pair(const GaussianParams& p1, const GaussianParams& p2) {
  validate(p1);
  validate(p2);
  if (p1.dim() != p2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "class dimensions differ");
  }
}

bool means_coincide(const GaussianParams& p1, const GaussianParams& p2) {
  const double scale = std::max({1.0, p1.mean.norm(), p2.mean.norm()});
  return (p2.mean - p1.mean).norm() <= 1e-12 * scale;
}

// Order indices by score descending; ties by |lambda - 1| descending, then
// by index.
std::vector<Index> rank_by_score(const std::vector<double>& scores, const Vector& eigenvalues) {
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    if (scores[ua] != scores[ub]) return scores[ua] > scores[ub];
    const double da = std::abs(eigenvalues(a) - 1.0);
    const double db = std::abs(eigenvalues(b) - 1.0);
    if (da != db) return da > db;
    return a < b;
  });
  return order;
}

struct Stacked {
  Matrix rows;
  std::vector<std::size_t> taken;  // positions in the candidate list
};

// Accept candidates in order, skipping any that are numerically dependent
// on those already accepted, until `r` rows are collected.
Stacked stack_independent(const std::vector<Vector>& candidates, Index r, Index d) {
  Stacked out;
  out.rows.resize(r, d);
  Matrix basis(d, r);
  Index count = 0;
  for (std::size_t i = 0; i < candidates.size() && count < r; ++i) {
    const Vector& c = candidates[i];
    const double norm = c.norm();
    if (!(norm > 0.0)) continue;
    Vector residual = c / norm;
    for (int pass = 0; pass < 2; ++pass) {
      residual -= basis.leftCols(count) * (basis.leftCols(count).transpose() * residual);
    }
    const double rnorm = residual.norm();
    if (rnorm <= kDependenceTol) continue;
    basis.col(count) = residual / rnorm;
    out.rows.row(count) = c.transpose();
    out.taken.push_back(i);
    ++count;
  }
  if (count < r) {
    std::ostringstream os;
    os << "only " << count << " independent directions available for r=" << r;
    throw Error(ErrorCode::RankDeficient, os.str());
  }
  return out;
}

ProjectionResult original_frame_result(Matrix rows, Method method, const GaussianParams& p1,
                                       const GaussianParams& p2) {
  ProjectionResult out;
  out.matrix = orthonormalize_rows(rows);
  out.frame = Frame::Original;
  out.method = method;
  out.original_matrix = out.matrix;
  out.center = Vector::Zero(p1.dim());
  out.achieved_kld = kld_projected(out.matrix, p1, p2);
  return out;
}

}  // namespace

std::string_view to_string(Frame frame) {
  switch (frame) {
    case Frame::Original: return "original";
    case Frame::WhitenedByClass1: return "whitened_class1";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Lda: return "lda";
    case Method::Alg1: return "alg1";
    case Method::Alg2: return "alg2";
    case Method::MulticlassLda: return "mclda";
    case Method::Lol: return "lol";
    case Method::Refined: return "refined";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::Lda, Method::Alg1, Method::Alg2, Method::MulticlassLda, Method::Lol,
                   Method::Refined}) {
    if (to_string(m) == text) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

std::string_view to_string(Recommendation rec) {
  switch (rec) {
    case Recommendation::Alg1: return "alg1";
    case Recommendation::Alg2: return "alg2";
    case Recommendation::CompareBoth: return "compare_both";
  }
  return "unknown";
}

Matrix ProjectionResult::apply(const Matrix& samples) const {
  if (samples.cols() != original_matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "sample dimension differs from projection");
  }
  return (samples.rowwise() - center.transpose()) * original_matrix.transpose();
}

ProjectionResult lda_direction(const GaussianParams& p1, const GaussianParams& p2) {
  validate_pair(p1, p2);
  if (means_coincide(p1, p2)) {
    throw Error(ErrorCode::EqualMeans, "LDA direction is undefined for equal class means");
  }
  const Matrix pooled = symmetrize(0.5 * (p1.covariance + p2.covariance));
  Vector a = pooled.llt().solve(p2.mean - p1.mean);
  a.normalize();
  ProjectionResult out = original_frame_result(a.transpose(), Method::Lda, p1, p2);
  out.component_scores = {out.achieved_kld};
  return out;
}

Matrix top_g_directions(const GenEigen& pencil, Index r, std::vector<double>* scores) {
  const Index d = pencil.eigenvalues.size();
  require_rank_in_range(r, d);
  std::vector<double> g(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) g[static_cast<std::size_t>(i)] = g_score(pencil.eigenvalues(i));
  const std::vector<Index> order = rank_by_score(g, pencil.eigenvalues);
  Matrix rows(r, d);
  if (scores) scores->clear();
  for (Index k = 0; k < r; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    rows.row(k) = pencil.eigenvectors.col(i).transpose();
    if (scores) scores->push_back(g[static_cast<std::size_t>(i)]);
  }
  return rows;
}

ProjectionResult algorithm1(const GaussianParams& p1, const GaussianParams& p2, Index r) {
  validate_pair(p1, p2);
  const Index d = p1.dim();
  require_rank_in_range(r, d);

  const GenEigen pencil = generalized_eig(p2.covariance, p1.covariance);
  std::vector<double> g(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) g[static_cast<std::size_t>(i)] = g_score(pencil.eigenvalues(i));
  const std::vector<Index> order = rank_by_score(g, pencil.eigenvalues);

  std::vector<Vector> candidates;
  std::vector<double> candidate_scores;
  std::vector<std::string> warnings;
  const bool equal_means = means_coincide(p1, p2);
  if (equal_means) {
    warnings.emplace_back("EqualMeans: mean direction undefined; first row replaced by the top "
                          "generalized eigenvector");
  } else {
    const Vector a1 = p2.covariance.llt().solve(p2.mean - p1.mean);
    candidates.push_back(a1);
    candidate_scores.push_back(kld_projected(a1.transpose(), p1, p2));
  }
  for (Index i : order) {
    candidates.push_back(pencil.eigenvectors.col(i));
    candidate_scores.push_back(g[static_cast<std::size_t>(i)]);
  }

  const Stacked stacked = stack_independent(candidates, r, d);
  if (stacked.taken.back() + 1 != stacked.taken.size()) {
    warnings.emplace_back("a generalized eigenvector aligned with the mean direction was "
                          "replaced by the next-ranked one");
  }

  ProjectionResult out = original_frame_result(stacked.rows, Method::Alg1, p1, p2);
  for (std::size_t pos : stacked.taken) out.component_scores.push_back(candidate_scores[pos]);
  out.warnings = std::move(warnings);
  return out;
}

WhitenedDecomposition whitened_decomposition(const GaussianParams& p1, const GaussianParams& p2) {
  validate_pair(p1, p2);
  const Index d = p1.dim();
  WhitenedDecomposition out;
  out.whitener = spd_inv_sqrt(p1.covariance);
  out.whitened_mean = out.whitener * (p2.mean - p1.mean);
  const Matrix whitened_cov = symmetrize(out.whitener * p2.covariance * out.whitener);
  out.eigen = sym_eig(whitened_cov);

  const double deviation = (whitened_cov - Matrix::Identity(d, d)).norm();
  out.isotropic = deviation < 1e-8 * static_cast<double>(d);
  const double mean_norm = out.whitened_mean.norm();
  if (out.isotropic && mean_norm >= 1e-12) {
    // Any orthonormal basis diagonalizes the identity; lead with the mean
    // direction so a single vector carries the whole mean term.
    Matrix seed(d, d + 1);
    seed.col(0) = out.whitened_mean / mean_norm;
    seed.rightCols(d) = Matrix::Identity(d, d);
    Eigen::HouseholderQR<Matrix> qr(seed);
    Matrix basis = qr.householderQ() * Matrix::Identity(d, d);
    if (basis.col(0).dot(seed.col(0)) < 0.0) basis.col(0) = -basis.col(0);
    out.eigen.eigenvectors = basis;
    for (Index i = 0; i < d; ++i) {
      out.eigen.eigenvalues(i) = basis.col(i).dot(whitened_cov * basis.col(i));
    }
  }

  out.components.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    const double lambda = out.eigen.eigenvalues(i);
    const double m = out.eigen.eigenvectors.col(i).dot(out.whitened_mean);
    out.components.push_back({i, lambda, m, component_kld(m, lambda)});
  }
  return out;
}

ProjectionResult algorithm2(const GaussianParams& p1, const GaussianParams& p2, Index r) {
  validate_pair(p1, p2);
  const Index d = p1.dim();
  require_rank_in_range(r, d);

  const WhitenedDecomposition dec = whitened_decomposition(p1, p2);
  if (dec.isotropic && dec.whitened_mean.norm() < 1e-12) {
    throw Error(ErrorCode::IdenticalDistributions,
                "classes are identical; no discriminative direction exists");
  }

  std::vector<double> scores;
  scores.reserve(dec.components.size());
  for (const auto& c : dec.components) scores.push_back(c.divergence);
  const std::vector<Index> order = rank_by_score(scores, dec.eigen.eigenvalues);

  ProjectionResult out;
  out.frame = Frame::WhitenedByClass1;
  out.method = Method::Alg2;
  out.matrix.resize(r, d);
  out.achieved_kld = 0.0;
  for (Index k = 0; k < r; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    out.matrix.row(k) = dec.eigen.eigenvectors.col(i).transpose();
    out.component_scores.push_back(scores[static_cast<std::size_t>(i)]);
    out.achieved_kld += scores[static_cast<std::size_t>(i)];
  }
  out.original_matrix = out.matrix * dec.whitener;
  out.center = p1.mean;
  return out;
}

RegimeReport select_regime(const GaussianParams& p1, const GaussianParams& p2, Index r) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "r must be at least 1");
  const KldBreakdown split = kld_split(p1, p2);
  RegimeReport out;
  out.d_mu = split.d_mu;
  out.d_sigma = split.d_sigma;
  out.r = r;
  if (r == 1) {
    out.threshold = std::numeric_limits<double>::infinity();
    out.recommendation = Recommendation::CompareBoth;
  } else {
    out.threshold = split.d_sigma / static_cast<double>(r - 1);
    out.recommendation = split.d_mu >= out.threshold ? Recommendation::Alg1 : Recommendation::Alg2;
  }
  return out;
}

ProjectionResult fit_auto(const GaussianParams& p1, const GaussianParams& p2, Index r,
                          AutoMode mode) {
  validate_pair(p1, p2);
  if (means_coincide(p1, p2)) return algorithm2(p1, p2, r);

  bool run_both = mode == AutoMode::Compare;
  if (!run_both) {
    const RegimeReport report = select_regime(p1, p2, r);
    switch (report.recommendation) {
      case Recommendation::Alg1: return algorithm1(p1, p2, r);
      case Recommendation::Alg2: return algorithm2(p1, p2, r);
      case Recommendation::CompareBoth: run_both = true; break;
    }
  }
  ProjectionResult first = algorithm1(p1, p2, r);
  ProjectionResult second = algorithm2(p1, p2, r);
  // Differences at rounding level count as ties.
  const double tie = 1e-10 * std::max(1.0, first.achieved_kld);
  return second.achieved_kld > first.achieved_kld + tie ? second : first;
}

Matrix between_class_scatter(const std::vector<Vector>& means) {
  if (means.empty()) throw Error(ErrorCode::InvalidArgument, "no class means supplied");
  const Index d = means.front().size();
  Vector centroid = Vector::Zero(d);
  for (const Vector& m : means) {
    if (m.size() != d) throw Error(ErrorCode::DimensionMismatch, "class means differ in length");
    centroid += m;
  }
  centroid /= static_cast<double>(means.size());
  Matrix scatter = Matrix::Zero(d, d);
  for (const Vector& m : means) scatter += (m - centroid) * (m - centroid).transpose();
  return symmetrize(scatter);
}

Matrix average_covariance(const std::vector<GaussianParams>& params) {
  if (params.empty()) throw Error(ErrorCode::InvalidArgument, "no classes supplied");
  Matrix sum = Matrix::Zero(params.front().dim(), params.front().dim());
  for (const auto& p : params) {
    validate(p);
    if (p.dim() != params.front().dim()) {
      throw Error(ErrorCode::DimensionMismatch, "class dimensions differ");
    }
    sum += p.covariance;
  }
  return symmetrize(sum / static_cast<double>(params.size()));
}

ProjectionResult multiclass_lda(const std::vector<Vector>& means, const Matrix& sigma, Index r) {
  const auto k = static_cast<Index>(means.size());
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "multiclass LDA needs at least two classes");
  require_spd(sigma, "common covariance");
  const Index d = sigma.rows();
  if (r == 0) r = k - 1;
  if (r < 1 || r > k - 1 || r > d) {
    std::ostringstream os;
    os << "multiclass LDA dimension r=" << r << " outside [1, " << std::min(k - 1, d) << "]";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }

  const Matrix scatter = between_class_scatter(means);
  if (scatter.rows() != d) throw Error(ErrorCode::DimensionMismatch, "means and covariance differ");
  const GenEigen pencil = generalized_eig_semidefinite(scatter, sigma);
  const double top = pencil.eigenvalues(0);
  if (!(top > 0.0)) {
    throw Error(ErrorCode::RankDeficientMeans, "all class means coincide");
  }
  const Index nonzero = (pencil.eigenvalues.array() > 1e-10 * top).count();

  std::vector<std::string> warnings;
  if (nonzero < k - 1) {
    std::ostringstream os;
    os << "RankDeficientMeans: between-class scatter has rank " << nonzero << " < K-1 = " << k - 1
       << "; returning the achievable subspace";
    warnings.push_back(os.str());
  }
  const Index used = std::min(r, nonzero);

  std::vector<GaussianParams> classes;
  classes.reserve(means.size());
  for (const Vector& m : means) classes.push_back({m, sigma});

  ProjectionResult out;
  out.matrix = orthonormalize_rows(pencil.eigenvectors.leftCols(used).transpose());
  out.frame = Frame::Original;
  out.method = Method::MulticlassLda;
  out.original_matrix = out.matrix;
  out.center = Vector::Zero(d);
  out.warnings = std::move(warnings);
  for (Index i = 0; i < used; ++i) out.component_scores.push_back(pencil.eigenvalues(i));
  // Summed over unordered pairs; with a common covariance each pair is
  // symmetric, and for K = 2 this is the two-class divergence.
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      out.achieved_kld += kld_projected(out.matrix, classes[i], classes[j]);
    }
  }
  return out;
}

ProjectionResult multiclass_lda(const std::vector<GaussianParams>& params, Index r) {
  const Matrix sigma = average_covariance(params);
  std::vector<Vector> means;
  means.reserve(params.size());
  for (const auto& p : params) means.push_back(p.mean);
  return multiclass_lda(means, sigma, r);
}

ProjectionResult lol_projection(const GaussianParams& p1, const GaussianParams& p2, Index r,
                                const Matrix& pooled_cov) {
  validate_pair(p1, p2);
  const Index d = p1.dim();
  require_rank_in_range(r, d);
  require_spd(pooled_cov, "pooled covariance");
  if (pooled_cov.rows() != d) throw Error(ErrorCode::DimensionMismatch, "pooled covariance size");

  const SymEigen pcs = sym_eig(pooled_cov);
  std::vector<Vector> candidates;
  std::vector<std::string> warnings;
  if (means_coincide(p1, p2)) {
    warnings.emplace_back("EqualMeans: mean difference undefined; using principal components only");
  } else {
    candidates.push_back(p2.mean - p1.mean);
  }
  for (Index i = 0; i < d; ++i) candidates.push_back(pcs.eigenvectors.col(i));

  const Stacked stacked = stack_independent(candidates, r, d);
  ProjectionResult out = original_frame_result(stacked.rows, Method::Lol, p1, p2);
  out.warnings = std::move(warnings);
  return out;
}

OrderCheck equal_mean_order_check(const GaussianParams& p1, const GaussianParams& p2, Index r) {
  validate_pair(p1, p2);
  require_rank_in_range(r, p1.dim());
  if ((p2.mean - p1.mean).norm() > 1e-10) {
    throw Error(ErrorCode::UnequalMeans, "order check requires equal class means");
  }
  const GenEigen forward = generalized_eig(p2.covariance, p1.covariance);
  const GenEigen reverse = generalized_eig(p1.covariance, p2.covariance);

  OrderCheck out;
  out.subspace_12 = orthonormalize_rows(top_g_directions(forward, r));
  out.subspace_21 = orthonormalize_rows(top_g_directions(reverse, r));
  out.max_principal_angle = principal_angles(out.subspace_12, out.subspace_21).maxCoeff();
  const auto& ev = forward.eigenvalues.array();
  out.one_sided_spectrum = (ev >= 1.0 - 1e-10).all() || (ev <= 1.0 + 1e-10).all();
  return out;
}

}  // namespace kldproj
