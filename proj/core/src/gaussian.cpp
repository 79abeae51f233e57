#include "kldproj/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "kldproj/error.hpp"

namespace kldproj {

namespace {

void require_same_dim(const GaussianParams& p1, const GaussianParams& p2) {
  if (p1.dim() != p2.dim()) {
    std::ostringstream os;
    os << "Gaussian dimensions differ: " << p1.dim() << " vs " << p2.dim();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

double clamp_divergence(double value, const char* what) {
  if (value >= 0.0) return value;
  if (value >= -1e-10) return 0.0;
  std::ostringstream os;
  os.precision(17);
  os << what << " evaluated to " << value;
  throw Error(ErrorCode::NegativeDivergence, os.str());
}

Eigen::LLT<Matrix> cholesky(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, std::string(what) + ": Cholesky factorization failed");
  }
  return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Both halves of the divergence from the Cholesky factors. Inputs are
// assumed validated.
std::pair<double, double> split_terms(const GaussianParams& p1, const GaussianParams& p2) {
  const auto llt1 = cholesky(p1.covariance, "covariance of p1");
  const auto llt2 = cholesky(p2.covariance, "covariance of p2");
  const Vector delta = p2.mean - p1.mean;

  // tr(Sigma2^{-1} Sigma1) = ||L2^{-1} L1||_F^2
  const Matrix l1 = llt1.matrixL();
  const Matrix whitened = llt2.matrixL().solve(l1);
  const double trace = whitened.squaredNorm();
  const double maha = llt2.matrixL().solve(delta).squaredNorm();

  const double d = static_cast<double>(p1.dim());
  const double d_mu = 0.5 * maha;
  const double d_sigma = 0.5 * (log_det(llt2) - log_det(llt1) - d + trace);
  return {d_mu, d_sigma};
}

}  // namespace

void validate(const GaussianParams& p) {
  if (p.covariance.rows() != p.dim() || p.covariance.cols() != p.dim()) {
    std::ostringstream os;
    os << "covariance is " << p.covariance.rows() << "x" << p.covariance.cols()
       << " but mean has length " << p.dim();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!p.mean.allFinite()) throw Error(ErrorCode::NonFiniteInput, "mean contains NaN or Inf");
  require_spd(p.covariance, "covariance");
}

GaussianParams project(const Matrix& a, const GaussianParams& p) {
  if (a.cols() != p.dim()) {
    std::ostringstream os;
    os << "projection has " << a.cols() << " columns but the Gaussian has dimension " << p.dim();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  return {a * p.mean, symmetrize(a * p.covariance * a.transpose())};
}

double kld(const GaussianParams& p1, const GaussianParams& p2) {
  return kld_split(p1, p2).total;
}

double kld_projected(const Matrix& a, const GaussianParams& p1, const GaussianParams& p2) {
  require_same_dim(p1, p2);
  require_finite(a, "projection");
  if (a.cols() != p1.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "projection column count differs from dimension");
  }
  const Index rank = numerical_rank(a);
  if (rank < a.rows()) {
    std::ostringstream os;
    os << "projection has " << a.rows() << " rows but numerical rank " << rank;
    throw Error(ErrorCode::RankDeficient, os.str());
  }
  const GaussianParams q1 = project(a, p1);
  const GaussianParams q2 = project(a, p2);
  try {
    return kld(q1, q2);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  std::string("projected covariance is numerically singular: ") + e.what());
    }
    throw;
  }
}

KldBreakdown kld_split(const GaussianParams& p1, const GaussianParams& p2) {
  require_same_dim(p1, p2);
  validate(p1);
  validate(p2);
  const auto [d_mu, d_sigma_raw] = split_terms(p1, p2);
  KldBreakdown out;
  out.d_mu = d_mu;
  out.d_sigma = clamp_divergence(d_sigma_raw, "covariance term of the divergence");
  out.total = out.d_mu + out.d_sigma;
  return out;
}

double chernoff_exponent(const GaussianParams& p1, const GaussianParams& p2, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Chernoff exponent requires s in [0, 1]");
  }
  const Vector delta = p2.mean - p1.mean;
  const Matrix mixed = s * p1.covariance + (1.0 - s) * p2.covariance;
  const auto llt = cholesky(mixed, "Chernoff mixture covariance");
  const double ld1 = log_det(cholesky(p1.covariance, "covariance of p1"));
  const double ld2 = log_det(cholesky(p2.covariance, "covariance of p2"));
  const double quad = llt.matrixL().solve(delta).squaredNorm();
  return 0.5 * s * (1.0 - s) * quad + 0.5 * (log_det(llt) - s * ld1 - (1.0 - s) * ld2);
}

double chernoff_information(const GaussianParams& p1, const GaussianParams& p2) {
  require_same_dim(p1, p2);
  validate(p1);
  validate(p2);

  // The exponent is concave in s, so golden-section search brackets the
  // maximizer.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = chernoff_exponent(p1, p2, x1);
  double f2 = chernoff_exponent(p1, p2, x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = chernoff_exponent(p1, p2, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = chernoff_exponent(p1, p2, x1);
    }
  }
  const double best = chernoff_exponent(p1, p2, 0.5 * (lo + hi));
  return std::max({best, f1, f2, 0.0});
}

double g_score(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveInput, "g_score requires a positive finite argument");
  }
  return std::max(0.0, 0.5 * (std::log(lambda) - 1.0 + 1.0 / lambda));
}

double component_kld(double m, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveInput, "component_kld requires a positive finite variance");
  }
  return std::max(0.0, 0.5 * (std::log(lambda) - 1.0 + (1.0 + m * m) / lambda));
}

std::vector<int> LabeledDataset::classes() const {
  std::set<int> distinct(labels.begin(), labels.end());
  return {distinct.begin(), distinct.end()};
}

Matrix LabeledDataset::class_samples(int class_id) const {
  if (static_cast<Index>(labels.size()) != samples.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from sample count");
  }
  const auto count = std::count(labels.begin(), labels.end(), class_id);
  Matrix out(count, samples.cols());
  Index row = 0;
  for (Index i = 0; i < samples.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == class_id) out.row(row++) = samples.row(i);
  }
  return out;
}

GaussianParams estimate_params(const LabeledDataset& data, int class_id, double ridge) {
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge must be nonnegative");
  const Matrix x = data.class_samples(class_id);
  const Index n = x.rows();
  const Index d = x.cols();
  if (n < 2) {
    std::ostringstream os;
    os << "class " << class_id << " has " << n << " samples; covariance needs at least 2";
    throw Error(ErrorCode::InsufficientSamples, os.str());
  }
  require_finite(x, "samples");
  GaussianParams p;
  p.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - p.mean.transpose();
  p.covariance = symmetrize(centered.transpose() * centered / static_cast<double>(n - 1));
  if (ridge > 0.0) {
    const double scale = ridge * p.covariance.trace() / static_cast<double>(d);
    p.covariance.diagonal().array() += scale;
  }
  try {
    validate(p);
  } catch (const Error& e) {
    std::ostringstream os;
    os << "estimated covariance of class " << class_id << " is degenerate: " << e.what();
    throw Error(e.code(), os.str());
  }
  return p;
}

Matrix pooled_within_class_covariance(const LabeledDataset& data) {
  const std::vector<int> ids = data.classes();
  const Index d = data.dim();
  Matrix scatter = Matrix::Zero(d, d);
  Index total = 0;
  for (int id : ids) {
    const Matrix x = data.class_samples(id);
    const Vector mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - mean.transpose();
    scatter += centered.transpose() * centered;
    total += x.rows();
  }
  const Index dof = total - static_cast<Index>(ids.size());
  if (dof < 1) throw Error(ErrorCode::InsufficientSamples, "not enough samples to pool a covariance");
  return symmetrize(scatter / static_cast<double>(dof));
}

}  // namespace kldproj
