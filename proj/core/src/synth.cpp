#include "kldproj/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kldproj/error.hpp"

namespace kldproj {

namespace {

enum Stream : std::uint64_t {
  kRotation = 1,
  kSpectrum = 2,
  kChannel = 16,
  kMeanBase = 1000,
  kCovBase = 2000,
  kSampleBase = 3000,
};

}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector Rng::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Matrix Rng::normal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal();
  }
  return m;
}

Matrix random_spd(const SpdSpec& spec) {
  if (spec.dim < 1 || !(spec.eig_min > 0.0) || !(spec.eig_max >= spec.eig_min)) {
    throw Error(ErrorCode::InvalidArgument, "SPD spec needs dim >= 1 and 0 < eig_min <= eig_max");
  }
  const Index d = spec.dim;
  if (spec.eig_min == spec.eig_max) return spec.eig_min * Matrix::Identity(d, d);

  Rng rotation_rng(Rng::derive(spec.seed, kRotation));
  Eigen::HouseholderQR<Matrix> qr(rotation_rng.normal_matrix(d, d));
  Matrix q = qr.householderQ();
  for (Index j = 0; j < d; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }

  Rng spectrum_rng(Rng::derive(spec.seed, kSpectrum));
  const double lo = std::log(spec.eig_min);
  const double hi = std::log(spec.eig_max);
  Vector lambda(d);
  for (Index i = 0; i < d; ++i) lambda(i) = std::exp(lo + (hi - lo) * spectrum_rng.uniform());
  return symmetrize(q * lambda.asDiagonal() * q.transpose());
}

ChannelEmbedding embed_with_channel(const GaussianParams& s1, const GaussianParams& s2,
                                    const Matrix& h, double noise_var) {
  if (!(noise_var > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "channel noise variance must be positive");
  }
  if (h.cols() != s1.dim() || s1.dim() != s2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "channel matrix does not match signal dimension");
  }
  const Index d = h.rows();
  const Matrix noise = noise_var * Matrix::Identity(d, d);
  ChannelEmbedding out;
  out.h = h;
  out.x1 = {h * s1.mean, symmetrize(h * s1.covariance * h.transpose() + noise)};
  out.x2 = {h * s2.mean, symmetrize(h * s2.covariance * h.transpose() + noise)};
  return out;
}

ChannelEmbedding embed_channel(const GaussianParams& s1, const GaussianParams& s2,
                               const ChannelSpec& spec) {
  if (spec.t < 1 || spec.t > spec.d) {
    throw Error(ErrorCode::InvalidArgument, "channel needs 1 <= t <= d");
  }
  if (s1.dim() != spec.t || s2.dim() != spec.t) {
    throw Error(ErrorCode::DimensionMismatch, "signal dimension differs from channel t");
  }
  constexpr int kMaxAttempts = 5;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(Rng::derive(spec.seed, kChannel + static_cast<std::uint64_t>(attempt)));
    const Matrix h = rng.normal_matrix(spec.d, spec.t);
    if (numerical_rank(h) < spec.t) continue;
    ChannelEmbedding out = embed_with_channel(s1, s2, h, spec.noise_var);
    out.attempts = attempt + 1;
    return out;
  }
  std::ostringstream os;
  os << "no full-column-rank channel after " << kMaxAttempts << " draws";
  throw Error(ErrorCode::ChannelRankFailure, os.str());
}

Matrix sample(const GaussianParams& params, Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be at least 1");
  validate(params);
  Eigen::LLT<Matrix> llt(params.covariance);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "sampling covariance is not positive definite");
  }
  const Matrix l = llt.matrixL();
  Rng rng(seed);
  const Matrix z = rng.normal_matrix(n, params.dim());
  return (z * l.transpose()).rowwise() + params.mean.transpose();
}

LabeledDataset sample_dataset(const std::vector<GaussianParams>& classes, Index n_per_class,
                              std::uint64_t seed) {
  if (classes.empty()) throw Error(ErrorCode::InvalidArgument, "no classes to sample");
  const Index d = classes.front().dim();
  const auto k = static_cast<Index>(classes.size());
  LabeledDataset out;
  out.samples.resize(k * n_per_class, d);
  out.labels.reserve(static_cast<std::size_t>(k * n_per_class));
  for (Index c = 0; c < k; ++c) {
    const auto& p = classes[static_cast<std::size_t>(c)];
    if (p.dim() != d) throw Error(ErrorCode::DimensionMismatch, "classes differ in dimension");
    out.samples.middleRows(c * n_per_class, n_per_class) =
        sample(p, n_per_class, Rng::derive(seed, kSampleBase + static_cast<std::uint64_t>(c)));
    out.labels.insert(out.labels.end(), static_cast<std::size_t>(n_per_class),
                      static_cast<int>(c + 1));
  }
  return out;
}

Vector random_mean(Index d, double scale, std::uint64_t seed) {
  Rng rng(seed);
  return scale * rng.normal_vector(d);
}

std::vector<GaussianParams> random_classes(const ClassPairSpec& spec, Index k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "need at least one class");
  std::vector<GaussianParams> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) {
    const auto idx = static_cast<std::uint64_t>(c);
    GaussianParams p;
    p.mean = random_mean(spec.dim, spec.mean_scale, Rng::derive(spec.seed, kMeanBase + idx));
    const std::uint64_t cov_stream = spec.common_covariance ? kCovBase : kCovBase + idx;
    p.covariance = random_spd(
        {spec.dim, spec.eig_min, spec.eig_max, Rng::derive(spec.seed, cov_stream)});
    out.push_back(std::move(p));
  }
  return out;
}

void scale_mean_separation(GaussianParams& p1, GaussianParams& p2, double factor) {
  p2.mean = p1.mean + factor * (p2.mean - p1.mean);
}

double separation_factor_for_ratio(const GaussianParams& p1, const GaussianParams& p2,
                                   double target_ratio) {
  if (!(target_ratio > 0.0)) throw Error(ErrorCode::InvalidArgument, "target ratio must be positive");
  const KldBreakdown split = kld_split(p1, p2);
  if (!(split.d_mu > 0.0)) throw Error(ErrorCode::EqualMeans, "means coincide; cannot rescale");
  return std::sqrt(target_ratio * split.d_sigma / split.d_mu);
}

}  // namespace kldproj
