#pragma once

// Seeded generators for experiment inputs. Every function here is a pure
// function of its arguments, seed included.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "kldproj/gaussian.hpp"

namespace kldproj {

/// mt19937_64 with platform-independent uniform and normal transforms.
/// Independent streams are keyed off one seed with SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// SplitMix64 mix of (seed, stream): seeds for independent sub-streams.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  Vector normal_vector(Index n);
  /// Filled row by row.
  Matrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SpdSpec {
  Index dim = 1;
  double eig_min = 1.0;
  double eig_max = 1.0;
  std::uint64_t seed = 0;
};

/// Q diag(lambda) Q^T with Q Haar-distributed and lambda log-uniform on
/// [eig_min, eig_max]. Returns exactly c I when eig_min == eig_max == c.
Matrix random_spd(const SpdSpec& spec);

struct ChannelSpec {
  Index d = 1;        ///< ambient dimension
  Index t = 1;        ///< signal dimension, t <= d
  double noise_var = 1.0;
  std::uint64_t seed = 0;
};

struct ChannelEmbedding {
  GaussianParams x1;
  GaussianParams x2;
  Matrix h;           ///< d x t
  int attempts = 1;   ///< draws of H needed to reach full column rank
};

/// x = H s + z with z ~ N(0, noise_var I): returns (H mu_k, H Sigma_k H^T +
/// noise_var I). H is standard normal, redrawn (up to 5 draws) until it has
/// full column rank; throws ChannelRankFailure otherwise.
ChannelEmbedding embed_channel(const GaussianParams& s1, const GaussianParams& s2,
                               const ChannelSpec& spec);

/// Same construction with a caller-supplied H.
ChannelEmbedding embed_with_channel(const GaussianParams& s1, const GaussianParams& s2,
                                    const Matrix& h, double noise_var);

/// n x d draws of mu + L z, L the Cholesky factor.
Matrix sample(const GaussianParams& params, Index n, std::uint64_t seed);

/// n_per_class draws per class, labels 1..K in class order.
LabeledDataset sample_dataset(const std::vector<GaussianParams>& classes, Index n_per_class,
                              std::uint64_t seed);

/// Standard-normal vector times `scale`.
Vector random_mean(Index d, double scale, std::uint64_t seed);

struct ClassPairSpec {
  Index dim = 2;
  double eig_min = 0.1;
  double eig_max = 10.0;
  double mean_scale = 1.0;
  bool common_covariance = false;
  std::uint64_t seed = 0;
};

/// K classes with random means (standard normal times mean_scale) and random
/// SPD covariances (shared when common_covariance is set).
std::vector<GaussianParams> random_classes(const ClassPairSpec& spec, Index k);

/// Moves mu2 to mu1 + factor (mu2 - mu1); d_mu scales by factor^2 while
/// d_sigma is unchanged.
void scale_mean_separation(GaussianParams& p1, GaussianParams& p2, double factor);

/// Factor for scale_mean_separation that makes d_mu / d_sigma equal
/// `target_ratio`. Throws EqualMeans if the means coincide.
double separation_factor_for_ratio(const GaussianParams& p1, const GaussianParams& p2,
                                   double target_ratio);

}  // namespace kldproj
