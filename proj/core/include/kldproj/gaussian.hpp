#pragma once

#include <utility>
#include <vector>

#include "kldproj/linalg.hpp"

namespace kldproj {

/// Mean and SPD covariance of one Gaussian class.
struct GaussianParams {
  Vector mean;
  Matrix covariance;

  Index dim() const { return mean.size(); }
};

/// Throws DimensionMismatch, NonFiniteInput or NotPositiveDefinite.
void validate(const GaussianParams& p);

/// Push-forward of N(mean, covariance) through y = A x.
GaussianParams project(const Matrix& a, const GaussianParams& p);

/// D(p1 || p2) in nats. Determinants enter through Cholesky log-determinants.
/// Results in [-1e-10, 0) are clamped to zero; anything more negative
/// throws NegativeDivergence.
double kld(const GaussianParams& p1, const GaussianParams& p2);

/// D(q1 || q2) for q_k = N(A mu_k, A Sigma_k A^T). Requires full row rank.
double kld_projected(const Matrix& a, const GaussianParams& p1, const GaussianParams& p2);

/// Mean-driven and covariance-driven parts of D(p1 || p2):
///   d_mu    = 1/2 (mu2-mu1)^T Sigma2^{-1} (mu2-mu1)
///   d_sigma = 1/2 [ln|Sigma2|/|Sigma1| - d + tr(Sigma2^{-1} Sigma1)]
struct KldBreakdown {
  double total = 0.0;
  double d_mu = 0.0;
  double d_sigma = 0.0;
  /// Optional per-direction scores as (direction index, score).
  std::vector<std::pair<Index, double>> components;
};

KldBreakdown kld_split(const GaussianParams& p1, const GaussianParams& p2);

/// Chernoff information: the maximum over s in [0,1] of
///   s(1-s)/2 dmu^T S_s^{-1} dmu + 1/2 ln(|S_s| / (|Sigma1|^s |Sigma2|^(1-s)))
/// with S_s = s Sigma1 + (1-s) Sigma2, found by golden-section search.
double chernoff_information(const GaussianParams& p1, const GaussianParams& p2);

/// The Chernoff exponent at a fixed s; exposed for testing the search.
double chernoff_exponent(const GaussianParams& p1, const GaussianParams& p2, double s);

/// 1/2 (ln x - 1 + 1/x): the divergence carried by a direction whose
/// variance ratio is x when the means agree.
double g_score(double lambda);

/// D(N(0,1) || N(m, lambda)) = 1/2 (ln lambda - 1 + (1 + m^2) / lambda).
double component_kld(double m, double lambda);

/// n x d samples with integer class labels (1..K).
struct LabeledDataset {
  Matrix samples;
  std::vector<int> labels;

  Index size() const { return samples.rows(); }
  Index dim() const { return samples.cols(); }
  /// Sorted distinct labels.
  std::vector<int> classes() const;
  Matrix class_samples(int class_id) const;
};

/// Sample mean and unbiased covariance of one class. When ridge > 0 adds
/// ridge * (tr(S)/d) * I.
GaussianParams estimate_params(const LabeledDataset& data, int class_id, double ridge = 0.0);

/// Covariance of all samples after re-centering each class on its own
/// sample mean (divisor n - K).
Matrix pooled_within_class_covariance(const LabeledDataset& data);

}  // namespace kldproj
