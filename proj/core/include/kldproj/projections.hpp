#pragma once

// Closed-form linear projections that retain the Kullback-Leibler divergence
// between Gaussian classes.
//
// Two-class constructions take (p1, p2) and target D(q1 || q2), where q_k is
// the push-forward of p_k. The mean-dominated construction (algorithm1)
// spends its first direction on Sigma2^{-1}(mu2 - mu1), which alone keeps the
// whole mean term, and fills the remaining rows with generalized eigenvectors
// of (Sigma2, Sigma1) ordered by g_score. The covariance-dominated
// construction (algorithm2) whitens class 1, diagonalizes the whitened class 2
// covariance, and keeps the eigen-directions with the largest one-dimensional
// divergences; because those directions are independent under both classes
// the divergences add up exactly.

#include <string>
#include <string_view>
#include <vector>

#include "kldproj/gaussian.hpp"

namespace kldproj {

enum class Frame {
  Original,
  /// Rows act on y = Sigma1^{-1/2} (x - mu1).
  WhitenedByClass1,
};

enum class Method { Lda, Alg1, Alg2, MulticlassLda, Lol, Refined };

std::string_view to_string(Frame frame);
std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct ProjectionResult {
  /// r x d, rows are projection directions in `frame`.
  Matrix matrix;
  Frame frame = Frame::Original;
  Method method = Method::Alg1;
  /// Divergence of the projected pair, in nats.
  double achieved_kld = 0.0;
  /// Per-row score: a one-dimensional divergence or g_score (see each
  /// constructor).
  std::vector<double> component_scores;
  /// Rows acting on raw x (equal to `matrix` for Frame::Original). For the
  /// whitened frame these are u_i^T Sigma1^{-1/2}, i.e. generalized
  /// eigenvectors of (Sigma2, Sigma1).
  Matrix original_matrix;
  /// Point subtracted from x before applying `original_matrix`; zero except
  /// for the whitened frame, where it is mu1.
  Vector center;
  std::vector<std::string> warnings;

  Index rank() const { return matrix.rows(); }
  /// Applies the projection to the rows of `samples`.
  Matrix apply(const Matrix& samples) const;
};

/// Two-class LDA direction Sigma_pooled^{-1}(mu2 - mu1) with
/// Sigma_pooled = (Sigma1 + Sigma2)/2, unit-normalized. Throws EqualMeans.
ProjectionResult lda_direction(const GaussianParams& p1, const GaussianParams& p2);

/// Mean-dominated construction. Rows are orthonormalized in the original
/// frame. component_scores holds the one-dimensional divergence along the
/// first direction followed by the g_scores of the eigen-directions.
ProjectionResult algorithm1(const GaussianParams& p1, const GaussianParams& p2, Index r);

/// One term of the additive decomposition used by algorithm2.
struct WhitenedComponent {
  Index index;                  ///< position in the descending eigen order
  double eigenvalue;            ///< lambda_i of Sigma1^{-1/2} Sigma2 Sigma1^{-1/2}
  double mean_coordinate;       ///< u_i^T Sigma1^{-1/2} (mu2 - mu1)
  double divergence;            ///< component_kld(mean_coordinate, eigenvalue)
};

struct WhitenedDecomposition {
  Matrix whitener;              ///< Sigma1^{-1/2}
  Vector whitened_mean;         ///< Sigma1^{-1/2} (mu2 - mu1)
  SymEigen eigen;               ///< of the whitened class-2 covariance
  std::vector<WhitenedComponent> components;  ///< in eigen order
  bool isotropic = false;       ///< whitened class-2 covariance is the identity
};

/// All d one-dimensional terms whose sum is D(p1 || p2). When the whitened
/// class-2 covariance equals the identity (||.-I||_F < 1e-8 d) the basis is
/// rotated so that its first vector is the whitened mean direction.
WhitenedDecomposition whitened_decomposition(const GaussianParams& p1, const GaussianParams& p2);

/// Covariance-dominated construction. `matrix` is whitened-frame and
/// row-orthonormal; `original_matrix` holds the equivalent rows for raw x.
/// component_scores lists the selected component divergences.
ProjectionResult algorithm2(const GaussianParams& p1, const GaussianParams& p2, Index r);

enum class Recommendation { Alg1, Alg2, CompareBoth };
std::string_view to_string(Recommendation rec);

struct RegimeReport {
  double d_mu = 0.0;
  double d_sigma = 0.0;
  Index r = 1;
  /// d_sigma / (r - 1), +infinity at r = 1.
  double threshold = 0.0;
  Recommendation recommendation = Recommendation::CompareBoth;
};

/// Rule of thumb: the mean-dominated construction when d_mu >= d_sigma/(r-1).
/// At r = 1 the rule is undefined and the report asks for both.
RegimeReport select_regime(const GaussianParams& p1, const GaussianParams& p2, Index r);

enum class AutoMode { Rule, Compare };

/// Rule mode runs the recommended construction (both when the report says
/// CompareBoth); compare mode runs both. When both run the larger
/// achieved_kld wins; differences within 1e-10 relative are ties and go to
/// algorithm1.
ProjectionResult fit_auto(const GaussianParams& p1, const GaussianParams& p2, Index r,
                          AutoMode mode = AutoMode::Rule);

/// Between-class scatter sum_k (mu_k - mean)(mu_k - mean)^T.
Matrix between_class_scatter(const std::vector<Vector>& means);

/// Multiclass LDA: generalized eigenvectors of (S_mu, Sigma) with nonzero
/// eigenvalues, orthonormalized. r defaults to K-1 (pass 0). When the class
/// means are affinely dependent the smaller achievable subspace is returned
/// with a warning; throws RankDeficientMeans if all means coincide.
/// achieved_kld is the sum of projected divergences over unordered pairs.
ProjectionResult multiclass_lda(const std::vector<Vector>& means, const Matrix& sigma,
                                Index r = 0);

/// Same, pooling the class covariances by averaging.
ProjectionResult multiclass_lda(const std::vector<GaussianParams>& params, Index r = 0);

/// Average of the class covariances.
Matrix average_covariance(const std::vector<GaussianParams>& params);

/// Linear Optimal Low-rank baseline: mean difference followed by the top
/// principal directions of `pooled_cov`, orthonormalized.
ProjectionResult lol_projection(const GaussianParams& p1, const GaussianParams& p2, Index r,
                                const Matrix& pooled_cov);

struct OrderCheck {
  Matrix subspace_12;           ///< maximizes D(q1 || q2), orthonormal rows
  Matrix subspace_21;           ///< maximizes D(q2 || q1), orthonormal rows
  double max_principal_angle = 0.0;
  /// All generalized eigenvalues of (Sigma2, Sigma1) lie on one side of 1
  /// (within 1e-10); the signal-plus-noise case.
  bool one_sided_spectrum = false;
};

/// Equal-mean optimal subspaces for both divergence orders. Throws
/// UnequalMeans if ||mu2 - mu1|| > 1e-10.
OrderCheck equal_mean_order_check(const GaussianParams& p1, const GaussianParams& p2, Index r);

/// Top-r generalized eigenvectors of (b, c) ranked by g_score (ties: larger
/// |lambda - 1|, then lower index), as rows. Also used for the equal-mean
/// optimum.
Matrix top_g_directions(const GenEigen& pencil, Index r, std::vector<double>* scores = nullptr);

}  // namespace kldproj
