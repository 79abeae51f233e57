#pragma once

// Dense symmetric linear-algebra kernels shared by the divergence and
// projection code. Every routine is a pure function of its arguments.

#include <Eigen/Dense>

#include <string_view>

namespace kldproj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Column i of `eigenvectors` pairs with `eigenvalues(i)`; columns are
/// orthonormal and sign-normalized so that the entry of largest magnitude
/// is positive.
struct SymEigen {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Solution of the symmetric-definite pencil B v = lambda C v, eigenvalues
/// descending, eigenvector columns scaled to unit Euclidean norm.
struct GenEigen {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Positive-definiteness floor: an SPD candidate must have every eigenvalue
/// above 1e-10 * max(1, largest eigenvalue).
double spd_floor(double largest_eigenvalue);

/// Throws NonFiniteInput if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

/// Throws NotPositiveDefinite (naming `what` and the offending eigenvalue)
/// unless `m` is square, symmetric within 1e-8 * ||m||_F, and passes the
/// spd_floor test.
void require_spd(const Matrix& m, std::string_view what);

bool is_spd(const Matrix& m);

/// (M + M^T) / 2
Matrix symmetrize(const Matrix& m);

SymEigen sym_eig(const Matrix& m);

/// Symmetric S with S M S = I.
Matrix spd_inv_sqrt(const Matrix& m);

/// Symmetric S with S S = M.
Matrix spd_sqrt(const Matrix& m);

/// log |M| via Cholesky. Throws NotPositiveDefinite if the factorization
/// fails.
double log_det_spd(const Matrix& m);

/// Solves B v = lambda C v by whitening with C^{-1/2}. Both inputs must be
/// SPD.
GenEigen generalized_eig(const Matrix& b, const Matrix& c);

/// As generalized_eig, but B only needs to be symmetric positive
/// semidefinite (used for between-class scatter, which is rank K-1).
GenEigen generalized_eig_semidefinite(const Matrix& b, const Matrix& c);

/// Numerical rank of `a` at tolerance rel_tol * sigma_max.
Index numerical_rank(const Matrix& a, double rel_tol = 1e-10);

/// Orthonormal rows spanning the row space of `a` (Gram-Schmidt order and
/// orientation: row i of the result has positive inner product with row i
/// of `a` after removing rows 0..i-1). Throws RankDeficient when the
/// numerical rank is below the row count.
Matrix orthonormalize_rows(const Matrix& a);

/// Principal angles (radians, ascending) between the row spaces of two
/// row-orthonormal matrices with the same column count. Small angles are
/// recovered from sines so that nearly identical subspaces report angles
/// at round-off level rather than sqrt(round-off).
Vector principal_angles(const Matrix& a1, const Matrix& a2);

/// Largest principal angle between the row spaces of two full-row-rank
/// matrices (orthonormalized internally).
double subspace_distance(const Matrix& a1, const Matrix& a2);

}  // namespace kldproj
