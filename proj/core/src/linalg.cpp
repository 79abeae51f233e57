#include "kldproj/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "kldproj/error.hpp"

namespace kldproj {

namespace {

// Flip each column so that its entry of largest magnitude is positive
// (lowest index wins ties).
void normalize_column_signs(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index arg = 0;
    v.col(j).cwiseAbs().maxCoeff(&arg);
    if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
  }
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

GenEigen whitened_pencil(const Matrix& b, const Matrix& c) {
  const Matrix s = spd_inv_sqrt(c);
  const SymEigen inner = sym_eig(symmetrize(s * b * s));
  GenEigen out;
  out.eigenvalues = inner.eigenvalues;
  out.eigenvectors = s * inner.eigenvectors;
  for (Index j = 0; j < out.eigenvectors.cols(); ++j) {
    out.eigenvectors.col(j).normalize();
  }
  normalize_column_signs(out.eigenvectors);
  return out;
}

}  // namespace

double spd_floor(double largest_eigenvalue) {
  return 1e-10 * std::max(1.0, largest_eigenvalue);
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, std::string(what) + ": contains NaN or Inf");
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

SymEigen sym_eig(const Matrix& m) {
  require_square(m, "sym_eig");
  require_finite(m, "sym_eig");
  const Index d = m.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonFiniteInput, "sym_eig: eigensolver did not converge");
  }

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });

  SymEigen out{Vector(d), Matrix(d, d)};
  for (Index k = 0; k < d; ++k) {
    out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  normalize_column_signs(out.eigenvectors);
  return out;
}

void require_spd(const Matrix& m, std::string_view what) {
  require_square(m, what);
  require_finite(m, what);
  const double norm = m.norm();
  if ((m - m.transpose()).norm() > 1e-8 * norm) {
    throw Error(ErrorCode::NotPositiveDefinite, std::string(what) + ": matrix is not symmetric");
  }
  if (m.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues()(0);
  const double largest = solver.eigenvalues()(m.rows() - 1);
  if (!(smallest > spd_floor(largest))) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": not positive definite (smallest eigenvalue " << smallest
       << ", largest " << largest << ")";
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
}

bool is_spd(const Matrix& m) {
  try {
    require_spd(m, "is_spd");
  } catch (const Error&) {
    return false;
  }
  return true;
}

Matrix spd_inv_sqrt(const Matrix& m) {
  require_spd(m, "spd_inv_sqrt");
  const SymEigen e = sym_eig(m);
  const Vector scale = e.eigenvalues.array().rsqrt();
  return symmetrize(e.eigenvectors * scale.asDiagonal() * e.eigenvectors.transpose());
}

Matrix spd_sqrt(const Matrix& m) {
  require_spd(m, "spd_sqrt");
  const SymEigen e = sym_eig(m);
  const Vector scale = e.eigenvalues.array().sqrt();
  return symmetrize(e.eigenvectors * scale.asDiagonal() * e.eigenvectors.transpose());
}

double log_det_spd(const Matrix& m) {
  require_square(m, "log_det_spd");
  require_finite(m, "log_det_spd");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "log_det_spd: Cholesky factorization failed");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

GenEigen generalized_eig(const Matrix& b, const Matrix& c) {
  require_spd(b, "generalized_eig (left matrix)");
  require_spd(c, "generalized_eig (right matrix)");
  if (b.rows() != c.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "generalized_eig: pencil dimensions differ");
  }
  return whitened_pencil(b, c);
}

GenEigen generalized_eig_semidefinite(const Matrix& b, const Matrix& c) {
  require_square(b, "generalized_eig_semidefinite");
  require_finite(b, "generalized_eig_semidefinite");
  require_spd(c, "generalized_eig_semidefinite (right matrix)");
  if (b.rows() != c.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "generalized_eig: pencil dimensions differ");
  }
  return whitened_pencil(b, c);
}

Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  return (sv.array() > rel_tol * sv(0)).count();
}

Matrix orthonormalize_rows(const Matrix& a) {
  require_finite(a, "orthonormalize_rows");
  const Index r = a.rows();
  const Index d = a.cols();
  const Index rank = numerical_rank(a);
  if (r > d || rank < r) {
    std::ostringstream os;
    os << "orthonormalize_rows: " << r << " rows but numerical rank " << rank;
    throw Error(ErrorCode::RankDeficient, os.str());
  }
  Eigen::HouseholderQR<Matrix> qr(a.transpose());
  Matrix q = qr.householderQ() * Matrix::Identity(d, r);
  const auto& packed = qr.matrixQR();
  for (Index j = 0; j < r; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q.transpose();
}

Vector principal_angles(const Matrix& a1, const Matrix& a2) {
  if (a1.cols() != a2.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "principal_angles: column counts differ");
  }
  // Keep `wide` as the basis with more rows; the residual of `narrow`
  // against it has one singular value (a sine) per principal angle.
  const Matrix& wide = a1.rows() >= a2.rows() ? a1 : a2;
  const Matrix& narrow = a1.rows() >= a2.rows() ? a2 : a1;
  const Index k = narrow.rows();
  if (k == 0) return Vector(0);

  const Matrix cross = narrow * wide.transpose();
  Eigen::JacobiSVD<Matrix> cos_svd(cross);
  const Vector cosines = cos_svd.singularValues();  // descending

  const Matrix residual = narrow - cross * wide;
  Eigen::JacobiSVD<Matrix> sin_svd(residual);
  Vector sines = sin_svd.singularValues();  // descending
  std::sort(sines.data(), sines.data() + sines.size());

  Vector angles(k);
  for (Index i = 0; i < k; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(i), 0.0, 1.0);
    angles(i) = (c * c >= 0.5) ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

double subspace_distance(const Matrix& a1, const Matrix& a2) {
  const Vector angles = principal_angles(orthonormalize_rows(a1), orthonormalize_rows(a2));
  return angles.size() == 0 ? 0.0 : angles.maxCoeff();
}

}  // namespace kldproj
