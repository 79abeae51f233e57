#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "kldproj/error.hpp"
#include "kldproj/linalg.hpp"
#include "test_support.hpp"

using namespace kldproj;
using testing_support::Gen;

TEST_CASE("sym_eig: identity has unit spectrum and orthonormal vectors") {
  const SymEigen e = sym_eig(Matrix::Identity(3, 3));
  CHECK((e.eigenvalues - Vector::Ones(3)).norm() < 1e-14);
  CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("sym_eig: diagonal matrix gives sorted values and permuted basis") {
  const Matrix m = Vector(Eigen::Vector3d(3, 1, 2)).asDiagonal();
  const SymEigen e = sym_eig(m);
  CHECK(e.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(e.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(1, 2)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig: reconstruction and orthogonality on random symmetric matrices") {
  Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = gen.symmetric(10);
    const SymEigen e = sym_eig(m);
    const Matrix rebuilt = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
    CHECK((rebuilt - m).norm() < 1e-10 * m.norm());
    CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(10, 10)).norm() < 1e-10);
    for (Index i = 1; i < 10; ++i) CHECK(e.eigenvalues(i - 1) >= e.eigenvalues(i));
  }
}

TEST_CASE("sym_eig: rejects non-finite input") {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    sym_eig(m);
    FAIL("expected NonFiniteInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteInput);
  }
}

TEST_CASE("spd_inv_sqrt: closed forms and multiply-back") {
  CHECK((spd_inv_sqrt(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() < 1e-14);
  const Matrix d = Vector(Eigen::Vector2d(4, 9)).asDiagonal();
  const Matrix s = spd_inv_sqrt(d);
  CHECK(s(0, 0) == doctest::Approx(0.5));
  CHECK(s(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(s(0, 1)) < 1e-15);

  Gen gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = gen.spd(8);
    const Matrix w = spd_inv_sqrt(m);
    CHECK((w * m * w - Matrix::Identity(8, 8)).norm() < 1e-8);
    CHECK((w - w.transpose()).norm() == 0.0);
    CHECK((spd_sqrt(m) * spd_sqrt(m) - m).norm() < 1e-10 * m.norm());
  }
}

TEST_CASE("spd_inv_sqrt: singular input reports NotPositiveDefinite") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 2.0;
  try {
    spd_inv_sqrt(m);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(std::string(e.what()).find("smallest eigenvalue") != std::string::npos);
  }
}

TEST_CASE("log_det_spd matches the eigenvalue sum") {
  Gen gen(13);
  const Matrix m = gen.spd(6);
  const SymEigen e = sym_eig(m);
  CHECK(log_det_spd(m) == doctest::Approx(e.eigenvalues.array().log().sum()).epsilon(1e-12));
}

TEST_CASE("generalized_eig: equal pair and diagonal pencil") {
  Gen gen(14);
  const Matrix b = gen.spd(5);
  const GenEigen same = generalized_eig(b, b);
  CHECK((same.eigenvalues - Vector::Ones(5)).cwiseAbs().maxCoeff() < 1e-10);

  const Matrix diag = Vector(Eigen::Vector2d(2, 3)).asDiagonal();
  const GenEigen g = generalized_eig(diag, Matrix::Identity(2, 2));
  CHECK(g.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(g.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(g.eigenvectors(1, 0) == doctest::Approx(1.0));
  CHECK(g.eigenvectors(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("generalized_eig: residuals and reciprocal pair property") {
  Gen gen(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix b = gen.spd(6);
    const Matrix c = gen.spd(6);
    const GenEigen fwd = generalized_eig(b, c);
    const GenEigen rev = generalized_eig(c, b);
    for (Index i = 0; i < 6; ++i) {
      const Vector v = fwd.eigenvectors.col(i);
      CHECK((b * v - fwd.eigenvalues(i) * c * v).norm() < 1e-8 * (b.norm() + c.norm()));
      CHECK(fwd.eigenvalues(i) > 0.0);
      CHECK(v.norm() == doctest::Approx(1.0));
      // Reversing the pencil inverts and reverses the spectrum.
      const Index j = 5 - i;
      CHECK(fwd.eigenvalues(i) * rev.eigenvalues(j) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::abs(v.dot(rev.eigenvectors.col(j))) > 1.0 - 1e-8);
    }
  }
}

TEST_CASE("orthonormalize_rows: normalization, idempotence, span preservation") {
  Matrix single(1, 2);
  single << 3, 4;
  const Matrix n = orthonormalize_rows(single);
  CHECK(n(0, 0) == doctest::Approx(0.6));
  CHECK(n(0, 1) == doctest::Approx(0.8));

  Gen gen(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = gen.matrix(3, 10);
    const Matrix q = orthonormalize_rows(a);
    CHECK((q * q.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
    const Vector angles = principal_angles(q, orthonormalize_rows(a));
    CHECK(angles.maxCoeff() < 1e-10);
    // Rows of `a` lie in the span of `q`.
    CHECK((a - a * q.transpose() * q).norm() < 1e-10 * a.norm());
    // Already-orthonormal input: same span, still orthonormal.
    const Matrix again = orthonormalize_rows(q);
    CHECK(principal_angles(q, again).maxCoeff() < 1e-10);
  }
}

TEST_CASE("orthonormalize_rows: rank-deficient stack is rejected with its rank") {
  Matrix a(3, 4);
  a << 1, 0, 0, 0,
       0, 1, 0, 0,
       1, 1, 0, 0;
  try {
    orthonormalize_rows(a);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
    CHECK(std::string(e.what()).find("rank 2") != std::string::npos);
  }
  CHECK(numerical_rank(a) == 2);
}

TEST_CASE("principal_angles: closed-form configurations") {
  Matrix e1(1, 2), e2(1, 2), diag(1, 2);
  e1 << 1, 0;
  e2 << 0, 1;
  diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(principal_angles(e1, e1)(0) == 0.0);
  CHECK(principal_angles(e1, e2)(0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(principal_angles(e1, diag)(0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
}

TEST_CASE("principal_angles: tiny rotations are resolved below 1e-8") {
  // arccos of the cosine cannot resolve angles below ~1e-8; the sine branch
  // must.
  const double theta = 1e-11;
  Matrix a(1, 3), b(1, 3);
  a << 1, 0, 0;
  b << std::cos(theta), std::sin(theta), 0;
  CHECK(principal_angles(a, b)(0) == doctest::Approx(theta).epsilon(1e-4));

  Gen gen(17);
  const Matrix q = orthonormalize_rows(gen.matrix(4, 12));
  CHECK(principal_angles(q, q).maxCoeff() < 1e-14);
}
