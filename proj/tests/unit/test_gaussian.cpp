#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kldproj/error.hpp"
#include "kldproj/gaussian.hpp"
#include "kldproj/synth.hpp"
#include "test_support.hpp"

using namespace kldproj;
using testing_support::Gen;
using testing_support::rel_diff;

namespace {

GaussianParams scalar(double mean, double var) {
  return {Vector::Constant(1, mean), Matrix::Constant(1, 1, var)};
}

// Direct evaluation of the closed form with explicit inverses and
// determinants; fine for the small, well-conditioned test matrices.
double naive_kld(const GaussianParams& p1, const GaussianParams& p2) {
  const Matrix inv2 = p2.covariance.inverse();
  const Vector delta = p2.mean - p1.mean;
  return 0.5 * (std::log(p2.covariance.determinant() / p1.covariance.determinant()) -
                static_cast<double>(p1.dim()) + (inv2 * p1.covariance).trace() +
                delta.dot(inv2 * delta));
}

template <class F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("kld: hand-evaluated scalar cases") {
  CHECK(kld(scalar(0, 1), scalar(0, 1)) == 0.0);
  CHECK(kld(scalar(0, 1), scalar(1, 1)) == doctest::Approx(0.5));
  CHECK(kld(scalar(0, 1), scalar(0, std::numbers::e)) ==
        doctest::Approx(0.18393972058572117).epsilon(1e-14));
}

TEST_CASE("kld: agrees with direct closed form and is nonnegative") {
  Gen gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    const GaussianParams p1 = gen.gaussian(5);
    const GaussianParams p2 = gen.gaussian(5);
    const double value = kld(p1, p2);
    CHECK(value >= 0.0);
    CHECK(rel_diff(value, naive_kld(p1, p2)) < 1e-10);
    CHECK(kld(p1, p1) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("kld: asymmetric in general, symmetric for equal covariances") {
  Gen gen(22);
  const GaussianParams p1 = gen.gaussian(4);
  const GaussianParams p2 = gen.gaussian(4);
  CHECK(std::abs(kld(p1, p2) - kld(p2, p1)) > 1e-3);
  const GaussianParams q2{p2.mean, p1.covariance};
  CHECK(rel_diff(kld(p1, q2), kld(q2, p1)) < 1e-12);
}

TEST_CASE("kld: errors") {
  const GaussianParams p1 = scalar(0, 1);
  GaussianParams p2{Vector::Zero(2), Matrix::Identity(2, 2)};
  CHECK(error_of([&] { kld(p1, p2); }) == ErrorCode::DimensionMismatch);
  GaussianParams singular{Vector::Zero(2), Matrix::Zero(2, 2)};
  CHECK(error_of([&] { kld(p2, singular); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("kld_projected: identity, coordinate lines, and invariance to row mixing") {
  const GaussianParams p1{Vector::Zero(2), Matrix::Identity(2, 2)};
  const GaussianParams p2{Vector(Eigen::Vector2d(1, 0)), Matrix::Identity(2, 2)};
  Matrix ex(1, 2), ey(1, 2);
  ex << 1, 0;
  ey << 0, 1;
  CHECK(kld_projected(ex, p1, p2) == doctest::Approx(0.5));
  CHECK(kld_projected(ey, p1, p2) == doctest::Approx(0.0));

  Gen gen(23);
  for (int trial = 0; trial < 30; ++trial) {
    const GaussianParams q1 = gen.gaussian(7);
    const GaussianParams q2 = gen.gaussian(7);
    CHECK(rel_diff(kld_projected(Matrix::Identity(7, 7), q1, q2), kld(q1, q2)) < 1e-10);
    const Matrix a = gen.matrix(3, 7);
    const Matrix t = gen.matrix(3, 3) + 3.0 * Matrix::Identity(3, 3);
    const double base = kld_projected(a, q1, q2);
    CHECK(rel_diff(base, kld_projected(t * a, q1, q2)) < 1e-8);
    // Data processing inequality.
    CHECK(base <= kld(q1, q2) + 1e-8);
  }
}

TEST_CASE("kld_projected: rank-deficient projection is rejected") {
  Gen gen(24);
  const GaussianParams p1 = gen.gaussian(4);
  const GaussianParams p2 = gen.gaussian(4);
  Matrix a(2, 4);
  a.row(0) = gen.vector(4).transpose();
  a.row(1) = 2.0 * a.row(0);
  CHECK(error_of([&] { kld_projected(a, p1, p2); }) == ErrorCode::RankDeficient);
}

TEST_CASE("kld_split: parts add up and vanish in the special cases") {
  Gen gen(25);
  for (int trial = 0; trial < 30; ++trial) {
    const GaussianParams p1 = gen.gaussian(6);
    const GaussianParams p2 = gen.gaussian(6);
    const KldBreakdown s = kld_split(p1, p2);
    CHECK(s.d_mu >= 0.0);
    CHECK(s.d_sigma >= 0.0);
    CHECK(std::abs(s.d_mu + s.d_sigma - s.total) <= 1e-10 * std::max(1.0, s.total));
    CHECK(rel_diff(s.total, naive_kld(p1, p2)) < 1e-10);

    const KldBreakdown equal_cov = kld_split(p1, {p2.mean, p1.covariance});
    CHECK(equal_cov.d_sigma == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(equal_cov.total == doctest::Approx(equal_cov.d_mu));
    const KldBreakdown equal_mean = kld_split(p1, {p1.mean, p2.covariance});
    CHECK(equal_mean.d_mu == 0.0);
    CHECK(equal_mean.total == doctest::Approx(equal_mean.d_sigma));
  }
}

TEST_CASE("kld_split: scaling the mean separation scales d_mu quadratically") {
  Gen gen(26);
  GaussianParams p1 = gen.gaussian(5);
  GaussianParams p2 = gen.gaussian(5);
  const KldBreakdown before = kld_split(p1, p2);
  scale_mean_separation(p1, p2, 3.0);
  const KldBreakdown after = kld_split(p1, p2);
  CHECK(after.d_mu == doctest::Approx(9.0 * before.d_mu).epsilon(1e-12));
  CHECK(after.d_sigma == doctest::Approx(before.d_sigma).epsilon(1e-12));
}

TEST_CASE("chernoff_information: closed forms and grid oracle") {
  CHECK(chernoff_information(scalar(0, 1), scalar(0, 1)) == doctest::Approx(0.0));

  const GaussianParams a{Vector::Zero(2), Matrix::Identity(2, 2)};
  const GaussianParams b{Vector(Eigen::Vector2d(2, 0)), Matrix::Identity(2, 2)};
  CHECK(chernoff_information(a, b) == doctest::Approx(0.5).epsilon(1e-12));

  // N(0,1) vs N(0,4): dense grid over s with step 1e-6.
  double grid_best = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double s = i * 1e-6;
    const double value = 0.5 * std::log((s + 4.0 * (1.0 - s)) / std::pow(4.0, 1.0 - s));
    grid_best = std::max(grid_best, value);
  }
  CHECK(grid_best == doctest::Approx(0.11703807453154602).epsilon(1e-12));
  CHECK(chernoff_information(scalar(0, 1), scalar(0, 4)) ==
        doctest::Approx(grid_best).epsilon(1e-10));
}

TEST_CASE("chernoff_information: one quarter of the divergence for equal covariances") {
  Gen gen(27);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianParams p1 = gen.gaussian(5);
    const GaussianParams p2{gen.vector(5), p1.covariance};
    CHECK(rel_diff(chernoff_information(p1, p2), kld(p1, p2) / 4.0) < 1e-6);
  }
}

TEST_CASE("g_score and component_kld") {
  CHECK(g_score(1.0) == 0.0);
  CHECK(g_score(std::numbers::e) == doctest::Approx(0.18393972058572117).epsilon(1e-14));
  CHECK(g_score(2.0) == doctest::Approx(0.09657359027997264).epsilon(1e-14));
  CHECK(g_score(0.5) == doctest::Approx(0.1534264097200273).epsilon(1e-14));
  // Decreasing below 1, increasing above.
  for (double x = 0.05; x < 0.95; x += 0.05) CHECK(g_score(x) > g_score(x + 0.05));
  for (double x = 1.0; x < 20.0; x += 0.5) CHECK(g_score(x) < g_score(x + 0.5));
  CHECK(error_of([] { g_score(0.0); }) == ErrorCode::NonPositiveInput);
  CHECK(error_of([] { g_score(-1.0); }) == ErrorCode::NonPositiveInput);

  CHECK(component_kld(0.0, 1.0) == 0.0);
  CHECK(component_kld(1.0, 1.0) == doctest::Approx(0.5));
  for (double lambda : {0.1, 0.7, 1.0, 3.5, 40.0}) {
    CHECK(component_kld(0.0, lambda) == doctest::Approx(g_score(lambda)));
    // Matches the scalar Gaussian divergence D(N(0,1) || N(m, lambda)).
    CHECK(component_kld(0.8, lambda) == doctest::Approx(kld(scalar(0, 1), scalar(0.8, lambda))));
  }
  CHECK(error_of([] { component_kld(1.0, 0.0); }) == ErrorCode::NonPositiveInput);
}

TEST_CASE("estimate_params: rank-deficient class, ridge, and errors") {
  LabeledDataset data;
  data.samples.resize(2, 2);
  data.samples << 0, 0, 2, 0;
  data.labels = {1, 1};
  CHECK(error_of([&] { estimate_params(data, 1); }) == ErrorCode::NotPositiveDefinite);
  CHECK(error_of([&] { estimate_params(data, 7); }) == ErrorCode::InsufficientSamples);

  const GaussianParams ridged = estimate_params(data, 1, 0.1);
  CHECK(ridged.mean(0) == doctest::Approx(1.0));
  CHECK(ridged.mean(1) == doctest::Approx(0.0));
  // S = diag(2, 0); ridge adds 0.1 * tr(S)/d = 0.1.
  CHECK(ridged.covariance(0, 0) == doctest::Approx(2.1));
  CHECK(ridged.covariance(1, 1) == doctest::Approx(0.1));
  CHECK(ridged.covariance(0, 1) == 0.0);
}

TEST_CASE("estimate_params: Monte-Carlo consistency at n = 1e5") {
  Gen gen(28);
  const GaussianParams truth = gen.gaussian(4);
  const Matrix x = sample(truth, 100000, 99);
  LabeledDataset data{x, std::vector<int>(100000, 1)};
  const GaussianParams est = estimate_params(data, 1);
  CHECK((est.covariance - truth.covariance).norm() < 0.02 * truth.covariance.norm());
  CHECK((est.mean - truth.mean).norm() < 0.02 * std::max(1.0, truth.mean.norm()));
}

TEST_CASE("pooled_within_class_covariance re-centers each class") {
  LabeledDataset data;
  data.samples.resize(4, 1);
  data.samples << -1, 1, 9, 11;
  data.labels = {1, 1, 2, 2};
  // Deviations are +-1 in both classes: scatter 4 over n - K = 2.
  CHECK(pooled_within_class_covariance(data)(0, 0) == doctest::Approx(2.0));
}
