#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kldproj/error.hpp"
#include "kldproj/eval.hpp"
#include "kldproj/synth.hpp"
#include "test_support.hpp"

using namespace kldproj;
using testing_support::Gen;
using testing_support::rel_diff;

TEST_CASE("sweep_r: shared covariance, alg1 keeps everything at r = 1") {
  Gen gen(71);
  const Matrix s = gen.spd(6);
  const GaussianParams p1{gen.vector(6), s};
  const GaussianParams p2{gen.vector(6), s};
  SweepOptions opts;
  opts.methods = {Method::Alg1, Method::Alg2, Method::Lol, Method::Lda};
  opts.r_values = {1, 2, 3, 4, 5, 6};
  const SweepTable table = sweep_r(p1, p2, opts);
  CHECK(table.rows.size() == 19);
  CHECK(table.rows.front().method == "alg1");
  CHECK(table.rows.front().r == 1);
  CHECK(rel_diff(table.rows.front().kld, table.full_kld) < 1e-8);
  CHECK(sweep_violations(table, 6).empty());
  CHECK(table.metadata.at("dimension") == "6");
}

TEST_CASE("sweep_r: every method recovers the full divergence at r = d") {
  Gen gen(72);
  const GaussianParams p1 = gen.gaussian(5);
  const GaussianParams p2 = gen.gaussian(5);
  SweepOptions opts;
  opts.methods = {Method::Alg1, Method::Alg2, Method::Lol};
  opts.r_values = {1, 2, 3, 4, 5};
  opts.refine = true;
  opts.ascent.max_iters = 500;
  const SweepTable table = sweep_r(p1, p2, opts);
  CHECK(table.rows.size() == 30);
  for (const SweepRow& row : table.rows) {
    CHECK(row.kld <= table.full_kld + 1e-8);
    if (row.r == 5) CHECK(rel_diff(row.kld, table.full_kld) < 1e-8);
  }
  for (const std::string& v : sweep_violations(table, 5, false)) FAIL_CHECK(v);
}

TEST_CASE("sweep_r: rejects r out of range") {
  Gen gen(73);
  const GaussianParams p1 = gen.gaussian(3);
  const GaussianParams p2 = gen.gaussian(3);
  SweepOptions opts;
  opts.r_values = {4};
  CHECK_THROWS_AS(sweep_r(p1, p2, opts), Error);
}

TEST_CASE("sweep_violations flags bound, monotonicity and r = d failures") {
  SweepTable table;
  table.full_kld = 1.0;
  table.rows = {{"alg1", 1, 0.6}, {"alg1", 2, 0.5}, {"alg1", 3, 1.0}, {"alg2", 1, 1.5},
                {"alg2", 3, 0.9}};
  const auto v = sweep_violations(table, 3);
  CHECK(v.size() == 3);
  CHECK(sweep_violations(table, 3, false).size() == 2);
}

TEST_CASE("pairwise_preservation: identity, truncation, and two-class LDA") {
  Gen gen(74);
  std::vector<GaussianParams> params;
  const Matrix s = gen.spd(6);
  for (int k = 0; k < 3; ++k) params.push_back({gen.vector(6), s});
  const Matrix full = pairwise_preservation(params, Matrix::Identity(6, 6));
  CHECK((full - Matrix::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

  const ProjectionResult mclda = multiclass_lda(params);
  const Matrix first_only = pairwise_preservation(params, mclda.matrix.topRows(1));
  CHECK(first_only.minCoeff() < 1.0 - 1e-6);

  const std::vector<GaussianParams> two{params[0], params[1]};
  const Matrix lda = pairwise_preservation(two, lda_direction(params[0], params[1]).matrix);
  CHECK((lda - Matrix::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("PluginClassifier: well separated and indistinguishable classes") {
  const GaussianParams left{Vector::Constant(1, -5.0), Matrix::Identity(1, 1)};
  const GaussianParams right{Vector::Constant(1, 5.0), Matrix::Identity(1, 1)};
  const LabeledDataset separated = sample_dataset({left, right}, 2000, 1);
  const PluginClassifier clf = PluginClassifier::train_full(separated);
  CHECK(clf.accuracy(separated) > 0.99);
  Matrix probe(2, 1);
  probe << -0.1, 0.1;
  CHECK(clf.predict(probe) == std::vector<int>{1, 2});

  const LabeledDataset same = sample_dataset({left, left}, 10000, 2);
  const LabeledDataset same_test = sample_dataset({left, left}, 10000, 3);
  const double chance = PluginClassifier::train_full(same).accuracy(same_test);
  CHECK(std::abs(chance - 0.5) < 0.02);
}

TEST_CASE("PluginClassifier: too few samples per class") {
  Gen gen(75);
  const LabeledDataset tiny = sample_dataset({gen.gaussian(3), gen.gaussian(3)}, 4, 1);
  CHECK_THROWS_AS(PluginClassifier::train_full(tiny), Error);
}

TEST_CASE("density grid: isotropic class gives circular, normalized density") {
  Gen gen(76);
  const GaussianParams p1 = gen.gaussian(5);
  const GaussianParams p2 = gen.gaussian(5);
  const ProjectionResult proj = algorithm2(p1, p2, 2);
  // Class 1 projects to N(0, I) in the whitened frame: symmetric box, square grid.
  GridSpec grid{-5, 5, -5, 5, 201, 201};
  const DensityGrid g = density_grid(proj, p1, p2, grid);
  CHECK(g.values_class1.rows() == 201);
  const Matrix rotated = g.values_class1.transpose().colwise().reverse();
  CHECK((rotated - g.values_class1).cwiseAbs().maxCoeff() < 1e-10);
  Index pr = 0, pc = 0;
  g.values_class1.maxCoeff(&pr, &pc);
  CHECK(pr == 100);
  CHECK(pc == 100);
  CHECK(g.peak_class1 == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  CHECK(g.contour_level_class1() == doctest::Approx(1e-3 * g.peak_class1));
  const double cell = (10.0 / 200) * (10.0 / 200);
  CHECK(std::abs(g.values_class1.sum() * cell - 1.0) < 1e-3);
}

TEST_CASE("default_grid covers both projected classes") {
  Gen gen(77);
  const GaussianParams p1 = gen.gaussian(4);
  const GaussianParams p2 = gen.gaussian(4);
  const ProjectionResult proj = algorithm1(p1, p2, 2);
  const GridSpec grid = default_grid(proj, p1, p2);
  for (const GaussianParams* p : {&p1, &p2}) {
    const Vector m = proj.original_matrix * (p->mean - proj.center);
    CHECK(m(0) > grid.x_min);
    CHECK(m(0) < grid.x_max);
    CHECK(m(1) > grid.y_min);
    CHECK(m(1) < grid.y_max);
  }
  CHECK_THROWS_AS(default_grid(algorithm1(p1, p2, 1), p1, p2), Error);
}
