#include <cmath>

#include "doctest.h"
#include "kldproj/error.hpp"
#include "kldproj/projections.hpp"
#include "kldproj/refine.hpp"
#include "test_support.hpp"

using namespace kldproj;
using testing_support::Gen;
using testing_support::rel_diff;

namespace {

// Central differences of the projected divergence, entry by entry.
Matrix numeric_gradient(const Matrix& a, const GaussianParams& p1, const GaussianParams& p2,
                        double h) {
  Matrix g(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      Matrix plus = a, minus = a;
      plus(i, j) += h;
      minus(i, j) -= h;
      g(i, j) = (kld_projected(plus, p1, p2) - kld_projected(minus, p1, p2)) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace

TEST_CASE("kld_gradient: matches central differences") {
  Gen gen(51);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 3 + trial % 6;
    const Index r = 1 + trial % std::min<Index>(4, d);
    const GaussianParams p1 = gen.gaussian(d);
    const GaussianParams p2 = gen.gaussian(d);
    const Matrix a = gen.matrix(r, d);
    const Matrix analytic = kld_gradient(a, p1, p2);
    const Matrix numeric = numeric_gradient(a, p1, p2, 1e-5);
    const double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
    CHECK((analytic - numeric).cwiseAbs().maxCoeff() / scale < 1e-5);
  }
}

TEST_CASE("kld_gradient: orthogonal to row-space-preserving perturbations") {
  Gen gen(52);
  const GaussianParams p1 = gen.gaussian(6);
  const GaussianParams p2 = gen.gaussian(6);
  const Matrix a = gen.matrix(3, 6);
  const Matrix g = kld_gradient(a, p1, p2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix t = gen.matrix(3, 3);
    // Direction T A keeps the row space, so the objective is flat along it.
    const Matrix direction = t * a;
    CHECK(std::abs((g.array() * direction.array()).sum()) < 1e-6 * g.norm() * direction.norm());
  }
}

TEST_CASE("kld_gradient: stationary at the LDA row for a shared covariance") {
  Gen gen(53);
  const Matrix s = gen.spd(5);
  const GaussianParams p1{gen.vector(5), s};
  const GaussianParams p2{gen.vector(5), s};
  const Matrix a = lda_direction(p1, p2).matrix;
  const Matrix g = kld_gradient(a, p1, p2);
  CHECK(g.norm() < 1e-6);
}

TEST_CASE("gradient_ascent: already optimal start stays put") {
  Gen gen(54);
  const Matrix s = gen.spd(8);
  const GaussianParams p1{gen.vector(8), s};
  const GaussianParams p2{gen.vector(8), s};
  const ProjectionResult start = algorithm1(p1, p2, 1);
  const AscentTrace trace = gradient_ascent(start.original_matrix, p1, p2);
  CHECK(std::abs(trace.final_objective - trace.initial_objective) < 1e-9);
  CHECK(trace.iterates.front().iteration == 0);
  CHECK(trace.iterates.front().objective == doctest::Approx(start.achieved_kld));
}

TEST_CASE("gradient_ascent: never ends below its start and improves a poor start") {
  Gen gen(55);
  const GaussianParams p1 = gen.gaussian(6);
  const GaussianParams p2 = gen.gaussian(6);
  const Matrix a0 = random_initialization(2, 6, 3);
  AscentOptions opts;
  opts.max_iters = 3000;
  const AscentTrace trace = gradient_ascent(a0, p1, p2, opts);
  CHECK(trace.final_objective >= trace.initial_objective);
  CHECK(trace.final_objective > trace.initial_objective + 1e-3);
  CHECK(trace.final_objective <= kld(p1, p2) + 1e-8);
  CHECK(rel_diff(trace.final_objective, kld_projected(trace.final_matrix, p1, p2)) < 1e-12);
  // Running best is non-decreasing along the trace.
  for (std::size_t i = 1; i < trace.iterates.size(); ++i) {
    CHECK(trace.iterates[i].iteration > trace.iterates[i - 1].iteration);
  }
}

TEST_CASE("gradient_ascent: nothing left to gain once the signal subspace is covered") {
  // Signal of dimension 3 seen through a 3 -> 8 channel with isotropic
  // noise: the divergence lives in a 3-dimensional subspace.
  Gen gen(56);
  const GaussianParams s1 = gen.gaussian(3);
  const GaussianParams s2 = gen.gaussian(3);
  const Matrix h = gen.matrix(8, 3);
  const auto embed = [&](const GaussianParams& s) {
    return GaussianParams{h * s.mean, symmetrize(h * s.covariance * h.transpose() +
                                                 Matrix::Identity(8, 8))};
  };
  const GaussianParams p1 = embed(s1);
  const GaussianParams p2 = embed(s2);
  const ProjectionResult start = algorithm2(p1, p2, 3);
  CHECK(rel_diff(start.achieved_kld, kld(p1, p2)) < 1e-8);
  const AscentTrace trace = gradient_ascent(start.original_matrix, p1, p2);
  CHECK(trace.final_objective - trace.initial_objective < 1e-3);
  CHECK(trace.final_objective >= trace.initial_objective);
}

TEST_CASE("gradient_ascent: random starts do not beat the closed forms") {
  Gen gen(57);
  const GaussianParams p1 = gen.gaussian(5);
  const GaussianParams p2 = gen.gaussian(5);
  const Index r = 2;
  AscentOptions opts;
  opts.max_iters = 2000;
  const double closed =
      std::max(gradient_ascent(algorithm1(p1, p2, r).original_matrix, p1, p2, opts).final_objective,
               gradient_ascent(algorithm2(p1, p2, r).original_matrix, p1, p2, opts).final_objective);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AscentTrace trace = gradient_ascent(random_initialization(r, 5, seed), p1, p2, opts);
    CHECK(trace.final_objective <= closed + 1e-6);
  }
}

TEST_CASE("random_initialization: unit rows and determinism") {
  const Matrix a = random_initialization(3, 7, 11);
  for (Index i = 0; i < 3; ++i) CHECK(a.row(i).norm() == doctest::Approx(1.0));
  CHECK((a - random_initialization(3, 7, 11)).norm() == 0.0);
  CHECK((a - random_initialization(3, 7, 12)).norm() > 0.1);
}

TEST_CASE("AscentOptions validation") {
  AscentOptions bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = {};
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = {};
  bad.patience = 0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = {};
  bad.max_iters = -1;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_NOTHROW(validate(AscentOptions{}));
}
