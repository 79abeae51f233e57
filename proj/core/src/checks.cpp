#include "kldproj/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kldproj/error.hpp"
#include "kldproj/synth.hpp"

namespace kldproj::checks {

namespace {

// Streams keyed off CheckOptions::seed, one per criterion.
enum : std::uint64_t {
  kExactness = 101,
  kAdditivity = 102,
  kEqualMean = 103,
  kOrder = 104,
  kPreservation = 105,
  kGradient = 107,
  kChannel = 108,
  kRegimePair = 109,
  kChernoff = 110,
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double value) {
  std::ostringstream os;
  os.precision(3);
  os << value;
  return os.str();
}

double rel_error(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

// The oracles below use Eigen's solvers directly instead of the library's
// Cholesky and whitening routes.

double oracle_kld(const GaussianParams& p1, const GaussianParams& p2) {
  const Eigen::SelfAdjointEigenSolver<Matrix> e1(p1.covariance, Eigen::EigenvaluesOnly);
  const Eigen::SelfAdjointEigenSolver<Matrix> e2(p2.covariance, Eigen::EigenvaluesOnly);
  const Eigen::LDLT<Matrix> ldlt(p2.covariance);
  const Vector delta = p2.mean - p1.mean;
  const double log_ratio =
      e2.eigenvalues().array().log().sum() - e1.eigenvalues().array().log().sum();
  return 0.5 * (log_ratio - static_cast<double>(p1.dim()) +
                ldlt.solve(p1.covariance).trace() + delta.dot(ldlt.solve(delta)));
}

double oracle_projected_kld(const Matrix& a, const GaussianParams& p1, const GaussianParams& p2) {
  const GaussianParams q1{a * p1.mean, a * p1.covariance * a.transpose()};
  const GaussianParams q2{a * p2.mean, a * p2.covariance * a.transpose()};
  return oracle_kld(q1, q2);
}

Matrix oracle_orthonormal_rows(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a.transpose());
  const Matrix q = qr.householderQ() * Matrix::Identity(a.cols(), a.rows());
  return q.transpose();
}

// Largest principal angle between row spaces, from the spectral norm of the
// residual of one basis after projection onto the other.
double oracle_max_angle(const Matrix& a, const Matrix& b) {
  const Matrix qa = oracle_orthonormal_rows(a);
  const Matrix qb = oracle_orthonormal_rows(b);
  const Matrix residual = qa - (qa * qb.transpose()) * qb;
  const Eigen::JacobiSVD<Matrix> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

// Top-r generalized eigenvectors of (Sigma2, Sigma1) ranked by g.
Matrix oracle_top_g(const Matrix& s1, const Matrix& s2, Index r) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(s2, s1);
  const Vector lambda = solver.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), Index{0});
  const auto g = [](double x) { return 0.5 * (std::log(x) - 1.0 + 1.0 / x); };
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return g(lambda(i)) > g(lambda(j)); });
  Matrix rows(r, s1.rows());
  for (Index i = 0; i < r; ++i) {
    rows.row(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]).transpose();
  }
  return rows;
}

Matrix random_psd(Index d, Index rank, Rng& rng) {
  const Matrix w = rng.normal_matrix(d, rank);
  return symmetrize(w * w.transpose() / static_cast<double>(rank));
}

std::vector<Index> all_r(Index d) {
  std::vector<Index> r(static_cast<std::size_t>(d));
  std::iota(r.begin(), r.end(), Index{1});
  return r;
}

SweepTable closed_form_sweep(const GaussianParams& p1, const GaussianParams& p2) {
  SweepOptions opts;
  opts.methods = {Method::Alg1, Method::Alg2, Method::Lol};
  opts.r_values = all_r(p1.dim());
  return sweep_r(p1, p2, opts);
}

CriterionResult finish(int id, std::string name, bool passed, std::string detail,
                       const Timer& timer) {
  return {id, std::move(name), passed, std::move(detail), timer.seconds()};
}

// Structured two-class instance in d = 6: shared high-variance nuisance
// directions plus low-variance directions that carry the separation, all
// rotated by a seeded orthogonal matrix.
std::pair<GaussianParams, GaussianParams> regime_pair_instance(bool large_mu, std::uint64_t seed) {
  const Index d = 6;
  Rng rng(seed);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(d, d));
  const Matrix q = qr.householderQ();
  Vector var1(d), var2(d), delta(d);
  if (large_mu) {
    var1 << 50, 40, 30, 0.05, 0.04, 1.0;
    var2 << 45, 50, 35, 0.06, 0.03, 2.0;
    delta << 3, 3, 3, 0.7, 0.7, 0.0;
  } else {
    var1 << 50, 40, 30, 1.0, 1.0, 1.0;
    var2 << 50, 45, 30, 0.02, 30.0, 1.0;
    delta << 0.5, 0.5, 0.5, 0.0, 0.0, 0.0;
  }
  const Vector mu1 = rng.normal_vector(d);
  GaussianParams p1{mu1, symmetrize(q * var1.asDiagonal() * q.transpose())};
  GaussianParams p2{mu1 + q * delta, symmetrize(q * var2.asDiagonal() * q.transpose())};
  return {std::move(p1), std::move(p2)};
}

}  // namespace

void SweepLog::add(std::string label, SweepTable table, Index d) {
  tables.emplace_back(std::move(label), std::move(table));
  dims.push_back(d);
}

Matrix finite_difference_gradient(const Matrix& a, const GaussianParams& p1,
                                  const GaussianParams& p2, double h) {
  Matrix g(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      Matrix plus = a;
      Matrix minus = a;
      plus(i, j) += h;
      minus(i, j) -= h;
      g(i, j) = (oracle_projected_kld(plus, p1, p2) - oracle_projected_kld(minus, p1, p2)) /
                (2.0 * h);
    }
  }
  return g;
}

CriterionResult single_direction_exactness(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  const Index d = 20;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::uint64_t seed = Rng::derive(opts.seed, kExactness * 1000 + i);
    const Matrix sigma = random_spd({d, 0.1, 10.0, seed});
    const GaussianParams p1{random_mean(d, 1.0, Rng::derive(seed, 1)), sigma};
    const GaussianParams p2{random_mean(d, 1.0, Rng::derive(seed, 2)), sigma};
    const ProjectionResult res = algorithm1(p1, p2, 1);
    const double full = oracle_kld(p1, p2);
    worst = std::max(worst, rel_error(oracle_projected_kld(res.original_matrix, p1, p2), full));
    if (i < 10) log.add("exactness #" + std::to_string(i), closed_form_sweep(p1, p2), d);
  }
  const double elapsed = timer.seconds();
  const bool passed = worst < 1e-8 && elapsed < 5.0;
  return finish(1, "one-direction exactness under shared covariance", passed,
                "100 instances d=20, max rel err " + sci(worst) + " (tol 1e-8, limit 5 s)",
                timer);
}

CriterionResult component_additivity(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto d = static_cast<Index>(2 + i % 49);
    const std::uint64_t seed = Rng::derive(opts.seed, kAdditivity * 1000 + i);
    const GaussianParams p1{random_mean(d, 1.0, Rng::derive(seed, 1)),
                            random_spd({d, 0.1, 10.0, Rng::derive(seed, 2)})};
    const GaussianParams p2{random_mean(d, 1.0, Rng::derive(seed, 3)),
                            random_spd({d, 0.1, 10.0, Rng::derive(seed, 4)})};
    const WhitenedDecomposition w = whitened_decomposition(p1, p2);
    double total = 0.0;
    for (const WhitenedComponent& c : w.components) total += c.divergence;
    worst = std::max(worst, rel_error(total, oracle_kld(p1, p2)));
    if (i < 10) log.add("additivity #" + std::to_string(i), closed_form_sweep(p1, p2), d);
  }
  return finish(2, "component divergences add up to the full divergence", worst < 1e-8,
                "100 instances d in [2, 50], max rel err " + sci(worst) + " (tol 1e-8)", timer);
}

CriterionResult equal_mean_equivalence(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  const Index d = 20;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::uint64_t seed = Rng::derive(opts.seed, kEqualMean * 1000 + i);
    const Vector mu = random_mean(d, 1.0, Rng::derive(seed, 1));
    const GaussianParams p1{mu, random_spd({d, 0.1, 10.0, Rng::derive(seed, 2)})};
    const GaussianParams p2{mu, random_spd({d, 0.1, 10.0, Rng::derive(seed, 3)})};
    for (Index r : {1, 3, 5}) {
      const ProjectionResult res = algorithm2(p1, p2, r);
      const Matrix reference = oracle_top_g(p1.covariance, p2.covariance, r);
      worst = std::max(worst, oracle_max_angle(res.original_matrix, reference));
    }
    if (i < 10) log.add("equal-mean #" + std::to_string(i), closed_form_sweep(p1, p2), d);
  }
  return finish(3, "equal-mean subspace is the top generalized eigen-subspace", worst < 1e-8,
                "50 instances d=20, r in {1,3,5}, max angle " + sci(worst) + " rad (tol 1e-8)",
                timer);
}

CriterionResult order_invariance(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  const Index d = 20;
  double worst = 0.0;
  double oracle_worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::uint64_t seed = Rng::derive(opts.seed, kOrder * 1000 + i);
    Rng rng(Rng::derive(seed, 1));
    const Vector mu = random_mean(d, 1.0, Rng::derive(seed, 2));
    const Matrix s1 = random_spd({d, 0.1, 10.0, Rng::derive(seed, 3)});
    const auto rank = static_cast<Index>(5 + i % 16);
    const GaussianParams p1{mu, s1};
    const GaussianParams p2{mu, symmetrize(s1 + random_psd(d, rank, rng))};
    for (Index r : {1, 3, 5}) {
      const OrderCheck c = equal_mean_order_check(p1, p2, r);
      worst = std::max(worst, c.max_principal_angle);
      const Matrix forward = oracle_top_g(p1.covariance, p2.covariance, r);
      const Matrix reverse = oracle_top_g(p2.covariance, p1.covariance, r);
      oracle_worst = std::max(oracle_worst, oracle_max_angle(forward, reverse));
      worst = std::max(worst, oracle_max_angle(c.subspace_12, forward));
    }
    if (i < 10) log.add("signal+noise #" + std::to_string(i), closed_form_sweep(p1, p2), d);
  }
  // Negative control: eigenvalues {4, 0.2} straddle 1 and the two orders
  // pick different axes.
  Vector straddle(2);
  straddle << 4.0, 0.2;
  const GaussianParams c1{Vector::Zero(2), Matrix::Identity(2, 2)};
  const GaussianParams c2{Vector::Zero(2), Matrix(straddle.asDiagonal())};
  const double control = equal_mean_order_check(c1, c2, 1).max_principal_angle;
  const bool passed = worst < 1e-8 && oracle_worst < 1e-8 && control > 0.1;
  return finish(4, "both divergence orders share the optimal subspace", passed,
                "50 signal+noise instances d=20, r in {1,3,5}, max angle " + sci(worst) +
                    " (oracle " + sci(oracle_worst) + ", tol 1e-8); straddling control angle " +
                    sci(control) + " rad (> 0.1)",
                timer);
}

CriterionResult multiclass_preservation(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  const Index d = 30;
  const Index k = 5;
  double worst_ratio = 0.0;
  double worst_angle = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::uint64_t seed = Rng::derive(opts.seed, kPreservation * 1000 + i);
    const Matrix sigma = random_spd({d, 0.1, 10.0, Rng::derive(seed, 1)});
    std::vector<GaussianParams> params;
    for (Index c = 0; c < k; ++c) {
      params.push_back(
          {random_mean(d, 1.0, Rng::derive(seed, 10 + static_cast<std::uint64_t>(c))), sigma});
    }
    const ProjectionResult res = multiclass_lda(params);
    for (Index a = 0; a < k; ++a) {
      for (Index b = a + 1; b < k; ++b) {
        const auto& pa = params[static_cast<std::size_t>(a)];
        const auto& pb = params[static_cast<std::size_t>(b)];
        const double ratio = oracle_projected_kld(res.matrix, pa, pb) / oracle_kld(pa, pb);
        worst_ratio = std::max(worst_ratio, std::abs(ratio - 1.0));
      }
    }
    const Eigen::LDLT<Matrix> ldlt(sigma);
    Matrix span(k - 1, d);
    for (Index c = 1; c < k; ++c) {
      span.row(c - 1) =
          ldlt.solve(params[static_cast<std::size_t>(c)].mean - params[0].mean).transpose();
    }
    worst_angle = std::max(worst_angle, oracle_max_angle(res.matrix, span));
    if (i < 5) log.add("multiclass pair #" + std::to_string(i), closed_form_sweep(params[0], params[1]), d);
  }
  const bool passed = worst_ratio < 1e-8 && worst_angle < 1e-8;
  return finish(5, "multiclass LDA preserves every pairwise divergence", passed,
                "20 instances K=5 d=30, max |ratio-1| " + sci(worst_ratio) + ", max angle " +
                    sci(worst_angle) + " rad (tol 1e-8)",
                timer);
}

CriterionResult dpi_monotonicity(const SweepLog& log) {
  const Timer timer;
  std::vector<std::string> failures;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < log.tables.size(); ++i) {
    const auto& [label, table] = log.tables[i];
    rows += table.rows.size();
    for (const std::string& v : sweep_violations(table, log.dims[i])) {
      failures.push_back(label + ": " + v);
    }
  }
  std::string detail = std::to_string(log.tables.size()) + " sweeps, " + std::to_string(rows) +
                       " rows, " + std::to_string(failures.size()) + " violations";
  if (!failures.empty()) detail += "; first: " + failures.front();
  return finish(6, "sweeps are monotone, bounded, and exact at r=d", failures.empty(), detail,
                timer);
}

CriterionResult gradient_correctness(const CheckOptions& opts) {
  const Timer timer;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::uint64_t seed = Rng::derive(opts.seed, kGradient * 1000 + i);
    const auto d = static_cast<Index>(2 + i % 7);
    // r < d: at r = d the objective is constant and the gradient vanishes.
    const auto r = static_cast<Index>(1 + i % std::min<std::uint64_t>(4, d - 1));
    const GaussianParams p1{random_mean(d, 1.0, Rng::derive(seed, 1)),
                            random_spd({d, 0.1, 10.0, Rng::derive(seed, 2)})};
    const GaussianParams p2{random_mean(d, 1.0, Rng::derive(seed, 3)),
                            random_spd({d, 0.1, 10.0, Rng::derive(seed, 4)})};
    Rng rng(Rng::derive(seed, 5));
    const Matrix a = rng.normal_matrix(r, d);
    const Matrix analytic = kld_gradient(a, p1, p2);
    const Matrix numeric = finite_difference_gradient(a, p1, p2, 1e-5);
    const double scale = numeric.cwiseAbs().maxCoeff();
    worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() / std::max(scale, 1e-12));
  }
  const double elapsed = timer.seconds();
  return finish(7, "analytic gradient matches central differences",
                worst < 1e-5 && elapsed < 10.0,
                "20 instances d<=8 r<=4, h=1e-5, max rel err " + sci(worst) +
                    " (tol 1e-5, limit 10 s)",
                timer);
}

CriterionResult channel_reproduction(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  const Index t = 10;
  const Index d = 100;
  const std::uint64_t seed = Rng::derive(opts.seed, kChannel);
  ClassPairSpec signal;
  signal.dim = t;
  signal.seed = seed;
  const std::vector<GaussianParams> s = random_classes(signal, 2);
  const ChannelEmbedding base = embed_channel(s[0], s[1], {d, t, 1.0, Rng::derive(seed, 1)});

  std::vector<Index> r_values = all_r(t);
  r_values.push_back(d);
  SweepOptions sweep_opts;
  sweep_opts.methods = {Method::Alg1, Method::Alg2};
  sweep_opts.r_values = r_values;
  sweep_opts.refine = true;

  std::ostringstream detail;
  detail.precision(4);
  bool passed = true;
  for (const bool large : {true, false}) {
    GaussianParams x1 = base.x1;
    GaussianParams x2 = base.x2;
    const double target = large ? 4.6 : 0.0077;
    scale_mean_separation(x1, x2, separation_factor_for_ratio(x1, x2, target));
    const KldBreakdown split = kld_split(x1, x2);
    const double ratio = split.d_mu / split.d_sigma;
    const bool ratio_ok = large ? ratio > 4.0 : ratio < 0.05;

    const SweepTable table = sweep_r(x1, x2, sweep_opts);
    std::map<std::pair<std::string, Index>, double> at;
    for (const SweepRow& row : table.rows) at[{row.method, row.r}] = row.kld;

    bool ordering = true;
    if (large) {
      ordering = at[{"alg1", 1}] > at[{"alg2", 1}];
    } else {
      for (Index r : {1, 2, 3}) ordering = ordering && at[{"alg2", r}] >= at[{"alg1", r}];
    }
    bool gains_ok = true;
    double gain_at_t = 0.0;
    for (const char* method : {"alg1", "alg2"}) {
      for (Index r : r_values) {
        const double gain = at[{std::string(method) + "+ascent", r}] - at[{method, r}];
        // Rounding-level slack: the closed-form value and the ascent's
        // starting value are evaluated along different routes.
        gains_ok = gains_ok && gain >= -1e-9 * std::max(1.0, table.full_kld);
        if (r == t) gain_at_t = std::max(gain_at_t, gain);
      }
    }
    const bool vanishing = gain_at_t < 1e-3 * table.full_kld;
    passed = passed && ratio_ok && ordering && gains_ok && vanishing;
    detail << (large ? "large-mu" : "small-mu") << ": D_mu/D_Sigma=" << ratio << " ("
           << split.d_mu << "/" << split.d_sigma << "), r=1 alg1 " << at[{"alg1", 1}]
           << " alg2 " << at[{"alg2", 1}] << ", ordering " << (ordering ? "ok" : "FAILED")
           << ", ascent gains >= 0 " << (gains_ok ? "ok" : "FAILED") << ", gain at r=10 "
           << sci(gain_at_t) << " of " << table.full_kld << (vanishing ? "" : " (too large)")
           << (large ? "; " : "");
    log.add(large ? "channel large-mu" : "channel small-mu", table, d);
  }
  const double elapsed = timer.seconds();
  passed = passed && elapsed < 300.0;
  return finish(8, "channel experiment orderings (t=10, d=100, noise 1)", passed, detail.str(),
                timer);
}

CriterionResult classification_reproduction(const CheckOptions& opts, SweepLog& log) {
  const Timer timer;
  const Index n_train = 10000;
  const Index n_test = 1000;
  const Index r = 2;
  bool passed = true;
  std::ostringstream detail;
  detail.precision(4);
  for (const bool large : {true, false}) {
    const std::uint64_t seed = Rng::derive(opts.seed, kRegimePair * 10 + (large ? 1 : 2));
    const auto [t1, t2] = regime_pair_instance(large, seed);
    const LabeledDataset train = sample_dataset({t1, t2}, n_train, Rng::derive(seed, 1));
    const LabeledDataset test = sample_dataset({t1, t2}, n_test, Rng::derive(seed, 2));
    const GaussianParams p1 = estimate_params(train, 1);
    const GaussianParams p2 = estimate_params(train, 2);
    const Matrix pooled = pooled_within_class_covariance(train);

    const ProjectionResult a1 = algorithm1(p1, p2, r);
    const ProjectionResult a2 = algorithm2(p1, p2, r);
    const ProjectionResult lol = lol_projection(p1, p2, r, pooled);
    const double acc1 = PluginClassifier::train(train, a1).accuracy(test);
    const double acc2 = PluginClassifier::train(train, a2).accuracy(test);
    const double acc_lol = PluginClassifier::train(train, lol).accuracy(test);

    const bool kld_ok =
        a1.achieved_kld >= 10.0 * lol.achieved_kld && a2.achieved_kld >= 10.0 * lol.achieved_kld;
    const bool acc_ok = acc1 > acc_lol && acc2 > acc_lol;
    passed = passed && kld_ok && acc_ok;
    const KldBreakdown split = kld_split(p1, p2);
    detail << (large ? "large-mu" : "small-mu") << " (D_mu/D_Sigma=" << split.d_mu / split.d_sigma
           << "): KLD full " << kld(p1, p2) << " alg1 " << a1.achieved_kld << " alg2 "
           << a2.achieved_kld << " lol " << lol.achieved_kld << ", accuracy alg1 "
           << 100 * acc1 << "% alg2 " << 100 * acc2 << "% lol " << 100 * acc_lol << "%"
           << (kld_ok && acc_ok ? "" : " FAILED") << (large ? "; " : "");

    SweepOptions sweep_opts;
    sweep_opts.methods = {Method::Alg1, Method::Alg2, Method::Lol};
    sweep_opts.r_values = all_r(p1.dim());
    sweep_opts.pooled_cov = pooled;
    log.add(large ? "regime large-mu" : "regime small-mu", sweep_r(p1, p2, sweep_opts), p1.dim());
  }
  const double elapsed = timer.seconds();
  passed = passed && elapsed < 120.0;
  return finish(9, "d=6 to r=2 divergence and accuracy against LoL", passed, detail.str(), timer);
}

CriterionResult chernoff_consistency(const CheckOptions& opts) {
  const Timer timer;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::uint64_t seed = Rng::derive(opts.seed, kChernoff * 1000 + i);
    const auto d = static_cast<Index>(1 + i % 20);
    const Matrix sigma = random_spd({d, 0.1, 10.0, Rng::derive(seed, 1)});
    const GaussianParams p1{random_mean(d, 1.0, Rng::derive(seed, 2)), sigma};
    const GaussianParams p2{random_mean(d, 1.0, Rng::derive(seed, 3)), sigma};
    worst = std::max(worst, rel_error(chernoff_information(p1, p2), oracle_kld(p1, p2) / 4.0));
  }
  return finish(10, "Chernoff information is a quarter of the divergence", worst < 1e-6,
                "50 shared-covariance instances, max rel err " + sci(worst) + " (tol 1e-6)",
                timer);
}

std::vector<CriterionResult> run_property_checks(const CheckOptions& opts) {
  SweepLog log;
  std::vector<CriterionResult> out;
  const auto guarded = [&](int id, const std::string& name, const auto& fn) {
    const Timer timer;
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back(finish(id, name, false, std::string("threw: ") + e.what(), timer));
    }
  };
  guarded(1, "single direction", [&] { return single_direction_exactness(opts, log); });
  guarded(2, "additivity", [&] { return component_additivity(opts, log); });
  guarded(3, "equal-mean subspace", [&] { return equal_mean_equivalence(opts, log); });
  guarded(4, "order invariance", [&] { return order_invariance(opts, log); });
  guarded(5, "multiclass", [&] { return multiclass_preservation(opts, log); });
  guarded(7, "gradient", [&] { return gradient_correctness(opts); });
  guarded(8, "channel", [&] { return channel_reproduction(opts, log); });
  guarded(9, "classification", [&] { return classification_reproduction(opts, log); });
  guarded(10, "chernoff", [&] { return chernoff_consistency(opts); });
  guarded(6, "sweeps", [&] { return dpi_monotonicity(log); });
  std::sort(out.begin(), out.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return out;
}

std::string format_result(const CriterionResult& result) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << (result.passed ? "[PASS] " : "[FAIL] ") << result.id << " " << result.name << " ("
     << result.seconds << " s): " << result.detail;
  return os.str();
}

}  // namespace kldproj::checks
