#include "kldproj/refine.hpp"

#include <cmath>
#include <sstream>

#include "kldproj/error.hpp"
#include "kldproj/synth.hpp"

namespace kldproj {

namespace {

Eigen::LLT<Matrix> factor_projected(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "projected covariance is not positive definite");
  }
  return llt;
}

}  // namespace

void validate(const AscentOptions& opts) {
  const bool ok = opts.learning_rate > 0.0 && opts.beta1 > 0.0 && opts.beta1 < 1.0 &&
                  opts.beta2 > 0.0 && opts.beta2 < 1.0 && opts.epsilon > 0.0 &&
                  opts.max_iters >= 0 && opts.rel_tol > 0.0 && opts.patience >= 1 &&
                  opts.max_lr_halvings >= 0;
  if (!ok) throw Error(ErrorCode::InvalidArgument, "ascent options out of range");
}

Matrix kld_gradient(const Matrix& a, const GaussianParams& p1, const GaussianParams& p2) {
  if (a.cols() != p1.dim() || p1.dim() != p2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient: projection and Gaussians disagree in size");
  }
  const Vector delta = p2.mean - p1.mean;
  const Matrix b1 = a * p1.covariance;  // A Sigma1
  const Matrix b2 = a * p2.covariance;  // A Sigma2
  const Matrix m1 = symmetrize(b1 * a.transpose());
  const Matrix m2 = symmetrize(b2 * a.transpose());
  const auto llt1 = factor_projected(m1);
  const auto llt2 = factor_projected(m2);

  const Matrix x2 = llt2.solve(b2);              // M2^{-1} A Sigma2
  const Matrix x1 = llt1.solve(b1);              // M1^{-1} A Sigma1
  const Matrix y = llt2.solve(b1);               // M2^{-1} A Sigma1
  const Matrix z = llt2.solve(m1 * x2);          // M2^{-1} M1 M2^{-1} A Sigma2
  const Vector w = llt2.solve(a * delta);        // M2^{-1} A delta

  return x2 - x1 + y - z + w * delta.transpose() - w * (w.transpose() * b2);
}

Matrix random_initialization(Index r, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a = rng.normal_matrix(r, d);
  for (Index i = 0; i < r; ++i) a.row(i).normalize();
  return a;
}

AscentTrace gradient_ascent(const Matrix& a0, const GaussianParams& p1, const GaussianParams& p2,
                            const AscentOptions& opts) {
  validate(opts);
  require_finite(a0, "initial projection");
  if (numerical_rank(a0) < a0.rows()) {
    throw Error(ErrorCode::RankDeficient, "initial projection does not have full row rank");
  }

  const auto objective = [&](const Matrix& a) { return kld_projected(a, p1, p2); };

  AscentTrace trace;
  // Unit rows leave the objective unchanged and make the learning rate a
  // relative step size whatever the scale of a0.
  Matrix a = a0.rowwise().normalized();
  double current = objective(a);
  trace.initial_objective = current;
  trace.iterates.push_back({0, current});
  trace.final_matrix = a;
  double best = current;
  std::vector<double> best_history{best};

  Matrix first_moment = Matrix::Zero(a.rows(), a.cols());
  Matrix second_moment = Matrix::Zero(a.rows(), a.cols());
  double beta1_power = 1.0;
  double beta2_power = 1.0;
  double learning_rate = opts.learning_rate;
  int halvings = 0;
  int window_start = 0;  // iteration at which the current step size began
  trace.stop_reason = "max_iters";

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const Matrix grad = kld_gradient(a, p1, p2);
    first_moment = opts.beta1 * first_moment + (1.0 - opts.beta1) * grad;
    second_moment = opts.beta2 * second_moment + (1.0 - opts.beta2) * grad.cwiseAbs2();
    beta1_power *= opts.beta1;
    beta2_power *= opts.beta2;
    const Matrix m_hat = first_moment / (1.0 - beta1_power);
    const Matrix v_hat = second_moment / (1.0 - beta2_power);
    const Matrix step =
        learning_rate * (m_hat.array() / (v_hat.array().sqrt() + opts.epsilon)).matrix();

    // Halve the step while it leaves the set where both projected
    // covariances are positive definite.
    bool accepted = false;
    double scale = 1.0;
    Matrix candidate;
    double value = 0.0;
    for (int attempt = 0; attempt <= 20 && !accepted; ++attempt, scale *= 0.5) {
      candidate = a + scale * step;
      try {
        value = objective(candidate);
        accepted = std::isfinite(value);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite && e.code() != ErrorCode::RankDeficient &&
            e.code() != ErrorCode::NegativeDivergence) {
          throw;
        }
      }
    }
    trace.iterations_run = iter;
    if (!accepted) {
      trace.stop_reason = "singular_boundary";
      trace.converged = false;
      break;
    }

    a = std::move(candidate);
    current = value;
    trace.iterates.push_back({iter, current});
    if (current > best) {
      best = current;
      trace.final_matrix = a;
    }
    best_history.push_back(best);

    if (iter - window_start >= opts.patience) {
      const double gain = best - best_history[static_cast<std::size_t>(iter - opts.patience)];
      if (gain <= opts.rel_tol * std::max(1.0, std::abs(best))) {
        if (halvings == opts.max_lr_halvings) {
          trace.converged = true;
          trace.stop_reason = "plateau";
          break;
        }
        // Restart from the best point with a smaller step and fresh moments.
        ++halvings;
        learning_rate *= 0.5;
        a = trace.final_matrix;
        first_moment.setZero();
        second_moment.setZero();
        beta1_power = 1.0;
        beta2_power = 1.0;
        window_start = iter;
      }
    }
  }
  trace.final_objective = best;
  return trace;
}

}  // namespace kldproj
