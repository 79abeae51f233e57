#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kldproj/gaussian.hpp"

namespace kldproj {

struct AscentOptions {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iters = 5000;
  /// A plateau is `patience` iterations in which the best objective improved
  /// by less than rel_tol (relative). Each plateau restarts from the best
  /// iterate with half the learning rate; the run stops at the plateau after
  /// max_lr_halvings restarts.
  double rel_tol = 1e-9;
  int patience = 50;
  int max_lr_halvings = 6;
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument if any field is out of range.
void validate(const AscentOptions& opts);

struct AscentTrace {
  struct Point {
    int iteration;
    double objective;
  };
  /// One entry per accepted step (iteration 0 is the starting point).
  std::vector<Point> iterates;
  /// Best matrix visited; its objective is the last entry's running best.
  Matrix final_matrix;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  bool converged = false;
  int iterations_run = 0;
  /// "plateau", "max_iters" or "singular_boundary".
  std::string stop_reason;
};

/// Gradient of kld_projected(A, p1, p2) with respect to A (r x d).
Matrix kld_gradient(const Matrix& a, const GaussianParams& p1, const GaussianParams& p2);

/// Adam ascent on kld_projected over unconstrained r x d matrices, started
/// from a0 with its rows scaled to unit norm. The returned final_matrix is
/// the best iterate, so the final objective never falls below the initial
/// one.
AscentTrace gradient_ascent(const Matrix& a0, const GaussianParams& p1, const GaussianParams& p2,
                            const AscentOptions& opts = {});

/// r x d standard-normal matrix with unit-norm rows, drawn from `seed`.
Matrix random_initialization(Index r, Index d, std::uint64_t seed);

}  // namespace kldproj
