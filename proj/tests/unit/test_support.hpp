#pragma once

// Instance generators for tests. Deliberately independent of kldproj::synth
// so generator bugs cannot mask projection bugs.

#include <random>

#include "kldproj/gaussian.hpp"

namespace testing_support {

using kldproj::GaussianParams;
using kldproj::Matrix;
using kldproj::Vector;

class Gen {
 public:
  explicit Gen(unsigned long long seed) : engine_(seed) {}

  double normal() { return dist_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  Vector vector(Eigen::Index n) { return matrix(n, 1); }

  // X X^T / d + shift I: well conditioned for moderate d.
  Matrix spd(Eigen::Index d, double shift = 0.5) {
    const Matrix x = matrix(d, d);
    Matrix s = x * x.transpose() / static_cast<double>(d);
    s.diagonal().array() += shift;
    return 0.5 * (s + s.transpose());
  }

  Matrix symmetric(Eigen::Index d) {
    const Matrix x = matrix(d, d);
    return 0.5 * (x + x.transpose());
  }

  GaussianParams gaussian(Eigen::Index d, double mean_scale = 1.0) {
    return {mean_scale * vector(d), spd(d)};
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace testing_support
