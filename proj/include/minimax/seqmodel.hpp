#pragma once

// Gaussian sequence model y_i = f_i + n^{-1/2} z_i and linear functionals.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace minimax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Calibration parameter of the noise: each coordinate has variance 1/n.
class NoiseScale {
 public:
  explicit NoiseScale(double n);

  double value() const { return n_; }
  double sigma() const { return 1.0 / std::sqrt(n_); }
  double variance() const { return 1.0 / n_; }

 private:
  double n_;
};

/// Tf = sum_i c_i f_i.
class LinearFunctional {
 public:
  explicit LinearFunctional(Vector c);

  static LinearFunctional ones(Eigen::Index m) { return LinearFunctional(Vector::Ones(m)); }
  static LinearFunctional point(Eigen::Index m, Eigen::Index i, double scale = 1.0);

  const Vector& weights() const { return c_; }
  Eigen::Index dim() const { return c_.size(); }

  /// True when every entry equals the first one.
  bool is_uniform() const;

 private:
  Vector c_;
};

double apply_functional(const LinearFunctional& c, const Vector& f);

/// Engine for replicate `replicate` of the experiment seeded with `seed`. Sub-streams are
/// derived from (seed, replicate) only, so replicates can be generated in any order.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replicate);

/// Fills `z` with i.i.d. standard normal draws from `rng`.
void standard_normal(std::mt19937_64& rng, Eigen::Ref<Vector> z);

/// One observation of the model. Pure function of (f, n, seed).
Vector sample(const Vector& f, const NoiseScale& n, std::uint64_t seed);

/// Replicate r of a seeded experiment; equals sample(f, n, .) on the (seed, r) sub-stream.
Vector sample(const Vector& f, const NoiseScale& n, std::uint64_t seed, std::uint64_t replicate);

}  // namespace minimax
