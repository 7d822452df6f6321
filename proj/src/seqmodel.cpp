#include "minimax/seqmodel.hpp"

#include <cmath>
#include <string>

namespace minimax {

NoiseScale::NoiseScale(double n) : n_(n) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("noise scale n must be positive and finite, got " + std::to_string(n));
  }
}

LinearFunctional::LinearFunctional(Vector c) : c_(std::move(c)) {
  if (!c_.allFinite()) throw std::invalid_argument("linear functional has non-finite weights");
}

LinearFunctional LinearFunctional::point(Eigen::Index m, Eigen::Index i, double scale) {
  if (i < 0 || i >= m) throw std::out_of_range("point functional index out of range");
  Vector c = Vector::Zero(m);
  c(i) = scale;
  return LinearFunctional(std::move(c));
}

bool LinearFunctional::is_uniform() const {
  if (c_.size() == 0) return true;
  return (c_.array() == c_(0)).all();
}

double apply_functional(const LinearFunctional& c, const Vector& f) {
  if (c.dim() != f.size()) {
    throw std::invalid_argument("functional length " + std::to_string(c.dim()) +
                                " does not match vector length " + std::to_string(f.size()));
  }
  return c.weights().dot(f);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32), 0x6d696e6du};
  return std::mt19937_64(seq);
}

void standard_normal(std::mt19937_64& rng, Eigen::Ref<Vector> z) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
}

Vector sample(const Vector& f, const NoiseScale& n, std::uint64_t seed) {
  return sample(f, n, seed, 0);
}

Vector sample(const Vector& f, const NoiseScale& n, std::uint64_t seed, std::uint64_t replicate) {
  auto rng = substream(seed, replicate);
  Vector z(f.size());
  standard_normal(rng, z);
  return f + n.sigma() * z;
}

}  // namespace minimax
