#pragma once

// Affine estimators a + w.y: the bias-controlled construction from an extremal pair, minimax
// linear estimators for a single convex set, the convex-hull linear benchmark and exact risks.

#include <optional>
#include <stdexcept>

#include "minimax/modulus.hpp"

namespace minimax {

struct AffineEstimator {
  double a = 0.0;
  Vector w;

  double estimate(const Vector& y) const { return a + w.dot(y); }
  /// E estimate - Tf = a + (w - c).f
  double bias(const Vector& f, const LinearFunctional& c) const;
  double variance(const NoiseScale& n) const { return w.squaredNorm() / n.value(); }
};

/// Raised when the extremal pair needed by the construction does not exist; intersect the sets
/// with a ball to obtain an attained modulus.
class NotAttainedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BiasControlled {
  AffineEstimator estimator;
  TradeoffPoint tradeoff;
  /// Extremal pair at eps_V. Empty for the constant estimator of a degenerate pair.
  std::optional<OrderedModulusResult> extremal;
};

/// Estimator with variance V, bias at most B(V) over F and at least -B(V) over G.
/// When omega vanishes identically the constant estimator T(common point) is returned.
BiasControlled build_bias_controlled(const ConvexSetSpec& F, const ConvexSetSpec& G,
                                     const LinearFunctional& c, const NoiseScale& n, double V,
                                     const ModulusOptions& opts = {});

struct MinimaxLinear {
  AffineEstimator estimator;
  double V = 0.0;
  double B = 0.0;
  /// Worst-case mean squared error over F, B^2 + V.
  double max_mse = 0.0;
  /// sqrt(max_mse) / omega(n^{-1/2}, F); zero when omega vanishes.
  double M = 0.0;
  double omega = 0.0;
};

/// Minimises B(V, F, F)^2 + V over V. Coordinate subspaces give the unbiased projection
/// estimator sum_{i in I} c_i y_i with M = 1.
MinimaxLinear build_minimax_linear(const ConvexSetSpec& F, const LinearFunctional& c,
                                   const NoiseScale& n, const ModulusOptions& opts = {});

struct HullLinearResult {
  /// sup_eps omega^2(eps, hull) / (4n) / (1/n + eps^2/4)
  double value = 0.0;
  /// False when the supremum is only approached as eps grows without bound.
  bool attained = true;
  double eps_at = 0.0;
  /// omega^2(2/sqrt n, hull) / 8 and / 4.
  double bracket_lower = 0.0;
  double bracket_upper = 0.0;
  bool within_bracket() const;
};

HullLinearResult hull_linear_minimax(const UnionSpace& U, const LinearFunctional& c,
                                     const NoiseScale& n, const ModulusOptions& opts = {});

/// E |a + w.y - Tf|^p under f. p = 2 exactly; even p by 64-node Gauss-Hermite; other p through
/// the Kummer function form of the absolute normal moment.
double analytic_risk(const AffineEstimator& e, const Vector& f, const LinearFunctional& c,
                     const NoiseScale& n, double p);

/// E |b + s Z|^p for standard normal Z.
double normal_abs_moment(double b, double s, double p);

}  // namespace minimax
