#pragma once

// Lower bounds on minimax risk and the tail bounds used by the selection argument.

#include <optional>
#include <string>

#include "minimax/modulus.hpp"

namespace minimax {

struct AffinityReport {
  double rho = 0.0;
  /// Chi-square affinity of the mixture against the null, E exp(J rho^2).
  double affinity = 1.0;
  double upper_bound_used = 1.0;
  /// Parameters satisfy the hypotheses under which the upper bound is claimed.
  bool feasible = false;
};

enum class BoundKind { two_point, nearly_black, structured };

std::string to_string(BoundKind kind);

struct LowerBoundValue {
  double value = 0.0;
  BoundKind kind = BoundKind::two_point;
  double n = 0.0;
  double k = 0.0;
  bool infinite = false;
  std::optional<AffinityReport> affinity;
};

/// omega^2(n^{-1/2}, F) / 8 with omega over the union taken as the max over ordered pairs.
LowerBoundValue two_point_lower_bound(const UnionSpace& U, const LinearFunctional& c,
                                      const NoiseScale& n, const ModulusOptions& opts = {});
LowerBoundValue two_point_lower_bound(const ConvexSetSpec& F, const LinearFunctional& c,
                                      const NoiseScale& n, const ModulusOptions& opts = {});

/// 2k exp(-(gamma - 3)^2 / 32); gamma >= 3.
double selection_error_bound(double k, double gamma);

/// m^{1 - c/2}
double gaussian_max_tail_bound(double m, double c);

/// log C(n, k) through log-gamma.
double log_choose(double n, double k);

/// P(J = j) for |I cap I'| with I, I' independent uniform k-subsets of {1..n}.
double hypergeometric_pmf(double n, double k, double j);

/// 4 C(k, j) (k/n)^j (1 - k/n)^{k-j}
double feller_term_bound(double n, double k, double j);

/// sum_j P(J = j) e^{j rho^2}, bounded by 4 (1 - k/n + (k/n) e^{rho^2})^k when n >= 4, k < sqrt n.
AffinityReport hypergeometric_affinity(double n, double k, double rho);

/// 1 + 8e^2 - 4e sqrt(1 + 4e^2)
double nearly_black_c1();

/// (1/121) (k^2/n) ln(n/k^2); requires n >= 4 and 1 <= k^2 <= n.
LowerBoundValue nearly_black_lower_bound(double n, double k);

/// rho^2 = ln(3n/k) / k
double structured_rho(double n, double k);

/// (n - k)/n + (1/n) sum_{i=1..k} e^{i rho^2}, bounded by 1 + (k/n) e^{k rho^2}.
AffinityReport structured_affinity(double n, double k, double rho);

/// (1/18) (k/n) ln(3n/k); requires n >= 4 and 1 <= k < n.
LowerBoundValue structured_lower_bound(double n, double k);

/// max(0, theta^2 - A theta sqrt(risk_at_null))
double constrained_risk_bound(double theta, double risk_at_null, double affinity_bound);

}  // namespace minimax
