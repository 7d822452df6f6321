#include "minimax/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace minimax {

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::two_point: return "two_point";
    case BoundKind::nearly_black: return "nearly_black";
    case BoundKind::structured: return "structured";
  }
  return "?";
}

LowerBoundValue two_point_lower_bound(const UnionSpace& U, const LinearFunctional& c,
                                      const NoiseScale& n, const ModulusOptions& opts) {
  LowerBoundValue out;
  out.kind = BoundKind::two_point;
  out.n = n.value();
  const double w = union_modulus(U, c, n.sigma(), opts).omega;
  out.infinite = !std::isfinite(w);
  out.value = w * w / 8.0;
  return out;
}

LowerBoundValue two_point_lower_bound(const ConvexSetSpec& F, const LinearFunctional& c,
                                      const NoiseScale& n, const ModulusOptions& opts) {
  LowerBoundValue out;
  out.kind = BoundKind::two_point;
  out.n = n.value();
  const double w = ordered_modulus(F, F, c, n.sigma(), opts).omega;
  out.infinite = !std::isfinite(w);
  out.value = w * w / 8.0;
  return out;
}

double selection_error_bound(double k, double gamma) {
  if (!(gamma >= 3.0)) throw std::domain_error("gamma must be at least 3");
  if (!(k >= 1.0)) throw std::domain_error("set count must be positive");
  const double g = gamma - 3.0;
  return 2.0 * k * std::exp(-g * g / 32.0);
}

double gaussian_max_tail_bound(double m, double c) {
  if (!(m >= 1.0)) throw std::domain_error("need at least one statistic");
  if (!(c > 0.0)) throw std::domain_error("c must be positive");
  return std::pow(m, 1.0 - c / 2.0);
}

double log_choose(double n, double k) {
  if (k < 0.0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double hypergeometric_pmf(double n, double k, double j) {
  return std::exp(log_choose(k, j) + log_choose(n - k, k - j) - log_choose(n, k));
}

double feller_term_bound(double n, double k, double j) {
  const double q = k / n;
  return 4.0 * std::exp(log_choose(k, j) + j * std::log(q) + (k - j) * std::log1p(-q));
}

AffinityReport hypergeometric_affinity(double n, double k, double rho) {
  if (!(k >= 1.0 && 2.0 * k <= n) || std::floor(k) != k || std::floor(n) != n) {
    throw std::domain_error("hypergeometric affinity needs integers 1 <= k <= n/2");
  }
  AffinityReport out;
  out.rho = rho;
  const double r2 = rho * rho;
  // Terms are summed in the log domain relative to the largest one.
  double lmax = -std::numeric_limits<double>::infinity();
  for (double j = 0; j <= k; ++j) {
    lmax = std::max(lmax, log_choose(k, j) + log_choose(n - k, k - j) - log_choose(n, k) + j * r2);
  }
  double acc = 0.0;
  for (double j = 0; j <= k; ++j) {
    acc += std::exp(log_choose(k, j) + log_choose(n - k, k - j) - log_choose(n, k) + j * r2 - lmax);
  }
  out.affinity = std::exp(lmax) * acc;
  const double q = k / n;
  out.upper_bound_used = 4.0 * std::pow(1.0 - q + q * std::exp(r2), k);
  out.feasible = n >= 4.0 && k < std::sqrt(n);
  return out;
}

double nearly_black_c1() {
  const double e = std::exp(1.0);
  return 1.0 + 8.0 * e * e - 4.0 * e * std::sqrt(1.0 + 4.0 * e * e);
}

LowerBoundValue nearly_black_lower_bound(double n, double k) {
  if (!(n >= 4.0) || !(k >= 1.0) || k * k > n) {
    throw std::domain_error("nearly-black bound needs n >= 4 and 1 <= k^2 <= n");
  }
  LowerBoundValue out;
  out.kind = BoundKind::nearly_black;
  out.n = n;
  out.k = k;
  const double r = k * k / n;
  out.value = r * std::log(n / (k * k)) / 121.0;
  if (2.0 * k <= n && std::floor(k) == k && std::floor(n) == n) {
    out.affinity = hypergeometric_affinity(n, k, std::sqrt(std::log(n / (k * k))));
  }
  return out;
}

double structured_rho(double n, double k) {
  if (!(k >= 1.0 && k < n)) throw std::domain_error("structured rho needs 1 <= k < n");
  return std::sqrt(std::log(3.0 * n / k) / k);
}

AffinityReport structured_affinity(double n, double k, double rho) {
  if (!(k >= 1.0 && k < n) || std::floor(k) != k) {
    throw std::domain_error("structured affinity needs integer 1 <= k < n");
  }
  AffinityReport out;
  out.rho = rho;
  const double r2 = rho * rho;
  double acc = (n - k) / n;
  for (double i = 1; i <= k; ++i) acc += std::exp(i * r2) / n;
  out.affinity = acc;
  out.upper_bound_used = 1.0 + (k / n) * std::exp(k * r2);
  out.feasible = n >= 4.0;
  return out;
}

LowerBoundValue structured_lower_bound(double n, double k) {
  if (!(n >= 4.0) || !(k >= 1.0 && k < n)) {
    throw std::domain_error("structured bound needs n >= 4 and 1 <= k < n");
  }
  LowerBoundValue out;
  out.kind = BoundKind::structured;
  out.n = n;
  out.k = k;
  out.value = (k / n) * std::log(3.0 * n / k) / 18.0;
  if (std::floor(k) == k) out.affinity = structured_affinity(n, k, structured_rho(n, k));
  return out;
}

double constrained_risk_bound(double theta, double risk_at_null, double affinity_bound) {
  if (theta < 0.0 || risk_at_null < 0.0 || affinity_bound < 0.0) {
    throw std::domain_error("constrained risk bound inputs must be nonnegative");
  }
  return std::max(0.0, theta * theta - affinity_bound * theta * std::sqrt(risk_at_null));
}

}  // namespace minimax
