#pragma once

// Ordered modulus of continuity
//
//   omega(eps, F, G) = sup { Tg - Tf : ||g - f|| <= eps, f in F, g in G }
//
// and the bias/variance tradeoff curves built from it.

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minimax/barrier.hpp"
#include "minimax/convex_sets.hpp"

namespace minimax {

enum class ModulusMethod { closed_form, numeric };

std::string to_string(ModulusMethod m);

struct OrderedModulusResult {
  double epsilon = 0.0;
  double omega = 0.0;
  Vector f_star;  // in F
  Vector g_star;  // in G
  /// (g_star - f_star) / epsilon, zero when epsilon = 0.
  Vector u;
  /// False when the numeric optimum leans on the artificial bound placed on unbounded sets.
  bool attained = true;
  ModulusMethod method = ModulusMethod::closed_form;
  /// d omega / d eps at epsilon (a supergradient; dual multiplier for the numeric branch).
  double slope = std::numeric_limits<double>::quiet_NaN();
};

struct ModulusOptions {
  BarrierOptions barrier{};
  /// Unbounded sets are solved inside a ball of radius factor * (1 + eps + ||witness||).
  double implicit_radius_factor = 1e3;
  /// Use the conic solver even when a closed form exists.
  bool force_numeric = false;
};

OrderedModulusResult ordered_modulus(const ConvexSetSpec& F, const ConvexSetSpec& G,
                                     const LinearFunctional& c, double eps,
                                     const ModulusOptions& opts = {});

/// Modulus over the union: max over ordered member pairs (i, j), including i = j.
struct UnionModulus {
  double omega = 0.0;
  Index i = 0;
  Index j = 0;
};

UnionModulus union_modulus(const UnionSpace& U, const LinearFunctional& c, double eps,
                           const ModulusOptions& opts = {});

/// omega(eps, hull(U)). Closed form (eps * ||c restricted to the union of supports||) for unions
/// of unbounded subspaces; otherwise the hull is lifted with one perspective copy per member.
OrderedModulusResult hull_modulus(const UnionSpace& U, const LinearFunctional& c, double eps,
                                  const ModulusOptions& opts = {});

// ---------------------------------------------------------------------------------------------
// Bias/variance tradeoff.

struct ModulusSample {
  double omega = 0.0;
  double slope = std::numeric_limits<double>::quiet_NaN();
};

/// eps -> omega(eps). Any concave nondecreasing curve with omega(0) = 0 is admissible.
using ModulusCurve = std::function<ModulusSample(double)>;

/// Memoised curve of an ordered modulus.
ModulusCurve modulus_curve(const ConvexSetSpec& F, const ConvexSetSpec& G, const LinearFunctional& c,
                           const ModulusOptions& opts = {});

enum class TradeoffCase { case_1a, case_1b, case_2a, case_2b };

std::string to_string(TradeoffCase c);

struct TradeoffPoint {
  double V = 0.0;
  /// +infinity when the supremum is unbounded.
  double B = 0.0;
  double eps_V = 0.0;
  TradeoffCase case_tag = TradeoffCase::case_1a;

  bool infinite() const { return B == std::numeric_limits<double>::infinity(); }
};

struct TradeoffOptions {
  /// Relative tolerance deciding when phi(eps) = omega(eps) - sqrt(nV) eps is flat or zero.
  double flat_tol = 1e-9;
  /// Bracket expansion gives up (declares B infinite) beyond ceiling * n^{-1/2}.
  double ceiling = 1e8;
};

/// B(V) = 1/2 sup_{eps > 0} (omega(eps) - sqrt(nV) eps) and the smallest maximiser eps(V).
TradeoffPoint bias_for_variance(const ModulusCurve& omega, double n, double V,
                                const TradeoffOptions& opts = {});
TradeoffPoint bias_for_variance(const ConvexSetSpec& F, const ConvexSetSpec& G,
                                const LinearFunctional& c, const NoiseScale& n, double V,
                                const ModulusOptions& mopts = {});

/// V(B) = sup_{eps > 0} ([omega(eps) - 2B]_+)^2 / (n eps^2).
double variance_for_bias(const ModulusCurve& omega, double n, double B,
                         const TradeoffOptions& opts = {});
double variance_for_bias(const ConvexSetSpec& F, const ConvexSetSpec& G, const LinearFunctional& c,
                         const NoiseScale& n, double B, const ModulusOptions& mopts = {});

struct ConcavityViolation {
  std::string rule;  // "concavity", "scaling" or "monotone"
  double eps1 = 0.0;
  double eps2 = 0.0;
  double lambda = 0.0;
  double excess = 0.0;
};

struct ConcavityReport {
  std::size_t checks = 0;
  std::vector<ConcavityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks omega(l e1 + (1-l) e2) >= l omega(e1) + (1-l) omega(e2) - tol for l in {1/4, 1/2, 3/4},
/// omega(D e) <= D omega(e) + tol and monotonicity over all sample pairs.
ConcavityReport concavity_check(const ModulusCurve& omega, const std::vector<double>& eps_samples,
                                double tol = 1e-8);

}  // namespace minimax
