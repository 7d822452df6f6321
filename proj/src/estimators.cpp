#include "minimax/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <Eigen/Eigenvalues>

namespace minimax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool degenerate(const ModulusCurve& curve, double e0) {
  return curve(1e6 * e0).omega <= 0.0;
}

Vector common_member(const ConvexSetSpec& F, const ConvexSetSpec& G) {
  if (contains(G, F.witness())) return F.witness();
  if (contains(F, G.witness())) return G.witness();
  return Vector::Zero(F.dim());
}

template <class Fn>
std::pair<double, double> golden_min(Fn f, double a, double b, int iters = 80) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

struct GaussHermite {
  std::array<double, 64> x{};
  std::array<double, 64> w{};

  GaussHermite() {
    // Golub-Welsch on the Jacobi matrix of the physicists' Hermite polynomials.
    Matrix J = Matrix::Zero(64, 64);
    for (int i = 1; i < 64; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(J);
    for (int i = 0; i < 64; ++i) {
      x[i] = es.eigenvalues()(i);
      const double v = es.eigenvectors()(0, i);
      w[i] = v * v;  // normalised by sqrt(pi)
    }
  }
};

const GaussHermite& gauss_hermite() {
  static const GaussHermite rule;
  return rule;
}

}  // namespace

double AffineEstimator::bias(const Vector& f, const LinearFunctional& c) const {
  if (f.size() != w.size() || c.dim() != w.size()) throw std::invalid_argument("dimension mismatch");
  return a + (w - c.weights()).dot(f);
}

BiasControlled build_bias_controlled(const ConvexSetSpec& F, const ConvexSetSpec& G,
                                     const LinearFunctional& c, const NoiseScale& n, double V,
                                     const ModulusOptions& opts) {
  const auto curve = modulus_curve(F, G, c, opts);
  const double e0 = 1.0 / std::sqrt(n.value());
  BiasControlled out;
  if (degenerate(curve, e0)) {
    out.estimator.a = apply_functional(c, common_member(F, G));
    out.estimator.w = Vector::Zero(F.dim());
    out.tradeoff.V = V;
    out.tradeoff.case_tag = TradeoffCase::case_2b;
    return out;
  }
  out.tradeoff = bias_for_variance(curve, n.value(), V);
  if (out.tradeoff.infinite()) {
    throw std::domain_error("B(V) is unbounded at this variance: no affine estimator controls the bias");
  }
  if (!(out.tradeoff.eps_V > 0.0)) {
    throw std::domain_error("eps(V) = 0: the variance budget exceeds what bias control requires");
  }
  auto pair = ordered_modulus(F, G, c, out.tradeoff.eps_V, opts);
  if (!pair.attained) {
    throw NotAttainedError("modulus not attained; intersect the sets with a ball");
  }
  const Vector diff = pair.g_star - pair.f_star;
  const double len = diff.norm();
  const Vector u = len > 0.0 ? Vector(diff / len) : Vector::Zero(F.dim());
  const double s = std::sqrt(n.value() * V);
  const Vector mid = 0.5 * (pair.f_star + pair.g_star);
  out.estimator.w = s * u;
  out.estimator.a = apply_functional(c, mid) - s * u.dot(mid);
  out.extremal = std::move(pair);
  return out;
}

MinimaxLinear build_minimax_linear(const ConvexSetSpec& F, const LinearFunctional& c,
                                   const NoiseScale& n, const ModulusOptions& opts) {
  if (c.dim() != F.dim()) throw std::invalid_argument("dimension mismatch");
  const double nv = n.value();
  const double e0 = 1.0 / std::sqrt(nv);
  MinimaxLinear out;
  if (F.is_subspace() && !F.ball() && !opts.force_numeric) {
    out.estimator.w = Vector::Zero(F.dim());
    for (Index i : F.support().indices()) out.estimator.w(i) = c.weights()(i);
    out.V = out.estimator.w.squaredNorm() / nv;
    out.max_mse = out.V;
    out.omega = std::sqrt(out.V);
    out.M = out.omega > 0.0 ? 1.0 : 0.0;
    return out;
  }
  const auto curve = modulus_curve(F, F, c, opts);
  out.omega = curve(e0).omega;
  if (degenerate(curve, e0)) {
    out.estimator.a = apply_functional(c, F.witness());
    out.estimator.w = Vector::Zero(F.dim());
    return out;
  }
  // B^2 + V is convex in s = sqrt(nV); w = c is unbiased, so s <= ||c||.
  const auto objective = [&](double s) {
    const auto tp = bias_for_variance(curve, nv, s * s / nv);
    return tp.infinite() ? kInf : tp.B * tp.B + s * s / nv;
  };
  const double smax = c.weights().norm();
  auto [s, val] = golden_min(objective, 0.0, smax);
  if (objective(smax) < val) s = smax;
  auto tp = bias_for_variance(curve, nv, s * s / nv);
  if (tp.case_tag == TradeoffCase::case_2b) {
    // Slide down to the edge of the zero-bias region.
    double lo = 0.0, hi = s;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (bias_for_variance(curve, nv, mid * mid / nv).case_tag == TradeoffCase::case_2b) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    s = lo;
  }
  const auto built = build_bias_controlled(F, F, c, n, s * s / nv, opts);
  out.estimator = built.estimator;
  out.V = s * s / nv;
  out.B = built.tradeoff.B;
  out.max_mse = out.B * out.B + out.V;
  out.M = out.omega > 0.0 ? std::sqrt(out.max_mse) / out.omega : 0.0;
  return out;
}

bool HullLinearResult::within_bracket() const {
  const double slack = 1e-9 * std::max(1.0, bracket_upper);
  return value >= bracket_lower - slack && value <= bracket_upper + slack;
}

HullLinearResult hull_linear_minimax(const UnionSpace& U, const LinearFunctional& c,
                                     const NoiseScale& n, const ModulusOptions& opts) {
  const double nv = n.value();
  const double e0 = 1.0 / std::sqrt(nv);
  HullLinearResult out;
  const auto omega = [&](double eps) { return hull_modulus(U, c, eps, opts).omega; };
  const double w2 = omega(2.0 * e0);
  out.bracket_lower = w2 * w2 / 8.0;
  out.bracket_upper = w2 * w2 / 4.0;
  const bool closed = !opts.force_numeric &&
                      std::all_of(U.members().begin(), U.members().end(), [](const ConvexSetSpec& s) {
                        return s.is_subspace() && !s.ball();
                      });
  if (closed) {
    // omega = L eps, so the ratio increases to L^2 / n as eps grows.
    const double L = w2 / (2.0 * e0);
    out.value = L * L / nv;
    out.attained = false;
    out.eps_at = kInf;
    return out;
  }
  const auto ratio = [&](double log_eps) {
    const double eps = std::exp(log_eps);
    const double w = omega(eps);
    return w * w / (4.0 + nv * eps * eps);
  };
  const double lo = std::log(1e-4 * e0), hi = std::log(1e4 * e0);
  const int steps = 64;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= steps; ++i) {
    const double v = ratio(lo + (hi - lo) * i / steps);
    if (v > best_v) best_v = v, best = i;
  }
  const double a = lo + (hi - lo) * std::max(best - 1, 0) / steps;
  const double b = lo + (hi - lo) * std::min(best + 1, steps) / steps;
  const auto [x, v] = golden_min([&](double t) { return -ratio(t); }, a, b, 60);
  out.value = std::max(best_v, -v);
  out.eps_at = -v >= best_v ? std::exp(x) : std::exp(lo + (hi - lo) * best / steps);
  out.attained = best < steps;
  return out;
}

double normal_abs_moment(double b, double s, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("loss power must be >= 1");
  if (s < 0.0) throw std::invalid_argument("scale must be >= 0");
  if (s == 0.0) return std::pow(std::abs(b), p);
  if (p == 2.0) return b * b + s * s;
  const double pi = std::acos(-1.0);
  if (std::floor(p) == p && static_cast<long>(p) % 2 == 0 && p <= 120.0) {
    const auto& gh = gauss_hermite();
    double acc = 0.0;
    for (int i = 0; i < 64; ++i) acc += gh.w[i] * std::pow(b + s * std::sqrt(2.0) * gh.x[i], p);
    return acc;
  }
  const double z = b / s;
  return std::pow(s, p) * std::pow(2.0, p / 2.0) * boost::math::tgamma((p + 1.0) / 2.0) /
         std::sqrt(pi) * boost::math::hypergeometric_1F1(-p / 2.0, 0.5, -z * z / 2.0);
}

double analytic_risk(const AffineEstimator& e, const Vector& f, const LinearFunctional& c,
                     const NoiseScale& n, double p) {
  return normal_abs_moment(e.bias(f, c), std::sqrt(e.variance(n)), p);
}

}  // namespace minimax
