#include "minimax/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace minimax {

std::string to_string(ModulusMethod m) {
  return m == ModulusMethod::closed_form ? "closed_form" : "numeric";
}

std::string to_string(TradeoffCase c) {
  switch (c) {
    case TradeoffCase::case_1a: return "1a";
    case TradeoffCase::case_1b: return "1b";
    case TradeoffCase::case_2a: return "2a";
    case TradeoffCase::case_2b: return "2b";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(const ConvexSetSpec& F, const ConvexSetSpec& G, const LinearFunctional& c) {
  if (F.dim() != G.dim() || F.dim() != c.dim()) {
    throw std::invalid_argument("sets and functional must share the ambient dimension");
  }
}

double restricted_norm(const Vector& c, const IndexSet& s) {
  double acc = 0.0;
  for (Index i : s.indices()) acc += c(i) * c(i);
  return std::sqrt(acc);
}

// A convex set written over local variables x with ambient point E x.
struct Block {
  Matrix E;
  std::vector<SparseRow> rows;
  std::vector<ConeConstraint> cones;
  std::vector<bool> implicit;  // per cone: artificial bound on an unbounded set
  Vector start;

  Index size() const { return E.cols(); }
};

Matrix selection(const IndexSet& support, Index m) {
  Matrix E = Matrix::Zero(m, support.size());
  for (Index t = 0; t < support.size(); ++t) E(support.indices()[t], t) = 1.0;
  return E;
}

Vector restrict_coords(const IndexSet& support, const Vector& x) {
  Vector out(support.size());
  for (Index t = 0; t < support.size(); ++t) out(t) = x(support.indices()[t]);
  return out;
}

Block lift_set(const ConvexSetSpec& s, double implicit_radius, const Vector& start) {
  Block b;
  const Index d = s.support().size();
  b.E = selection(s.support(), s.dim());
  for (const auto& h : s.halfspaces()) b.rows.push_back(SparseRow{h.idx, h.val, h.b});
  ConeConstraint ball;
  ball.P = Matrix::Identity(d, d);
  ball.p = Vector::Zero(d);
  ball.d = s.ball() ? *s.ball() : implicit_radius;
  b.cones.push_back(std::move(ball));
  b.implicit.push_back(!s.ball().has_value());
  b.start = restrict_coords(s.support(), start);
  return b;
}

// Perspective lifting of the hull of the members: f = sum_i y_i with y_i in lambda_i S_i,
// lambda on the simplex (the last weight is eliminated).
Block lift_hull(const UnionSpace& U, double implicit_radius) {
  const Index K = U.size();
  const Index m = U.dim();
  std::vector<Index> off(static_cast<std::size_t>(K + 1), 0);
  for (Index i = 0; i < K; ++i) off[i + 1] = off[i] + U[i].support().size();
  const Index lam0 = off[K];
  const Index total = lam0 + (K - 1);
  Block b;
  b.E = Matrix::Zero(m, total);
  b.start = Vector::Zero(total);
  for (Index i = 0; i < K; ++i) {
    const auto& s = U[i];
    const Index d = s.support().size();
    b.E.block(0, off[i], m, d) = selection(s.support(), m);
    b.start.segment(off[i], d) = restrict_coords(s.support(), s.witness()) / static_cast<double>(K);
    const bool last = i == K - 1;
    for (const auto& h : s.halfspaces()) {
      SparseRow r;
      for (std::size_t t = 0; t < h.idx.size(); ++t) {
        r.idx.push_back(off[i] + h.idx[t]);
        r.val.push_back(h.val[t]);
      }
      if (!last) {
        r.idx.push_back(lam0 + i);
        r.val.push_back(-h.b);
        r.b = 0.0;
      } else {
        for (Index j = 0; j < K - 1; ++j) {
          r.idx.push_back(lam0 + j);
          r.val.push_back(h.b);
        }
        r.b = h.b;
      }
      b.rows.push_back(std::move(r));
    }
    ConeConstraint ball;
    ball.P = Matrix::Zero(d, total);
    ball.P.block(0, off[i], d, d) = Matrix::Identity(d, d);
    ball.p = Vector::Zero(d);
    ball.c = Vector::Zero(total);
    const double R = s.ball() ? *s.ball() : implicit_radius;
    if (!last) {
      ball.c(lam0 + i) = R;
      ball.d = 0.0;
    } else {
      ball.c.tail(K - 1).setConstant(-R);
      ball.d = R;
    }
    b.cones.push_back(std::move(ball));
    b.implicit.push_back(!s.ball().has_value());
  }
  SparseRow simplex;
  for (Index j = 0; j < K - 1; ++j) {
    b.rows.push_back(SparseRow{{lam0 + j}, {-1.0}, 0.0});
    simplex.idx.push_back(lam0 + j);
    simplex.val.push_back(1.0);
    b.start(lam0 + j) = 1.0 / static_cast<double>(K);
  }
  simplex.b = 1.0;
  b.rows.push_back(std::move(simplex));
  return b;
}

void append_block(ConicProgram& prog, const Block& b, Index offset, std::vector<bool>& implicit) {
  const Index N = prog.dim;
  for (const auto& r : b.rows) {
    SparseRow s = r;
    for (auto& i : s.idx) i += offset;
    prog.rows.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < b.cones.size(); ++k) {
    const auto& c = b.cones[k];
    ConeConstraint s;
    s.P = Matrix::Zero(c.P.rows(), N);
    s.P.middleCols(offset, b.size()) = c.P;
    s.p = c.p;
    if (c.c.size() > 0) {
      s.c = Vector::Zero(N);
      s.c.segment(offset, b.size()) = c.c;
    }
    s.d = c.d;
    prog.cones.push_back(std::move(s));
    implicit.push_back(b.implicit[k]);
  }
}

// The common-point heuristics used to seed epsilon = 0 and the numeric start.
std::optional<Vector> common_point(const ConvexSetSpec& F, const ConvexSetSpec& G) {
  if (contains(G, F.witness())) return F.witness();
  if (contains(F, G.witness())) return G.witness();
  const Vector origin = Vector::Zero(F.dim());
  if (contains(F, origin) && contains(G, origin)) return origin;
  return std::nullopt;
}

// Map each g-block column to an identical f-block column, or -1.
std::vector<Index> shared_columns(const Block& fb, const Block& gb) {
  std::vector<Index> sub(gb.size(), -1);
  if (fb.E.rows() != gb.E.rows()) return sub;
  if (fb.E.cols() == gb.E.cols() && fb.E == gb.E) {
    for (Index k = 0; k < gb.size(); ++k) sub[k] = k;
    return sub;
  }
  auto unit_row = [](const Matrix& E, Index k) -> Index {
    Index row = -1;
    for (Index i = 0; i < E.rows(); ++i) {
      if (E(i, k) == 0.0) continue;
      if (E(i, k) != 1.0 || row >= 0) return -2;
      row = i;
    }
    return row;
  };
  std::vector<Index> f_of_row(fb.E.rows(), -1);
  for (Index k = 0; k < fb.size(); ++k) {
    const Index r = unit_row(fb.E, k);
    if (r == -2) return sub;
    if (r >= 0) f_of_row[r] = k;
  }
  std::vector<Index> out(gb.size(), -1);
  for (Index k = 0; k < gb.size(); ++k) {
    const Index r = unit_row(gb.E, k);
    if (r == -2) return sub;
    if (r >= 0) out[k] = f_of_row[r];
  }
  return out;
}

// Rewrite prog in z with x_g[k] = z_g[k] + z_f[sub[k]], so g - f on shared columns is a variable.
void substitute_difference(ConicProgram& prog, Index off, const std::vector<Index>& sub) {
  for (auto& row : prog.rows) {
    std::map<Index, double> acc;
    for (std::size_t t = 0; t < row.idx.size(); ++t) {
      acc[row.idx[t]] += row.val[t];
      const Index j = row.idx[t] - off;
      if (j >= 0 && sub[j] >= 0) acc[sub[j]] += row.val[t];
    }
    row.idx.clear();
    row.val.clear();
    for (const auto& [i, v] : acc) {
      if (v == 0.0) continue;
      row.idx.push_back(i);
      row.val.push_back(v);
    }
  }
  auto fold = [&](auto&& col) {
    for (std::size_t j = 0; j < sub.size(); ++j)
      if (sub[j] >= 0) col(sub[j]) += col(off + Index(j));
  };
  fold([&](Index i) -> double& { return prog.objective(i); });
  for (auto& cone : prog.cones) {
    for (std::size_t j = 0; j < sub.size(); ++j)
      if (sub[j] >= 0) cone.P.col(sub[j]) += cone.P.col(off + Index(j));
    if (cone.c.size() > 0) fold([&](Index i) -> double& { return cone.c(i); });
  }
}

OrderedModulusResult solve_pair(const Block& fb, const Block& gb, const LinearFunctional& c,
                                double eps, const ModulusOptions& opts) {
  const Index m = c.dim();
  ConicProgram prog;
  prog.dim = fb.size() + gb.size();
  prog.objective.resize(prog.dim);
  prog.objective.head(fb.size()) = -(fb.E.transpose() * c.weights());
  prog.objective.tail(gb.size()) = gb.E.transpose() * c.weights();
  std::vector<bool> implicit;
  append_block(prog, fb, 0, implicit);
  append_block(prog, gb, fb.size(), implicit);
  ConeConstraint tube;
  tube.P.resize(m, prog.dim);
  tube.P.leftCols(fb.size()) = -fb.E;
  tube.P.rightCols(gb.size()) = gb.E;
  tube.p = Vector::Zero(m);
  tube.d = eps;
  prog.cones.push_back(std::move(tube));
  implicit.push_back(false);

  std::vector<Index> sub = shared_columns(fb, gb);
  substitute_difference(prog, fb.size(), sub);

  Vector x0(prog.dim);
  x0 << fb.start, gb.start;
  for (std::size_t j = 0; j < sub.size(); ++j)
    if (sub[j] >= 0) x0(fb.size() + Index(j)) -= x0(sub[j]);
  BarrierOptions bopts = opts.barrier;
  bopts.scale_hint = std::max(c.weights().norm() * eps, 1e-12);
  const BarrierResult res = solve_conic(prog, x0, bopts);

  OrderedModulusResult out;
  out.epsilon = eps;
  out.method = ModulusMethod::numeric;
  Vector xg = res.x.tail(gb.size());
  Vector diff = gb.E * xg;
  for (std::size_t j = 0; j < sub.size(); ++j)
    if (sub[j] >= 0) xg(Index(j)) += res.x(sub[j]);
  out.f_star = fb.E * res.x.head(fb.size());
  out.g_star = gb.E * xg;
  diff -= fb.E * res.x.head(fb.size()) - [&] {
    Vector shared = Vector::Zero(fb.size());
    for (std::size_t j = 0; j < sub.size(); ++j)
      if (sub[j] >= 0) shared(sub[j]) = res.x(sub[j]);
    return Vector(fb.E * shared);
  }();
  out.omega = prog.objective.dot(res.x);
  out.u = diff / eps;
  out.slope = res.cone_multipliers.back();
  for (std::size_t k = 0; k + 1 < prog.cones.size(); ++k) {
    if (!implicit[k]) continue;
    const auto& cone = prog.cones[k];
    const double tau = cone.c.size() > 0 ? cone.c.dot(res.x) + cone.d : cone.d;
    const double r = (cone.P * res.x + cone.p).norm();
    if (r >= 0.5 * std::max(tau, 0.0)) out.attained = false;
  }
  return out;
}

double implicit_radius(const ModulusOptions& opts, double eps, double witness_norm) {
  return opts.implicit_radius_factor * (1.0 + eps + witness_norm);
}

}  // namespace

OrderedModulusResult ordered_modulus(const ConvexSetSpec& F, const ConvexSetSpec& G,
                                     const LinearFunctional& c, double eps,
                                     const ModulusOptions& opts) {
  check_dims(F, G, c);
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be finite and >= 0");
  const Index m = F.dim();

  const bool closed = F.is_subspace() && G.is_subspace() && !F.ball() && !G.ball();
  if (closed && !opts.force_numeric) {
    const IndexSet uni = set_union(F.support(), G.support(), m);
    const double L = restricted_norm(c.weights(), uni);
    OrderedModulusResult out;
    out.epsilon = eps;
    out.omega = eps * L;
    out.slope = L;
    out.method = ModulusMethod::closed_form;
    out.f_star = Vector::Zero(m);
    out.g_star = Vector::Zero(m);
    out.u = Vector::Zero(m);
    if (L > 0.0) {
      for (Index i : uni.indices()) {
        const double d = eps * c.weights()(i) / L;
        if (G.support().contains(i)) {
          out.g_star(i) = d;
        } else {
          out.f_star(i) = -d;
        }
      }
      if (eps > 0.0) out.u = (out.g_star - out.f_star) / eps;
    }
    return out;
  }

  const auto common = common_point(F, G);
  if (eps == 0.0) {
    if (!common) throw std::invalid_argument("no common point of F and G is known");
    OrderedModulusResult out;
    out.epsilon = 0.0;
    out.omega = 0.0;
    out.f_star = *common;
    out.g_star = *common;
    out.u = Vector::Zero(m);
    out.method = ModulusMethod::numeric;
    return out;
  }
  const Vector start_f = common ? *common : F.witness();
  const Vector start_g = common ? *common : G.witness();
  const double R = implicit_radius(opts, eps, std::max(start_f.norm(), start_g.norm()));
  return solve_pair(lift_set(F, R, start_f), lift_set(G, R, start_g), c, eps, opts);
}

UnionModulus union_modulus(const UnionSpace& U, const LinearFunctional& c, double eps,
                           const ModulusOptions& opts) {
  UnionModulus best;
  best.omega = -kInf;
  const bool closed = !opts.force_numeric && std::all_of(U.members().begin(), U.members().end(),
                                                         [](const ConvexSetSpec& s) {
                                                           return s.is_subspace() && !s.ball();
                                                         });
  for (Index i = 0; i < U.size(); ++i) {
    for (Index j = closed ? i : 0; j < U.size(); ++j) {
      double w;
      if (closed) {
        w = eps * restricted_norm(c.weights(), set_union(U[i].support(), U[j].support(), U.dim()));
      } else {
        w = ordered_modulus(U[i], U[j], c, eps, opts).omega;
      }
      if (w > best.omega) best = UnionModulus{w, i, j};
    }
  }
  return best;
}

OrderedModulusResult hull_modulus(const UnionSpace& U, const LinearFunctional& c, double eps,
                                  const ModulusOptions& opts) {
  if (c.dim() != U.dim()) throw std::invalid_argument("functional and union dimensions differ");
  const Index m = U.dim();
  const bool subspaces = std::all_of(U.members().begin(), U.members().end(),
                                     [](const ConvexSetSpec& s) { return s.is_subspace() && !s.ball(); });
  if (subspaces && !opts.force_numeric) {
    IndexSet span;
    for (const auto& s : U.members()) span = set_union(span, s.support(), m);
    const auto whole = ConvexSetSpec::coordinate_subspace(m, span);
    return ordered_modulus(whole, whole, c, eps, opts);
  }
  if (eps == 0.0) {
    OrderedModulusResult out;
    out.f_star = U[0].witness();
    out.g_star = U[0].witness();
    out.u = Vector::Zero(m);
    out.method = ModulusMethod::numeric;
    return out;
  }
  double wn = 0.0;
  for (const auto& s : U.members()) wn = std::max(wn, s.witness().norm());
  const Block hull = lift_hull(U, implicit_radius(opts, eps, wn));
  return solve_pair(hull, hull, c, eps, opts);
}

ModulusCurve modulus_curve(const ConvexSetSpec& F, const ConvexSetSpec& G, const LinearFunctional& c,
                           const ModulusOptions& opts) {
  auto cache = std::make_shared<std::map<double, ModulusSample>>();
  return [F, G, c, opts, cache](double eps) {
    auto it = cache->find(eps);
    if (it != cache->end()) return it->second;
    const auto r = ordered_modulus(F, G, c, eps, opts);
    ModulusSample s{r.omega, r.slope};
    cache->emplace(eps, s);
    return s;
  };
}

namespace {

struct Phi {
  const ModulusCurve& omega;
  double s;

  double operator()(double eps) const { return eps == 0.0 ? 0.0 : omega(eps).omega - s * eps; }
  double tol(double eps, double rel) const {
    if (eps == 0.0) return 0.0;
    return rel * std::max(std::abs(omega(eps).omega) + s * eps, 1e-300);
  }
};

// Golden-section maximisation of a concave function on [a, b].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                     double rel_width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best_x = x1, best_f = f1;
  const double width = rel_width * std::max(std::abs(b), std::abs(a));
  for (int it = 0; it < 200 && (b - a) > width; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
    if (f1 > best_f || (f1 == best_f && x1 < best_x)) best_x = x1, best_f = f1;
    if (f2 > best_f || (f2 == best_f && x2 < best_x)) best_x = x2, best_f = f2;
  }
  return {best_x, best_f};
}

}  // namespace

TradeoffPoint bias_for_variance(const ModulusCurve& omega, double n, double V,
                                const TradeoffOptions& opts) {
  if (!(V >= 0.0)) throw std::invalid_argument("variance budget must be >= 0");
  if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
  const double s = std::sqrt(n * V);
  const double e0 = 1.0 / std::sqrt(n);
  const Phi phi{omega, s};
  TradeoffPoint out;
  out.V = V;

  // Geometric bracket: walk right while phi still rises.
  double x = e0, fx = phi(e0), hi = 2.0 * e0;
  for (;;) {
    const double x2 = 2.0 * x;
    const double f2 = phi(x2);
    if (f2 > fx + phi.tol(x2, opts.flat_tol)) {
      x = x2;
      fx = f2;
      if (x > opts.ceiling * e0) {
        out.B = kInf;
        out.eps_V = kInf;
        out.case_tag = TradeoffCase::case_1b;
        return out;
      }
    } else {
      hi = x2;
      break;
    }
  }

  auto [eg, fg] = golden_max([&](double e) { return phi(e); }, 0.0, hi, 1e-12);
  if (fx > fg) eg = x, fg = fx;

  if (fg > phi.tol(eg, opts.flat_tol)) {
    out.case_tag = TradeoffCase::case_1a;
    const double eps_v = eg;
    out.eps_V = eps_v;
    out.B = 0.5 * std::max(fg, phi(eps_v));
    return out;
  }

  out.B = 0.0;
  const double small = 1e-4 * e0;
  if (phi(small) >= -phi.tol(small, opts.flat_tol)) {
    out.case_tag = TradeoffCase::case_2a;
    if (phi(e0) >= -phi.tol(e0, opts.flat_tol)) {
      out.eps_V = e0;
    } else {
      double lo = small, up = e0;
      for (int it = 0; it < 200 && up - lo > 1e-14 * up; ++it) {
        const double mid = 0.5 * (lo + up);
        if (phi(mid) >= -phi.tol(mid, opts.flat_tol)) {
          lo = mid;
        } else {
          up = mid;
        }
      }
      out.eps_V = lo;
    }
  } else {
    out.case_tag = TradeoffCase::case_2b;
    out.eps_V = 0.0;
  }
  return out;
}

TradeoffPoint bias_for_variance(const ConvexSetSpec& F, const ConvexSetSpec& G,
                                const LinearFunctional& c, const NoiseScale& n, double V,
                                const ModulusOptions& mopts) {
  return bias_for_variance(modulus_curve(F, G, c, mopts), n.value(), V);
}

double variance_for_bias(const ModulusCurve& omega, double n, double B, const TradeoffOptions&) {
  if (!(B >= 0.0)) throw std::invalid_argument("bias bound must be >= 0");
  if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
  const double e0 = 1.0 / std::sqrt(n);
  const auto h = [&](double log_eps) {
    const double eps = std::exp(log_eps);
    const double gap = std::max(omega(eps).omega - 2.0 * B, 0.0);
    return gap * gap / (n * eps * eps);
  };
  const double lo = std::log(1e-6 * e0), hi = std::log(1e6 * e0);
  const int steps = 120;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= steps; ++i) {
    const double v = h(lo + (hi - lo) * i / steps);
    if (v > best_v) best_v = v, best = i;
  }
  if (best_v <= 0.0) return 0.0;
  const double a = lo + (hi - lo) * std::max(best - 1, 0) / steps;
  const double b = lo + (hi - lo) * std::min(best + 1, steps) / steps;
  const auto [xg, vg] = golden_max(h, a, b, 1e-13);
  (void)xg;
  return std::max(best_v, vg);
}

double variance_for_bias(const ConvexSetSpec& F, const ConvexSetSpec& G, const LinearFunctional& c,
                         const NoiseScale& n, double B, const ModulusOptions& mopts) {
  return variance_for_bias(modulus_curve(F, G, c, mopts), n.value(), B);
}

ConcavityReport concavity_check(const ModulusCurve& omega, const std::vector<double>& eps,
                                double tol) {
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument("eps samples must be positive");
    if (i > 0 && eps[i] < eps[i - 1]) throw std::invalid_argument("eps samples must be sorted");
  }
  ConcavityReport rep;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    for (std::size_t j = i + 1; j < eps.size(); ++j) {
      const double e1 = eps[i], e2 = eps[j];
      const double w1 = omega(e1).omega, w2 = omega(e2).omega;
      for (double lam : {0.25, 0.5, 0.75}) {
        const double mid = omega(lam * e1 + (1.0 - lam) * e2).omega;
        const double excess = lam * w1 + (1.0 - lam) * w2 - mid;
        ++rep.checks;
        if (excess > tol) rep.violations.push_back({"concavity", e1, e2, lam, excess});
      }
      ++rep.checks;
      if (w1 - w2 > tol) rep.violations.push_back({"monotone", e1, e2, 0.0, w1 - w2});
      if (e2 > e1) {
        const double D = e2 / e1;
        ++rep.checks;
        if (w2 - D * w1 > tol) rep.violations.push_back({"scaling", e1, e2, D, w2 - D * w1});
      }
    }
  }
  return rep;
}

}  // namespace minimax
