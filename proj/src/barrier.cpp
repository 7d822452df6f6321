#include "minimax/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minimax {

double SparseRow::dot(const Vector& x) const {
  double s = 0.0;
  for (std::size_t t = 0; t < idx.size(); ++t) s += val[t] * x(idx[t]);
  return s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_slope(const ConeConstraint& k) { return k.c.size() > 0 && k.c.cwiseAbs().maxCoeff() > 0.0; }

// Barrier over the program's constraints, optionally relaxed by a shift variable stored as the
// last coordinate (phase one). Cached per-cone Gram matrices keep Hessian assembly cheap.
class Barrier {
 public:
  Barrier(const ConicProgram& prog, bool shifted) : prog_(prog), shifted_(shifted) {
    n_ = prog.dim + (shifted ? 1 : 0);
    for (const auto& k : prog.cones) {
      gram_.push_back(k.P.transpose() * k.P);
      sloped_.push_back(has_slope(k));
    }
  }

  Eigen::Index size() const { return n_; }

  double nu() const {
    double v = static_cast<double>(prog_.rows.size()) + (shifted_ ? 1.0 : 0.0);
    for (bool s : sloped_) v += s ? 2.0 : 1.0;
    return v;
  }

  double shift(const Vector& z) const { return shifted_ ? z(n_ - 1) : 0.0; }

  // Returns +inf outside the domain.
  double value(const Vector& z) const {
    const Vector x = z.head(prog_.dim);
    const double sh = shift(z);
    double v = 0.0;
    for (const auto& r : prog_.rows) {
      const double s = r.b + sh - r.dot(x);
      if (!(s > 0.0)) return kInf;
      v -= std::log(s);
    }
    for (const auto& k : prog_.cones) {
      const double tau = cone_rhs(k, x) + sh;
      if (!(tau > 0.0)) return kInf;
      const Vector u = k.P * x + k.p;
      const double s = tau * tau - u.squaredNorm();
      if (!(s > 0.0)) return kInf;
      v -= std::log(s);
    }
    if (shifted_) {
      const double s = floor_ + sh;
      if (!(s > 0.0)) return kInf;
      v -= std::log(s);
    }
    return v;
  }

  void derivatives(const Vector& z, Vector& grad, Matrix& hess) const {
    grad.setZero(n_);
    hess.setZero(n_, n_);
    const Vector x = z.head(prog_.dim);
    const double sh = shift(z);
    const Eigen::Index last = n_ - 1;
    for (const auto& r : prog_.rows) {
      const double s = r.b + sh - r.dot(x);
      const double inv = 1.0 / s;
      const double inv2 = inv * inv;
      // d(-log s) = a/s (and -1/s on the shift)
      for (std::size_t a = 0; a < r.idx.size(); ++a) {
        grad(r.idx[a]) += r.val[a] * inv;
        for (std::size_t b = 0; b < r.idx.size(); ++b) {
          hess(r.idx[a], r.idx[b]) += r.val[a] * r.val[b] * inv2;
        }
        if (shifted_) {
          hess(r.idx[a], last) -= r.val[a] * inv2;
          hess(last, r.idx[a]) -= r.val[a] * inv2;
        }
      }
      if (shifted_) {
        grad(last) -= inv;
        hess(last, last) += inv2;
      }
    }
    for (std::size_t c = 0; c < prog_.cones.size(); ++c) {
      const auto& k = prog_.cones[c];
      const double tau = cone_rhs(k, x) + sh;
      const Vector u = k.P * x + k.p;
      const double s = tau * tau - u.squaredNorm();
      // grad s = 2 tau dtau - 2 P^T u ; hess s = 2 dtau dtau^T - 2 P^T P
      Vector gs = Vector::Zero(n_);
      gs.head(prog_.dim) = -2.0 * (k.P.transpose() * u);
      if (sloped_[c]) gs.head(prog_.dim) += 2.0 * tau * k.c;
      if (shifted_) gs(last) = 2.0 * tau;
      grad -= gs / s;
      hess.noalias() += (gs * gs.transpose()) / (s * s);
      hess.topLeftCorner(prog_.dim, prog_.dim) += (2.0 / s) * gram_[c];
      if (sloped_[c] || shifted_) {
        Vector dtau = Vector::Zero(n_);
        if (sloped_[c]) dtau.head(prog_.dim) = k.c;
        if (shifted_) dtau(last) = 1.0;
        hess.noalias() -= (2.0 / s) * dtau * dtau.transpose();
      }
    }
    if (shifted_) {
      const double s = floor_ + sh;
      grad(last) -= 1.0 / s;
      hess(last, last) += 1.0 / (s * s);
    }
  }

  std::vector<double> cone_multipliers(const Vector& z, double t) const {
    std::vector<double> out;
    const Vector x = z.head(prog_.dim);
    for (const auto& k : prog_.cones) {
      const double tau = cone_rhs(k, x);
      const double s = tau * tau - (k.P * x + k.p).squaredNorm();
      out.push_back(2.0 * tau / (t * s));
    }
    return out;
  }

  void set_floor(double f) { floor_ = f; }

 private:
  static double cone_rhs(const ConeConstraint& k, const Vector& x) {
    return k.c.size() > 0 ? k.c.dot(x) + k.d : k.d;
  }

  const ConicProgram& prog_;
  bool shifted_;
  Eigen::Index n_ = 0;
  double floor_ = 1e6;
  std::vector<Matrix> gram_;
  std::vector<bool> sloped_;
};

struct CenterStats {
  int steps = 0;
  bool converged = false;
  bool stalled = false;
};

// Damped Newton minimisation of -t q.z + barrier(z) from a strictly feasible z.
CenterStats center(const Barrier& bar, const Vector& q, double t, Vector& z, int max_steps) {
  CenterStats st;
  Vector grad;
  Matrix hess;
  const auto objective = [&](const Vector& v) {
    const double b = bar.value(v);
    return std::isfinite(b) ? -t * q.dot(v) + b : kInf;
  };
  double fz = objective(z);
  for (; st.steps < max_steps; ++st.steps) {
    bar.derivatives(z, grad, hess);
    grad -= t * q;
    // Jacobi scaling: slacks near active faces spread the diagonal over many decades.
    const Vector d = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const Matrix scaled = d.asDiagonal() * hess * d.asDiagonal();
    Eigen::LLT<Matrix> llt(scaled);
    double reg = 0.0;
    while (llt.info() != Eigen::Success) {
      reg = reg == 0.0 ? 1e-14 : reg * 100.0;
      if (reg > 1.0) throw BarrierError("barrier Hessian is not positive definite");
      llt.compute(scaled + reg * Matrix::Identity(hess.rows(), hess.cols()));
    }
    const Vector step = d.cwiseProduct(llt.solve(-d.cwiseProduct(grad)));
    const double decrement = -grad.dot(step);
    if (!(decrement >= 0.0) || !std::isfinite(decrement)) throw BarrierError("invalid Newton step");
    if (decrement / 2.0 <= 1e-10) {
      st.converged = true;
      break;
    }
    double alpha = 1.0;
    Vector trial = z + step;
    double ft = objective(trial);
    // Inside the quadratic region the full step is feasible and needs no value test, which
    // rounding in t * q.z would defeat at large t.
    const bool quadratic = decrement < 0.1 && std::isfinite(ft);
    while (!quadratic && !(ft <= fz - 0.25 * alpha * decrement)) {
      alpha *= 0.5;
      if (alpha < 1e-14) break;
      trial = z + alpha * step;
      ft = objective(trial);
    }
    if (alpha < 1e-14) {
      // No progress possible at working precision.
      st.stalled = true;
      break;
    }
    z = trial;
    fz = ft;
  }
  if (!st.converged) st.stalled = true;
  return st;
}

}  // namespace

double max_violation(const ConicProgram& prog, const Vector& x) {
  double v = -kInf;
  for (const auto& r : prog.rows) v = std::max(v, r.dot(x) - r.b);
  for (const auto& k : prog.cones) {
    const double tau = k.c.size() > 0 ? k.c.dot(x) + k.d : k.d;
    v = std::max(v, (k.P * x + k.p).norm() - tau);
  }
  return v;
}

Vector find_interior_point(const ConicProgram& prog, const Vector& x0) {
  if (x0.size() != prog.dim) throw std::invalid_argument("start point has wrong dimension");
  if (prog.rows.empty() && prog.cones.empty()) return x0;
  const double v0 = max_violation(prog, x0);
  if (v0 < 0.0) {
    // Already strictly feasible; only nudge toward the centre when it sits very close to a face.
    const double scale = std::max(1.0, x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0);
    if (v0 < -1e-8 * scale) return x0;
  }
  Barrier bar(prog, true);
  Vector z(prog.dim + 1);
  z.head(prog.dim) = x0;
  const double scale = std::max(1.0, std::abs(v0));
  z(prog.dim) = std::max(v0, 0.0) + scale;
  bar.set_floor(1e3 * scale + 1.0);
  Vector q = Vector::Zero(prog.dim + 1);
  q(prog.dim) = -1.0;
  double t = 1.0 / scale;
  for (int round = 0; round < 60; ++round) {
    center(bar, q, t, z, 200);
    if (z(prog.dim) < 0.0) return z.head(prog.dim);
    if (bar.nu() / t < 1e-13 * scale) break;
    t *= 10.0;
  }
  throw BarrierError("feasible set has empty interior (best relaxation " +
                     std::to_string(z(prog.dim)) + ")");
}

BarrierResult solve_conic(const ConicProgram& prog, const Vector& x0, const BarrierOptions& opts) {
  if (prog.objective.size() != prog.dim) throw std::invalid_argument("objective has wrong dimension");
  if (prog.dim == 0) {
    if (max_violation(prog, x0) > 0.0) throw BarrierError("empty program is infeasible");
    BarrierResult res;
    res.x = x0;
    res.cone_multipliers.assign(prog.cones.size(), 0.0);
    return res;
  }
  Vector z = find_interior_point(prog, x0);
  Barrier bar(prog, false);
  BarrierResult res;
  const double nu = std::max(1.0, bar.nu());
  const double qn = std::max(prog.objective.norm(), 1e-300);
  double t = nu / (qn * std::max(opts.scale_hint, 1e-300));
  for (;;) {
    const auto st = center(bar, prog.objective, t, z, opts.max_newton);
    res.newton_steps += st.steps;
    const double value = prog.objective.dot(z);
    if (!z.allFinite()) throw BarrierError("barrier iterate diverged");
    const double gap = nu / t;
    if (st.stalled || gap <= opts.gap_tol * std::max(std::abs(value), opts.scale_hint) || t > 1e20) {
      res.gap_bound = gap;
      break;
    }
    t *= opts.t_growth;
  }
  res.x = z;
  res.value = prog.objective.dot(z);
  res.cone_multipliers = bar.cone_multipliers(z, t);
  return res;
}

}  // namespace minimax
