#include "minimax/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minimax {

namespace {

double norm_on(const Vector& c, const IndexSet& s) {
  double acc = 0.0;
  for (Index i : s.indices()) acc += c(i) * c(i);
  return std::sqrt(acc);
}

double sum_on(const Vector& c, const Vector& y, const IndexSet& s) {
  double acc = 0.0;
  for (Index i : s.indices()) acc += c(i) * y(i);
  return acc;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::string pair_name(Index i, Index j) {
  return "(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
}

}  // namespace

double PairEstimatorBank::subspace_cross(Index i, Index j) const {
  const IndexSet u = set_union(U_[i].support(), U_[j].support(), dim());
  return norm_on(c_.weights(), u) / std::sqrt(n_.value());
}

double PairEstimatorBank::cross_modulus(Index i, Index j) const {
  if (implicit_) return subspace_cross(i, j);
  return cross_(i, j);
}

AffineEstimator PairEstimatorBank::base(Index i) const {
  if (!implicit_) return base_[static_cast<std::size_t>(i)];
  AffineEstimator e;
  e.w = Vector::Zero(dim());
  for (Index t : U_[i].support().indices()) e.w(t) = c_.weights()(t);
  return e;
}

AffineEstimator PairEstimatorBank::pair(Index i, Index j) const {
  if (i == j) throw std::invalid_argument("pair estimators need i != j");
  if (!implicit_) return pair_[static_cast<std::size_t>(i * K_ + j)];
  AffineEstimator e;
  e.w = Vector::Zero(dim());
  const IndexSet u = set_union(U_[i].support(), U_[j].support(), dim());
  for (Index t : u.indices()) e.w(t) = c_.weights()(t);
  return e;
}

PairEstimatorBank build_selection_estimator(const UnionSpace& U, const LinearFunctional& c,
                                            const NoiseScale& n, const BankOptions& opts) {
  if (c.dim() != U.dim()) throw std::invalid_argument("functional and union dimensions differ");
  PairEstimatorBank bank(U, c, n);
  const Index K = U.size();
  bank.K_ = K;
  const double e0 = 1.0 / std::sqrt(n.value());
  const bool subspaces = std::all_of(U.members().begin(), U.members().end(), [](const ConvexSetSpec& s) {
    return s.is_subspace() && !s.ball();
  });
  bank.implicit_ = subspaces && !opts.force_explicit && !opts.modulus.force_numeric;

  if (bank.implicit_) {
    for (Index i = 0; i < K; ++i) {
      const double w = norm_on(c.weights(), U[i].support()) * e0;
      bank.base_omega_.push_back(w);
      bank.base_M_.push_back(w > 0.0 ? 1.0 : 0.0);
    }
    bool fast = c.is_uniform();
    const Index len = U[0].support().size();
    for (Index i = 0; i < K && fast; ++i) {
      fast = U[i].kind() == SetKind::interval_subspace && U[i].support().size() == len &&
             (i == 0 || U[i].interval_start() > U[i - 1].interval_start());
    }
    bank.fast_ = fast;
  } else {
    for (Index i = 0; i < K; ++i) {
      const auto ml = build_minimax_linear(U[i], c, n, opts.modulus);
      bank.base_.push_back(ml.estimator);
      bank.base_omega_.push_back(ml.omega);
      bank.base_M_.push_back(ml.M);
    }
    bank.cross_ = Matrix::Zero(K, K);
    bank.pair_.resize(static_cast<std::size_t>(K * K));
    for (Index i = 0; i < K; ++i) {
      for (Index j = 0; j < K; ++j) {
        try {
          const auto r = ordered_modulus(U[i], U[j], c, e0, opts.modulus);
          if (!std::isfinite(r.omega)) throw std::domain_error("infinite modulus");
          bank.cross_(i, j) = r.omega;
          if (i == j) continue;
          bank.pair_[static_cast<std::size_t>(i * K + j)] =
              build_bias_controlled(U[i], U[j], c, n, r.omega * r.omega, opts.modulus).estimator;
        } catch (const std::exception& ex) {
          throw std::domain_error("pair " + pair_name(i, j) + ": " + ex.what());
        }
      }
    }
  }
  bank.M_ = *std::max_element(bank.base_M_.begin(), bank.base_M_.end());
  return bank;
}

namespace {

void finish(SelectionOutcome& out, const std::vector<double>& sup) {
  const double best = *std::min_element(sup.begin(), sup.end());
  std::size_t i = 0;
  while (sup[i] > best + kSelectionTieTol) ++i;
  out.i_hat = static_cast<Index>(i);
  out.score = sup[i];
}

}  // namespace

struct SelectionKernel {
  static SelectionOutcome explicit_path(const PairEstimatorBank& b, const Vector& y, bool tables) {
    const Index K = b.K_;
    SelectionOutcome out;
    if (tables) out.z_u = out.z_l = out.z = Matrix::Zero(K, K);
    std::vector<double> base(static_cast<std::size_t>(K));
    for (Index i = 0; i < K; ++i) base[i] = b.base_[i].estimate(y);
    Matrix pv(K, K);
    for (Index i = 0; i < K; ++i) {
      for (Index j = 0; j < K; ++j) {
        pv(i, j) = i == j ? base[i] : b.pair_[static_cast<std::size_t>(i * K + j)].estimate(y);
      }
    }
    std::vector<double> sup(static_cast<std::size_t>(K), -std::numeric_limits<double>::infinity());
    for (Index i = 0; i < K; ++i) {
      const double mw = b.M_ * b.base_omega_[i];
      for (Index j = 0; j < K; ++j) {
        if (j == i) continue;
        const double zu = ratio(pv(i, j) - base[i], b.cross_(i, j) + mw);
        const double zl = ratio(base[i] - pv(j, i), b.cross_(j, i) + mw);
        const double z = std::max(zu, zl);
        sup[i] = std::max(sup[i], z);
        if (tables) out.z_u(i, j) = zu, out.z_l(i, j) = zl, out.z(i, j) = z;
      }
    }
    finish(out, sup);
    out.estimate = base[out.i_hat];
    return out;
  }

  static SelectionOutcome subspace_path(const PairEstimatorBank& b, const Vector& y, bool tables) {
    const Index K = b.K_;
    const Vector& c = b.c_.weights();
    const double e0 = 1.0 / std::sqrt(b.n_.value());
    SelectionOutcome out;
    if (tables) out.z_u = out.z_l = out.z = Matrix::Zero(K, K);
    std::vector<double> base(static_cast<std::size_t>(K));
    for (Index i = 0; i < K; ++i) base[i] = sum_on(c, y, b.U_[i].support());
    std::vector<double> sup(static_cast<std::size_t>(K), -std::numeric_limits<double>::infinity());
    std::vector<char> in_i(static_cast<std::size_t>(b.dim()), 0);
    for (Index i = 0; i < K; ++i) {
      const IndexSet& I = b.U_[i].support();
      for (Index t : I.indices()) in_i[t] = 1;
      const double mw = b.M_ * b.base_omega_[i];
      const double ci2 = std::pow(b.base_omega_[i] / e0, 2);
      for (Index j = 0; j < K; ++j) {
        if (j == i) continue;
        // T_ij - T_i = S(J \ I) = T_ji - T_i; both moduli equal eps ||c_{I u J}||.
        double s = 0.0, c2 = 0.0;
        for (Index t : b.U_[j].support().indices()) {
          if (in_i[t]) continue;
          s += c(t) * y(t);
          c2 += c(t) * c(t);
        }
        const double w = std::sqrt(ci2 + c2) * e0;
        const double zu = ratio(s, w + mw);
        const double zl = ratio(-s, w + mw);
        const double z = std::max(zu, zl);
        sup[i] = std::max(sup[i], z);
        if (tables) out.z_u(i, j) = zu, out.z_l(i, j) = zl, out.z(i, j) = z;
      }
      for (Index t : I.indices()) in_i[t] = 0;
    }
    finish(out, sup);
    out.estimate = base[out.i_hat];
    return out;
  }

  // Equal-length intervals under c = c0 (1, ..., 1): the disjoint competitors of i share one
  // denominator, so their maximum comes from prefix/suffix maxima of |S_j|; only the
  // overlapping competitors are visited individually.
  static SelectionOutcome interval_path(const PairEstimatorBank& b, const Vector& y) {
    const Index K = b.K_;
    const Index m = b.dim();
    const double c0 = b.c_.weights()(0);
    const Index k = b.U_[0].support().size();
    const double e0 = 1.0 / std::sqrt(b.n_.value());
    SelectionOutcome out;
    std::vector<double> P(static_cast<std::size_t>(m + 1), 0.0);
    for (Index t = 0; t < m; ++t) P[t + 1] = P[t] + c0 * y(t);
    std::vector<Index> start(static_cast<std::size_t>(K));
    std::vector<double> S(static_cast<std::size_t>(K));
    for (Index j = 0; j < K; ++j) {
      start[j] = b.U_[j].interval_start();
      S[j] = P[start[j] + k] - P[start[j]];
    }
    std::vector<double> pre(static_cast<std::size_t>(K + 1), 0.0), suf(static_cast<std::size_t>(K + 1), 0.0);
    for (Index j = 0; j < K; ++j) pre[j + 1] = std::max(pre[j], std::abs(S[j]));
    for (Index j = K; j-- > 0;) suf[j] = std::max(suf[j + 1], std::abs(S[j]));
    const double ac = std::abs(c0);
    const double wi = b.M_ * ac * std::sqrt(static_cast<double>(k)) * e0;
    const double den_disjoint = ac * std::sqrt(2.0 * static_cast<double>(k)) * e0 + wi;
    std::vector<double> sup(static_cast<std::size_t>(K), -std::numeric_limits<double>::infinity());
    for (Index i = 0; i < K; ++i) {
      const Index si = start[i];
      // Disjoint: start <= si - k (indices < p) or start >= si + k (indices >= q).
      const Index p = std::upper_bound(start.begin(), start.end(), si - k) - start.begin();
      const Index q = std::lower_bound(start.begin(), start.end(), si + k) - start.begin();
      double best = -std::numeric_limits<double>::infinity();
      if (p > 0) best = std::max(best, ratio(pre[p], den_disjoint));
      if (q < K) best = std::max(best, ratio(suf[q], den_disjoint));
      for (Index j = p; j < q; ++j) {
        if (j == i) continue;
        const Index sj = start[j];
        const Index d = sj > si ? sj - si : si - sj;
        const double s = sj < si ? P[si] - P[sj] : P[sj + k] - P[si + k];
        const double w = ac * std::sqrt(static_cast<double>(k + d)) * e0;
        best = std::max(best, ratio(std::abs(s), w + wi));
      }
      sup[i] = best;
    }
    finish(out, sup);
    out.estimate = S[out.i_hat];
    return out;
  }
};

SelectionOutcome evaluate_selection(const PairEstimatorBank& bank, const Vector& y,
                                    const SelectionOptions& opts) {
  if (y.size() != bank.dim()) throw std::invalid_argument("observation has wrong length");
  if (!bank.implicit()) return SelectionKernel::explicit_path(bank, y, opts.tables);
  if (bank.interval_fast_path() && !opts.generic && !opts.tables) {
    return SelectionKernel::interval_path(bank, y);
  }
  return SelectionKernel::subspace_path(bank, y, opts.tables);
}

}  // namespace minimax
