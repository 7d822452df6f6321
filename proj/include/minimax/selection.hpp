#pragma once

// Selection among per-set linear estimators through normalised pairwise statistics
//
//   z^u_ij = (T_ij - T_i) / (w_ij + M w_i),   z^l_ij = (T_i - T_ji) / (w_ji + M w_i),
//
// with w_ij = omega(n^{-1/2}, F_i, F_j), w_i = omega(n^{-1/2}, F_i), and
// i_hat = argmin_i max_{j != i} max(z^u_ij, z^l_ij).

#include <vector>

#include "minimax/estimators.hpp"

namespace minimax {

struct BankOptions {
  ModulusOptions modulus{};
  /// Solve and store every estimator densely, even for subspace families.
  bool force_explicit = false;
};

/// Base estimators T_i, pairwise estimators T_ij and the moduli normalising them. Unions of
/// unbounded coordinate or interval subspaces are held implicitly (supports only) and their
/// estimators produced on demand; other unions are solved and stored densely.
class PairEstimatorBank {
 public:
  Index size() const { return K_; }
  Index dim() const { return c_.dim(); }
  const NoiseScale& noise() const { return n_; }
  const LinearFunctional& functional() const { return c_; }
  const UnionSpace& union_space() const { return U_; }

  /// Bank-wide max of the recorded per-set factors M_i.
  double M() const { return M_; }
  double base_M(Index i) const { return base_M_[static_cast<std::size_t>(i)]; }
  double base_modulus(Index i) const { return base_omega_[static_cast<std::size_t>(i)]; }
  double cross_modulus(Index i, Index j) const;

  AffineEstimator base(Index i) const;
  /// T_ij for i != j.
  AffineEstimator pair(Index i, Index j) const;
  std::size_t pair_count() const { return static_cast<std::size_t>(K_) * static_cast<std::size_t>(K_ - 1); }

  bool implicit() const { return implicit_; }
  /// Interval members of equal length under a uniform functional, sorted by start.
  bool interval_fast_path() const { return fast_; }

 private:
  friend PairEstimatorBank build_selection_estimator(const UnionSpace&, const LinearFunctional&,
                                                     const NoiseScale&, const BankOptions&);
  friend struct SelectionKernel;

  PairEstimatorBank(UnionSpace U, LinearFunctional c, NoiseScale n)
      : U_(std::move(U)), c_(std::move(c)), n_(n) {}

  double subspace_cross(Index i, Index j) const;

  UnionSpace U_;
  LinearFunctional c_;
  NoiseScale n_;
  Index K_ = 0;
  bool implicit_ = false;
  bool fast_ = false;
  double M_ = 0.0;
  std::vector<double> base_M_;
  std::vector<double> base_omega_;
  // Dense storage (explicit banks only).
  std::vector<AffineEstimator> base_;
  std::vector<AffineEstimator> pair_;  // K x K, diagonal unused
  Matrix cross_;
};

/// Builds the bank. Throws std::domain_error naming the pair when a pairwise estimator cannot
/// be constructed (unbounded or non-attained modulus).
PairEstimatorBank build_selection_estimator(const UnionSpace& U, const LinearFunctional& c,
                                            const NoiseScale& n, const BankOptions& opts = {});

/// Criteria within this distance of the minimum are ties, resolved to the lowest index. The
/// statistics have unit scale, and exact ties between overlapping sets are common.
inline constexpr double kSelectionTieTol = 1e-9;

struct SelectionOutcome {
  /// K x K tables, diagonal zero; empty unless requested.
  Matrix z_u;
  Matrix z_l;
  Matrix z;
  Index i_hat = 0;
  /// min_i max_{j != i} z_ij
  double score = 0.0;
  double estimate = 0.0;
};

struct SelectionOptions {
  bool tables = false;
  /// Disable the interval shortcut (for cross-checking).
  bool generic = false;
};

SelectionOutcome evaluate_selection(const PairEstimatorBank& bank, const Vector& y,
                                    const SelectionOptions& opts = {});

}  // namespace minimax
