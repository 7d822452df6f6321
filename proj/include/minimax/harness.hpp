#pragma once

// Monte Carlo risk engine and the end-to-end experiments.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "minimax/bounds.hpp"
#include "minimax/report.hpp"
#include "minimax/selection.hpp"

namespace minimax {

struct MCConfig {
  std::size_t reps = 2000;
  std::uint64_t seed = 1;
  double p = 2.0;
  /// Threads used for replicates. Results do not depend on it.
  unsigned workers = 1;

  void validate() const;
};

struct RiskEstimate {
  double mean = 0.0;
  /// 95% normal-approximation half-width, 1.96 sd / sqrt(reps).
  double half_width = 0.0;
  std::size_t reps = 0;
};

using Evaluator = std::function<double(const Vector& y)>;

/// (1/R) sum_r |T(y_r) - Tf|^p with y_r drawn from sub-stream (seed, r); pairwise summation.
RiskEstimate mc_risk(const Evaluator& est, const Vector& f, const LinearFunctional& c,
                     const NoiseScale& n, const MCConfig& cfg);

struct AffineRiskCheck {
  RiskEstimate mc;
  double analytic = 0.0;
  /// |mc.mean - analytic| <= mc.half_width
  bool within = false;
};

/// Monte Carlo risk of an affine estimator together with its exact risk.
AffineRiskCheck mc_risk(const AffineEstimator& est, const Vector& f, const LinearFunctional& c,
                        const NoiseScale& n, const MCConfig& cfg);

/// Sum of values in a fixed binary-tree order.
double pairwise_sum(const double* x, std::size_t len);

struct Candidate {
  std::string label;
  Vector f;
};

struct WorstCase {
  RiskEstimate risk;
  std::size_t index = 0;
  std::vector<RiskEstimate> per_candidate;
};

/// Risk at every candidate under common random numbers; the maximum and its index.
WorstCase worst_case_risk(const Evaluator& est, const std::vector<Candidate>& candidates,
                          const LinearFunctional& c, const NoiseScale& n, const MCConfig& cfg);

struct CandidateOptions {
  /// Single spikes of height r sqrt(ln n / n).
  std::vector<double> spike_r = {1.0, 2.0, 4.0, 8.0};
  /// Block spikes filling a member's support with height r * block_unit.
  std::vector<double> block_r = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0};
  double block_unit = 0.0;
  /// Members used for block spikes (zero-based); empty selects first, middle and last.
  std::vector<Index> block_sets;
  /// Add the extremal pair of omega(n^{-1/2}, F_first, F_middle).
  bool extremal = true;
};

/// Zero, single spikes, block spikes and an extremal modulus pair.
std::vector<Candidate> curated_candidates(const UnionSpace& U, const LinearFunctional& c,
                                          const NoiseScale& n, const CandidateOptions& opts = {});

Evaluator selection_evaluator(const PairEstimatorBank& bank);
Evaluator affine_evaluator(const AffineEstimator& e);

struct ExperimentOptions {
  MCConfig mc{};
  /// Largest family enumerated by the nearly-black experiment.
  std::size_t enumeration_cap = 5000;
};

/// All C(n, k) coordinate subspaces, c = (1, ..., 1), m = n.
ExperimentReport run_experiment_nearly_black(Index n, Index k, const ExperimentOptions& opts = {});

/// Intervals [a, a + k - 1], a = 1..n-k, c = (1, ..., 1), m = n.
ExperimentReport run_experiment_structured(Index n, Index k, const ExperimentOptions& opts = {});

/// Moduli of the discretised Lipschitz classes against their closed forms, plus the hull cell.
ExperimentReport run_experiment_lipschitz(const std::vector<Index>& grid_sizes,
                                          const std::vector<double>& eps_list, double ball = 10.0);

/// Hull-linear benchmark against the selection estimator on the structured family.
ExperimentReport run_experiment_linear_vs_nonlinear(Index n, Index k, const ExperimentOptions& opts = {});

}  // namespace minimax
