#pragma once

// Log-barrier interior point method for small second-order cone programs:
//
//   maximize    q . x
//   subject to  a_i . x <= b_i                     (sparse rows)
//               || P_k x + p_k || <= c_k . x + d_k (cones; c_k = 0 gives a ball)
//
// The modulus solvers lift their problems into this form.

#include <stdexcept>
#include <string>
#include <vector>

#include "minimax/seqmodel.hpp"

namespace minimax {

struct SparseRow {
  std::vector<Eigen::Index> idx;
  std::vector<double> val;
  double b = 0.0;

  double dot(const Vector& x) const;
};

struct ConeConstraint {
  Matrix P;
  Vector p;
  Vector c;  // empty or zero for a fixed radius d
  double d = 0.0;
};

struct ConicProgram {
  Eigen::Index dim = 0;
  Vector objective;
  std::vector<SparseRow> rows;
  std::vector<ConeConstraint> cones;
};

struct BarrierOptions {
  /// Stop when the barrier duality gap bound falls below gap_tol * max(|value|, scale_hint), or
  /// when centering stalls at working precision.
  double gap_tol = 1e-10;
  double t_growth = 10.0;
  int max_newton = 100;
  /// Rough magnitude of the optimal value: sets the initial barrier weight and the gap scale.
  double scale_hint = 1.0;
};

struct BarrierResult {
  Vector x;
  double value = 0.0;
  double gap_bound = 0.0;
  int newton_steps = 0;
  /// Multiplier estimate for each cone, d(value)/d(d_k).
  std::vector<double> cone_multipliers;
};

class BarrierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest constraint violation of x (negative when strictly feasible).
double max_violation(const ConicProgram& prog, const Vector& x);

/// Finds a strictly feasible point starting from x0. Throws BarrierError when the feasible set
/// has empty interior.
Vector find_interior_point(const ConicProgram& prog, const Vector& x0);

/// Solves the program starting from x0 (need not be feasible).
BarrierResult solve_conic(const ConicProgram& prog, const Vector& x0, const BarrierOptions& opts = {});

}  // namespace minimax
