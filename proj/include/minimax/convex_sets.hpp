#pragma once

// Closed convex parameter sets with projection and membership oracles, and finite unions of
// them with verified pairwise intersections.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "minimax/seqmodel.hpp"

namespace minimax {

using Index = Eigen::Index;

/// Sorted, duplicate-free, zero-based coordinate indices within [0, m).
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::vector<Index> indices, Index m);

  static IndexSet range(Index start, Index length, Index m);

  const std::vector<Index>& indices() const { return idx_; }
  Index size() const { return static_cast<Index>(idx_.size()); }
  bool contains(Index i) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> idx_;
};

IndexSet set_union(const IndexSet& a, const IndexSet& b, Index m);
IndexSet set_difference(const IndexSet& a, const IndexSet& b, Index m);

/// w . f <= b, stored sparsely.
struct Halfspace {
  std::vector<Index> idx;
  std::vector<double> val;
  double b = 0.0;

  static Halfspace from_dense(const Vector& w, double b);
  Vector dense(Index m) const;
  double dot(const Vector& x) const;
  double norm_squared() const;
};

enum class SetKind { coordinate_subspace, interval_subspace, polytope };

std::string to_string(SetKind kind);

/// Immutable closed convex subset of R^m. The subspace variants are F_I = {f : f_j = 0, j not in I};
/// the polytope variant is an intersection of halfspaces. Any variant may be intersected with the
/// closed Euclidean ball of radius r. Every instance carries a witness point verified at construction.
class ConvexSetSpec {
 public:
  static ConvexSetSpec coordinate_subspace(Index m, IndexSet support);
  /// f_i = 0 unless start <= i <= start + length - 1 (zero-based start).
  static ConvexSetSpec interval_subspace(Index m, Index start, Index length);
  static ConvexSetSpec polytope(Index m, std::vector<Halfspace> halfspaces, Vector witness,
                                double tol = 1e-9);

  /// Returns this set intersected with the ball of radius r.
  ConvexSetSpec with_ball(double r) const;

  SetKind kind() const { return kind_; }
  Index dim() const { return m_; }
  bool is_subspace() const { return kind_ != SetKind::polytope; }
  /// Coordinates allowed to be nonzero. All coordinates for a polytope.
  const IndexSet& support() const { return support_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::optional<double>& ball() const { return ball_; }
  const Vector& witness() const { return witness_; }
  /// Start of an interval subspace; -1 otherwise.
  Index interval_start() const { return start_; }

 private:
  ConvexSetSpec() = default;
  void verify_witness(double tol) const;

  SetKind kind_ = SetKind::polytope;
  Index m_ = 0;
  IndexSet support_;
  Index start_ = -1;
  std::vector<Halfspace> halfspaces_;
  std::optional<double> ball_;
  Vector witness_;
};

class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(const std::string& what, Vector incumbent)
      : std::runtime_error(what), incumbent_(std::move(incumbent)) {}
  const Vector& incumbent() const { return incumbent_; }

 private:
  Vector incumbent_;
};

struct ProjectionOptions {
  double tol = 1e-9;
  int max_sweeps = 100000;
};

/// Euclidean projection. Subspace variants are exact; polytopes use cyclic Dykstra sweeps over
/// the halfspaces and the ball. Throws ProjectionError when the sweep cap is reached.
Vector project(const ConvexSetSpec& set, const Vector& x, const ProjectionOptions& opts = {});

bool contains(const ConvexSetSpec& set, const Vector& x, double tol = 1e-9);

/// Largest constraint violation of x (0 when x is a member).
double violation(const ConvexSetSpec& set, const Vector& x);

/// Finite union of convex sets (at least two) with a verified common point for every pair.
class UnionSpace {
 public:
  /// Uses each pair's first common witness among the origin and the members' own witnesses.
  explicit UnionSpace(std::vector<ConvexSetSpec> members, double tol = 1e-9);
  /// Explicit witnesses for pairs (i, j), i < j; remaining pairs fall back as above.
  UnionSpace(std::vector<ConvexSetSpec> members, std::map<std::pair<Index, Index>, Vector> witnesses,
             double tol = 1e-9);

  Index size() const { return static_cast<Index>(members_.size()); }
  Index dim() const { return members_.front().dim(); }
  const std::vector<ConvexSetSpec>& members() const { return members_; }
  const ConvexSetSpec& operator[](Index i) const { return members_[static_cast<std::size_t>(i)]; }
  /// A point of members i and j.
  Vector witness(Index i, Index j) const;
  bool all_subspaces() const;

 private:
  void build(std::map<std::pair<Index, Index>, Vector> explicit_witnesses, double tol);

  std::vector<ConvexSetSpec> members_;
  std::vector<bool> holds_origin_;
  std::map<std::pair<Index, Index>, Vector> witnesses_;
};

/// All C(n, k) coordinate subspaces of dimension k in R^n, lexicographic order.
std::vector<ConvexSetSpec> nearly_black_family(Index n, Index k);

/// Interval subspaces [a, a + k - 1] for a = 1..n-k (one-based), i.e. n - k members.
std::vector<ConvexSetSpec> structured_family(Index n, Index k);

enum class GridSide { left, right };

/// Uniform grid on [-1/2, 1/2] with an odd node count, so node (m_grid - 1)/2 sits at 0.
/// Coordinates are theta_j = sqrt(h) f(x_j) with h the grid spacing, so the Euclidean norm of
/// theta is the Riemann approximation of the L2 norm of f.
struct LipschitzGrid {
  explicit LipschitzGrid(Index m_grid);

  Index size() const { return m_grid; }
  Index center() const { return (m_grid - 1) / 2; }
  double spacing() const { return 1.0 / static_cast<double>(m_grid - 1); }
  double node(Index j) const { return -0.5 + static_cast<double>(j) * spacing(); }
  /// Coordinate scale sqrt(h).
  double scale() const { return std::sqrt(spacing()); }
  /// Tf = f(0) expressed on the scaled coordinates.
  LinearFunctional point_evaluation() const;
  Vector to_coordinates(const Vector& values) const { return scale() * values; }

  Index m_grid;
};

/// f has its maximum at 0 and is Lip(alpha) over the left [-1/2, 0] or right [0, 1/2] half:
/// f(0) >= f(x_j) for all nodes and |f(x_i) - f(x_j)| <= |x_i - x_j|^alpha for node pairs in
/// that half. Polytope over the scaled coordinates of LipschitzGrid.
ConvexSetSpec lipschitz_grid_set(double alpha, GridSide side, Index m_grid);

/// Functions with their maximum at 0, the closure of the hull of both Lipschitz classes.
ConvexSetSpec peak_grid_set(Index m_grid);

}  // namespace minimax
