#include "minimax/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minimax {

IndexSet::IndexSet(std::vector<Index> indices, Index m) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
    throw std::invalid_argument("index set has duplicate entries");
  }
  if (!idx_.empty() && (idx_.front() < 0 || idx_.back() >= m)) {
    throw std::out_of_range("index set entry outside [0, " + std::to_string(m) + ")");
  }
}

IndexSet IndexSet::range(Index start, Index length, Index m) {
  std::vector<Index> idx(static_cast<std::size_t>(std::max<Index>(length, 0)));
  std::iota(idx.begin(), idx.end(), start);
  return IndexSet(std::move(idx), m);
}

bool IndexSet::contains(Index i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

IndexSet set_union(const IndexSet& a, const IndexSet& b, Index m) {
  std::vector<Index> out;
  std::set_union(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                 std::back_inserter(out));
  return IndexSet(std::move(out), m);
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b, Index m) {
  std::vector<Index> out;
  std::set_difference(a.indices().begin(), a.indices().end(), b.indices().begin(),
                      b.indices().end(), std::back_inserter(out));
  return IndexSet(std::move(out), m);
}

Halfspace Halfspace::from_dense(const Vector& w, double b) {
  Halfspace h;
  h.b = b;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) != 0.0) {
      h.idx.push_back(i);
      h.val.push_back(w(i));
    }
  }
  return h;
}

Vector Halfspace::dense(Index m) const {
  Vector w = Vector::Zero(m);
  for (std::size_t t = 0; t < idx.size(); ++t) w(idx[t]) = val[t];
  return w;
}

double Halfspace::dot(const Vector& x) const {
  double s = 0.0;
  for (std::size_t t = 0; t < idx.size(); ++t) s += val[t] * x(idx[t]);
  return s;
}

double Halfspace::norm_squared() const {
  double s = 0.0;
  for (double v : val) s += v * v;
  return s;
}

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::coordinate_subspace: return "coordinate_subspace";
    case SetKind::interval_subspace: return "interval_subspace";
    case SetKind::polytope: return "polytope";
  }
  return "unknown";
}

ConvexSetSpec ConvexSetSpec::coordinate_subspace(Index m, IndexSet support) {
  if (m <= 0) throw std::invalid_argument("dimension must be positive");
  ConvexSetSpec s;
  s.kind_ = SetKind::coordinate_subspace;
  s.m_ = m;
  s.support_ = IndexSet(support.indices(), m);
  s.witness_ = Vector::Zero(m);
  return s;
}

ConvexSetSpec ConvexSetSpec::interval_subspace(Index m, Index start, Index length) {
  if (m <= 0) throw std::invalid_argument("dimension must be positive");
  if (length < 0 || start < 0 || start + length > m) {
    throw std::out_of_range("interval [" + std::to_string(start) + ", " +
                            std::to_string(start + length - 1) + "] not inside [0, " +
                            std::to_string(m) + ")");
  }
  ConvexSetSpec s;
  s.kind_ = SetKind::interval_subspace;
  s.m_ = m;
  s.start_ = start;
  s.support_ = IndexSet::range(start, length, m);
  s.witness_ = Vector::Zero(m);
  return s;
}

ConvexSetSpec ConvexSetSpec::polytope(Index m, std::vector<Halfspace> halfspaces, Vector witness,
                                      double tol) {
  if (m <= 0) throw std::invalid_argument("dimension must be positive");
  if (witness.size() != m) throw std::invalid_argument("polytope witness has wrong length");
  for (const auto& h : halfspaces) {
    if (!std::isfinite(h.b)) throw std::invalid_argument("halfspace offset is not finite");
    for (std::size_t t = 0; t < h.idx.size(); ++t) {
      if (h.idx[t] < 0 || h.idx[t] >= m) throw std::out_of_range("halfspace index out of range");
      if (!std::isfinite(h.val[t])) throw std::invalid_argument("halfspace normal is not finite");
    }
  }
  ConvexSetSpec s;
  s.kind_ = SetKind::polytope;
  s.m_ = m;
  std::vector<Index> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  s.support_ = IndexSet(std::move(all), m);
  s.halfspaces_ = std::move(halfspaces);
  s.witness_ = std::move(witness);
  s.verify_witness(tol);
  return s;
}

ConvexSetSpec ConvexSetSpec::with_ball(double r) const {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("ball radius must be positive");
  ConvexSetSpec s = *this;
  s.ball_ = ball_ ? std::min(*ball_, r) : r;
  s.verify_witness(1e-9);
  return s;
}

void ConvexSetSpec::verify_witness(double tol) const {
  const double v = violation(*this, witness_);
  if (v > tol) {
    throw std::invalid_argument("witness point violates the set constraints by " + std::to_string(v));
  }
}

namespace {

Vector restrict_to(const IndexSet& support, const Vector& x) {
  Vector out = Vector::Zero(x.size());
  for (Index i : support.indices()) out(i) = x(i);
  return out;
}

void check_length(const ConvexSetSpec& set, const Vector& x) {
  if (x.size() != set.dim()) {
    throw std::invalid_argument("vector length " + std::to_string(x.size()) +
                                " does not match set dimension " + std::to_string(set.dim()));
  }
}

Vector dykstra(const ConvexSetSpec& set, const Vector& x0, const ProjectionOptions& opts) {
  const auto& hs = set.halfspaces();
  std::vector<double> norms(hs.size());
  for (std::size_t k = 0; k < hs.size(); ++k) norms[k] = hs[k].norm_squared();
  std::vector<double> beta(hs.size(), 0.0);
  Vector ball_inc = Vector::Zero(x0.size());
  Vector x = x0;
  Vector start(x0.size());

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    start = x;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      if (norms[k] == 0.0) continue;
      const auto& h = hs[k];
      const double wy = h.dot(x) + beta[k] * norms[k];
      const double next = std::max(0.0, (wy - h.b) / norms[k]);
      const double step = beta[k] - next;
      if (step != 0.0) {
        for (std::size_t t = 0; t < h.idx.size(); ++t) x(h.idx[t]) += step * h.val[t];
      }
      beta[k] = next;
    }
    if (set.ball()) {
      Vector y = x + ball_inc;
      const double r = *set.ball();
      const double ny = y.norm();
      x = ny > r ? Vector(y * (r / ny)) : y;
      ball_inc = y - x;
    }
    if ((x - start).norm() <= opts.tol && violation(set, x) <= opts.tol) return x;
  }
  throw ProjectionError("Dykstra projection did not converge within " +
                            std::to_string(opts.max_sweeps) + " sweeps",
                        x);
}

}  // namespace

Vector project(const ConvexSetSpec& set, const Vector& x, const ProjectionOptions& opts) {
  check_length(set, x);
  if (!(opts.tol > 0.0)) throw std::invalid_argument("projection tolerance must be positive");
  if (set.is_subspace()) {
    Vector p = restrict_to(set.support(), x);
    if (set.ball()) {
      const double np = p.norm();
      if (np > *set.ball()) p *= *set.ball() / np;
    }
    return p;
  }
  if (set.halfspaces().empty()) {
    if (!set.ball() || x.norm() <= *set.ball()) return x;
    return x * (*set.ball() / x.norm());
  }
  return dykstra(set, x, opts);
}

double violation(const ConvexSetSpec& set, const Vector& x) {
  check_length(set, x);
  double v = 0.0;
  if (set.is_subspace()) {
    for (Index i = 0; i < x.size(); ++i) {
      if (!set.support().contains(i)) v = std::max(v, std::abs(x(i)));
    }
  }
  for (const auto& h : set.halfspaces()) v = std::max(v, h.dot(x) - h.b);
  if (set.ball()) v = std::max(v, x.norm() - *set.ball());
  return v;
}

bool contains(const ConvexSetSpec& set, const Vector& x, double tol) {
  return violation(set, x) <= tol;
}

UnionSpace::UnionSpace(std::vector<ConvexSetSpec> members, double tol)
    : members_(std::move(members)) {
  build({}, tol);
}

UnionSpace::UnionSpace(std::vector<ConvexSetSpec> members,
                       std::map<std::pair<Index, Index>, Vector> witnesses, double tol)
    : members_(std::move(members)) {
  build(std::move(witnesses), tol);
}

void UnionSpace::build(std::map<std::pair<Index, Index>, Vector> explicit_witnesses, double tol) {
  if (members_.size() < 2) throw std::invalid_argument("a union needs at least two member sets");
  const Index m = members_.front().dim();
  for (const auto& s : members_) {
    if (s.dim() != m) throw std::invalid_argument("union members have different dimensions");
  }
  const Vector origin = Vector::Zero(m);
  holds_origin_.resize(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) holds_origin_[i] = contains(members_[i], origin, tol);

  for (auto& [key, w] : explicit_witnesses) {
    auto [i, j] = key;
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= size() || i == j) throw std::out_of_range("witness pair index out of range");
    if (!contains(members_[i], w, tol) || !contains(members_[j], w, tol)) {
      throw std::invalid_argument("witness for pair (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") is not in both sets");
    }
    witnesses_[{i, j}] = w;
  }

  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) {
      if (witnesses_.count({i, j}) || (holds_origin_[i] && holds_origin_[j])) continue;
      const auto& wi = members_[i].witness();
      const auto& wj = members_[j].witness();
      if (contains(members_[j], wi, tol)) {
        witnesses_[{i, j}] = wi;
      } else if (contains(members_[i], wj, tol)) {
        witnesses_[{i, j}] = wj;
      } else {
        throw std::invalid_argument("no common point known for members " + std::to_string(i) +
                                    " and " + std::to_string(j) + "; supply a witness");
      }
    }
  }
}

Vector UnionSpace::witness(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  if (i == j) return members_[i].witness();
  auto it = witnesses_.find({i, j});
  if (it != witnesses_.end()) return it->second;
  return Vector::Zero(dim());
}

bool UnionSpace::all_subspaces() const {
  return std::all_of(members_.begin(), members_.end(),
                     [](const ConvexSetSpec& s) { return s.is_subspace(); });
}

std::vector<ConvexSetSpec> nearly_black_family(Index n, Index k) {
  if (k < 0 || k > n) throw std::invalid_argument("nearly-black family needs 0 <= k <= n");
  std::vector<ConvexSetSpec> out;
  std::vector<Index> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), Index{0});
  while (true) {
    out.push_back(ConvexSetSpec::coordinate_subspace(n, IndexSet(pick, n)));
    Index t = k - 1;
    while (t >= 0 && pick[t] == n - k + t) --t;
    if (t < 0) break;
    ++pick[t];
    for (Index u = t + 1; u < k; ++u) pick[u] = pick[u - 1] + 1;
  }
  return out;
}

std::vector<ConvexSetSpec> structured_family(Index n, Index k) {
  if (k < 1 || n - k < 1) throw std::invalid_argument("structured family needs 1 <= k < n");
  std::vector<ConvexSetSpec> out;
  out.reserve(static_cast<std::size_t>(n - k));
  for (Index a = 0; a < n - k; ++a) out.push_back(ConvexSetSpec::interval_subspace(n, a, k));
  return out;
}

LipschitzGrid::LipschitzGrid(Index m) : m_grid(m) {
  if (m < 3 || m % 2 == 0) throw std::invalid_argument("grid size must be odd and at least 3");
}

LinearFunctional LipschitzGrid::point_evaluation() const {
  return LinearFunctional::point(m_grid, center(), 1.0 / scale());
}

namespace {

Halfspace pair_halfspace(Index plus, Index minus, double b) {
  Halfspace h;
  h.idx = {std::min(plus, minus), std::max(plus, minus)};
  h.val = plus < minus ? std::vector<double>{1.0, -1.0} : std::vector<double>{-1.0, 1.0};
  h.b = b;
  return h;
}

std::vector<Halfspace> peak_constraints(const LipschitzGrid& grid) {
  std::vector<Halfspace> hs;
  for (Index j = 0; j < grid.size(); ++j) {
    if (j != grid.center()) hs.push_back(pair_halfspace(j, grid.center(), 0.0));
  }
  return hs;
}

}  // namespace

ConvexSetSpec lipschitz_grid_set(double alpha, GridSide side, Index m_grid) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("Lipschitz exponent must lie in (0, 1]");
  }
  const LipschitzGrid grid(m_grid);
  auto hs = peak_constraints(grid);
  const Index lo = side == GridSide::left ? 0 : grid.center();
  const Index hi = side == GridSide::left ? grid.center() : grid.size() - 1;
  // For alpha = 1 the neighbour constraints imply all the others.
  for (Index i = lo; i <= hi; ++i) {
    const Index last = alpha == 1.0 ? std::min(i + 1, hi) : hi;
    for (Index j = i + 1; j <= last; ++j) {
      const double b = grid.scale() * std::pow(grid.node(j) - grid.node(i), alpha);
      hs.push_back(pair_halfspace(i, j, b));
      hs.push_back(pair_halfspace(j, i, b));
    }
  }
  return ConvexSetSpec::polytope(m_grid, std::move(hs), Vector::Zero(m_grid));
}

ConvexSetSpec peak_grid_set(Index m_grid) {
  const LipschitzGrid grid(m_grid);
  return ConvexSetSpec::polytope(m_grid, peak_constraints(grid), Vector::Zero(m_grid));
}

}  // namespace minimax
