#include <doctest.h>

#include <cmath>
#include <random>

#include "minimax/modulus.hpp"

using namespace minimax;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ModulusCurve power_curve(double C, double q) {
  return [C, q](double e) { return ModulusSample{C * std::pow(e, q), e > 0 ? C * q * std::pow(e, q - 1) : INFINITY}; };
}

ModulusCurve linear_curve(double L) {
  return [L](double e) { return ModulusSample{L * e, L}; };
}

void check_extremal(const ConvexSetSpec& F, const ConvexSetSpec& G, const LinearFunctional& c,
                    const OrderedModulusResult& r, double tol) {
  CHECK(contains(F, r.f_star, tol));
  CHECK(contains(G, r.g_star, tol));
  CHECK((r.g_star - r.f_star).norm() <= r.epsilon + tol);
  CHECK(apply_functional(c, r.g_star) - apply_functional(c, r.f_star) == doctest::Approx(r.omega).epsilon(1e-6));
  if (r.epsilon > 0 && r.omega > 0) CHECK(r.u.norm() == doctest::Approx(1.0).epsilon(1e-6));
}

// Max of c.(g - f) over grid points f in F, g in G with ||g - f|| <= eps on [-1, 1]^2.
double grid_modulus(const ConvexSetSpec& F, const ConvexSetSpec& G, const Vector& c, double eps, int N,
                    double* pitch_out) {
  const double pitch = 2.0 / (N - 1);
  *pitch_out = pitch;
  std::vector<char> inF(N * N), inG(N * N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const Vector x = vec({-1.0 + i * pitch, -1.0 + j * pitch});
      inF[i * N + j] = contains(F, x, 0.0);
      inG[i * N + j] = contains(G, x, 0.0);
    }
  }
  const int R = static_cast<int>(std::floor(eps / pitch));
  std::vector<std::pair<int, int>> offsets;
  for (int di = -R; di <= R; ++di) {
    for (int dj = -R; dj <= R; ++dj) {
      if ((di * di + dj * dj) * pitch * pitch <= eps * eps) offsets.push_back({di, dj});
    }
  }
  double best = -INFINITY;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (!inF[i * N + j]) continue;
      for (auto [di, dj] : offsets) {
        const int a = i + di, b = j + dj;
        if (a < 0 || b < 0 || a >= N || b >= N || !inG[a * N + b]) continue;
        best = std::max(best, (c(0) * di + c(1) * dj) * pitch);
      }
    }
  }
  return best;
}

ConvexSetSpec random_polytope(std::mt19937_64& rng, Index m, int faces, double radius) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.1, 0.8);
  std::vector<Halfspace> hs;
  for (int k = 0; k < faces; ++k) {
    Vector w(m);
    for (Index i = 0; i < m; ++i) w(i) = N(rng);
    hs.push_back(Halfspace::from_dense(w.normalized(), U(rng)));
  }
  return ConvexSetSpec::polytope(m, hs, Vector::Zero(m)).with_ball(radius);
}

}  // namespace

TEST_CASE("subspace closed form and extremal pair") {
  const auto F = ConvexSetSpec::coordinate_subspace(3, IndexSet({0, 1}, 3));
  const auto G = ConvexSetSpec::coordinate_subspace(3, IndexSet({1, 2}, 3));
  const auto c = LinearFunctional::ones(3);
  const auto r = ordered_modulus(F, G, c, 2.0);
  CHECK(r.method == ModulusMethod::closed_form);
  CHECK(r.omega == doctest::Approx(2 * std::sqrt(3.0)).epsilon(1e-14));
  const double d = 2.0 / std::sqrt(3.0);
  CHECK((r.g_star - vec({0, d, d})).norm() < 1e-14);
  CHECK((r.f_star - vec({-d, 0, 0})).norm() < 1e-14);
  check_extremal(F, G, c, r, 1e-12);

  const auto rn = ordered_modulus(F, G, c, 2.0, {.force_numeric = true});
  CHECK(rn.method == ModulusMethod::numeric);
  CHECK(rn.omega == doctest::Approx(r.omega).epsilon(1e-6));
  check_extremal(F, G, c, rn, 1e-6);
}

TEST_CASE("functional constant on the set") {
  const auto F = ConvexSetSpec::coordinate_subspace(3, IndexSet({0}, 3));
  const LinearFunctional c(vec({0, 1, 1}));
  for (double e : {0.0, 0.3, 5.0}) CHECK(ordered_modulus(F, F, c, e).omega == 0.0);
  CHECK(ordered_modulus(F, F, c, 0.3, {.force_numeric = true}).omega == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("random subspace pairs: closed form equals numeric") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int t = 0; t < 8; ++t) {
    const Index m = 4 + t % 5;
    std::vector<Index> I, J;
    for (Index i = 0; i < m; ++i) {
      if (rng() % 2) I.push_back(i);
      if (rng() % 3 == 0) J.push_back(i);
    }
    Vector cw(m);
    for (Index i = 0; i < m; ++i) cw(i) = N(rng);
    const auto F = ConvexSetSpec::coordinate_subspace(m, IndexSet(I, m));
    const auto G = ConvexSetSpec::coordinate_subspace(m, IndexSet(J, m));
    const LinearFunctional c(cw);
    const double e = 0.1 + (rng() % 100) / 50.0;
    double expect = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (F.support().contains(i) || G.support().contains(i)) expect += cw(i) * cw(i);
    }
    expect = e * std::sqrt(expect);
    CHECK(ordered_modulus(F, G, c, e).omega == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ordered_modulus(F, G, c, e, {.force_numeric = true}).omega == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("2-D polytope pairs against a pruned 200^4 grid") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 2; ++t) {
    const auto F = random_polytope(rng, 2, 3, 1.0);
    const auto G = random_polytope(rng, 2, 4, 1.0);
    const LinearFunctional c(vec({1.0, -0.5 + t}));
    const double eps = 0.5;
    const auto r = ordered_modulus(F, G, c, eps);
    CHECK(r.method == ModulusMethod::numeric);
    CHECK(r.attained);
    check_extremal(F, G, c, r, 1e-7);
    double pitch = 0.0;
    const double g = grid_modulus(F, G, c.weights(), eps, 200, &pitch);
    CHECK(g <= r.omega + 1e-9);
    CHECK(r.omega - g <= 2.0 * c.weights().lpNorm<1>() * pitch);
  }
}

TEST_CASE("asymmetry is respected") {
  const auto F = ConvexSetSpec::polytope(1, {Halfspace::from_dense(vec({1}), 0.0)}, Vector::Zero(1)).with_ball(1.0);
  const auto G = ConvexSetSpec::polytope(1, {Halfspace::from_dense(vec({-1}), 0.0)}, Vector::Zero(1)).with_ball(1.0);
  const auto c = LinearFunctional::ones(1);
  CHECK(ordered_modulus(F, G, c, 0.5).omega == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(ordered_modulus(G, F, c, 0.5).omega == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("eps = 0 gives zero for every class") {
  const auto F1 = lipschitz_grid_set(1.0, GridSide::left, 33).with_ball(10.0);
  const auto c = LipschitzGrid(33).point_evaluation();
  CHECK(ordered_modulus(F1, F1, c, 0.0).omega == 0.0);
  const auto S = ConvexSetSpec::interval_subspace(8, 1, 2);
  CHECK(ordered_modulus(S, S, LinearFunctional::ones(8), 0.0).omega == 0.0);
}

TEST_CASE("Lipschitz class modulus at grid 129") {
  const Index m = 129;
  const auto F1 = lipschitz_grid_set(1.0, GridSide::left, m).with_ball(10.0);
  const auto c = LipschitzGrid(m).point_evaluation();
  const double eps = 0.05;
  const auto r = ordered_modulus(F1, F1, c, eps);
  const double ref = std::cbrt(3.0) * std::pow(eps, 2.0 / 3.0);
  CHECK(std::abs(r.omega - ref) / ref < 0.10);
  check_extremal(F1, F1, c, r, 1e-6);
}

TEST_CASE("union and hull moduli of subspace families") {
  const Index n = 10, k = 2;
  const UnionSpace U(nearly_black_family(n, k));
  const auto c = LinearFunctional::ones(n);
  CHECK(union_modulus(U, c, 0.3).omega == doctest::Approx(std::sqrt(2.0 * k) * 0.3));
  CHECK(hull_modulus(U, c, 0.3).omega == doctest::Approx(std::sqrt(double(n)) * 0.3));
}

TEST_CASE("hull of two truncated axes is the l1 ball") {
  const auto A = ConvexSetSpec::coordinate_subspace(2, IndexSet({0}, 2)).with_ball(1.0);
  const auto B = ConvexSetSpec::coordinate_subspace(2, IndexSet({1}, 2)).with_ball(1.0);
  const UnionSpace U({A, B});
  const auto c = LinearFunctional::ones(2);
  for (double e : {0.5, 1.0, 3.0}) {
    const auto r = hull_modulus(U, c, e);
    CHECK(r.omega == doctest::Approx(std::min(std::sqrt(2.0) * e, 2.0)).epsilon(1e-6));
  }
  // Union modulus stays on the axes: |c.(g - f)| <= 2 with g, f on the axes.
  CHECK(union_modulus(U, c, 3.0).omega == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("bias for variance on a power curve") {
  const double C = 1.7, q = 0.6, n = 50.0, V = 0.02;
  const auto t = bias_for_variance(power_curve(C, q), n, V);
  const double s = std::sqrt(n * V);
  const double eps_star = std::pow(C * q / s, 1.0 / (1.0 - q));
  CHECK(t.case_tag == TradeoffCase::case_1a);
  CHECK(t.eps_V == doctest::Approx(eps_star).epsilon(1e-6));
  CHECK(t.B == doctest::Approx(0.5 * s * eps_star * (1.0 - q) / q).epsilon(1e-9));
  CHECK(t.B == doctest::Approx(0.5 * (C * std::pow(t.eps_V, q) - s * t.eps_V)).epsilon(1e-9));
  CHECK(variance_for_bias(power_curve(C, q), n, t.B) == doctest::Approx(V).epsilon(1e-6));
}

TEST_CASE("linear modulus: case 2a at the critical variance") {
  const double n = 16.0, k = 2.0;
  const auto t = bias_for_variance(linear_curve(std::sqrt(2 * k)), n, 2 * k / n);
  CHECK(t.B == 0.0);
  CHECK(t.case_tag == TradeoffCase::case_2a);
  CHECK(t.eps_V == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-9));
  CHECK(variance_for_bias(linear_curve(std::sqrt(2 * k)), n, 0.0) == doctest::Approx(2 * k / n).epsilon(1e-12));

  const auto F = ConvexSetSpec::coordinate_subspace(8, IndexSet({0, 1}, 8));
  const auto G = ConvexSetSpec::coordinate_subspace(8, IndexSet({2, 3}, 8));
  const auto ts = bias_for_variance(F, G, LinearFunctional::ones(8), NoiseScale(n), 2 * k / n);
  CHECK(ts.B == 0.0);
  CHECK(ts.case_tag == TradeoffCase::case_2a);
  CHECK(ts.eps_V == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("unbounded and flat curves") {
  const auto t = bias_for_variance(power_curve(1.0, 0.5), 10.0, 0.0);
  CHECK(t.infinite());
  CHECK(t.case_tag == TradeoffCase::case_1b);
  CHECK(bias_for_variance(linear_curve(2.0), 10.0, 0.0).infinite());
  // Above the critical variance a linear curve is decreasing from 0: case 2b.
  const auto t2 = bias_for_variance(linear_curve(1.0), 4.0, 1.0);
  CHECK(t2.B == 0.0);
  CHECK(t2.case_tag == TradeoffCase::case_2b);
  CHECK(t2.eps_V == 0.0);

  const ModulusCurve capped = [](double e) { return ModulusSample{std::min(e, 1.0), e < 1.0 ? 1.0 : 0.0}; };
  CHECK(variance_for_bias(capped, 5.0, 0.5) == 0.0);
  CHECK(variance_for_bias(capped, 5.0, 0.7) == 0.0);
}

TEST_CASE("eps(V) is nonincreasing and V(B(V)) <= V") {
  std::mt19937_64 rng(8);
  const auto F = random_polytope(rng, 3, 4, 1.5);
  const auto c = LinearFunctional(vec({1.0, 0.4, -0.3}));
  const NoiseScale n(100.0);
  const auto curve = modulus_curve(F, F, c);
  double prev = INFINITY;
  for (double V : {0.001, 0.003, 0.01, 0.03, 0.1}) {
    const auto t = bias_for_variance(curve, n.value(), V);
    CHECK(t.eps_V <= prev + 1e-7);
    prev = t.eps_V;
    if (t.B > 0) CHECK(variance_for_bias(curve, n.value(), t.B) <= V * (1 + 1e-6) + 1e-12);
  }
}

TEST_CASE("concavity checks") {
  const std::vector<double> eps = {0.01, 0.04, 0.09, 0.2};
  CHECK(concavity_check(linear_curve(3.0), eps).ok());
  const auto F = ConvexSetSpec::interval_subspace(8, 0, 3);
  const auto G = ConvexSetSpec::interval_subspace(8, 2, 3);
  CHECK(concavity_check(modulus_curve(F, G, LinearFunctional::ones(8)), eps).ok());

  const auto L = lipschitz_grid_set(1.0, GridSide::left, 33).with_ball(10.0);
  const auto rep = concavity_check(modulus_curve(L, L, LipschitzGrid(33).point_evaluation()), {0.01, 0.04, 0.09});
  CHECK(rep.checks > 0);
  CHECK(rep.ok());

  // A convex curve must be caught.
  const ModulusCurve convex = [](double e) { return ModulusSample{e * e, 2 * e}; };
  const auto bad = concavity_check(convex, {0.5, 1.0, 2.0});
  CHECK_FALSE(bad.ok());
}
