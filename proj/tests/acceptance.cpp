// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "minimax/harness.hpp"

using namespace minimax;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IndexSet random_subset(std::mt19937_64& rng, Index m) {
  std::bernoulli_distribution coin(0.4);
  std::vector<Index> idx;
  for (Index i = 0; i < m; ++i)
    if (coin(rng)) idx.push_back(i);
  if (idx.empty()) idx.push_back(std::uniform_int_distribution<Index>(0, m - 1)(rng));
  return IndexSet(idx, m);
}

Outcome subspace_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> E(0.01, 3.0);
  ModulusOptions numeric;
  numeric.force_numeric = true;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index m = std::uniform_int_distribution<Index>(2, 12)(rng);
    const IndexSet I = random_subset(rng, m), J = random_subset(rng, m);
    Vector c(m);
    for (Index i = 0; i < m; ++i) c(i) = N(rng);
    const double eps = E(rng);
    const IndexSet u = set_union(I, J, m);
    double cu = 0.0;
    for (Index i : u.indices()) cu += c(i) * c(i);
    const double ref = eps * std::sqrt(cu);
    const auto F = ConvexSetSpec::coordinate_subspace(m, I);
    const auto G = ConvexSetSpec::coordinate_subspace(m, J);
    const double w = ordered_modulus(F, G, LinearFunctional(c), eps, numeric).omega;
    worst = std::max(worst, std::abs(w - ref) / ref);
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 30.0, "max rel err " + num(worst) + " over 50 cases, " + num(secs) + " s"};
}

ConvexSetSpec random_polytope(std::mt19937_64& rng, Index m) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.1, 0.8);
  const int faces = std::uniform_int_distribution<int>(int(m) + 1, int(m) + 4)(rng);
  std::vector<Halfspace> hs;
  for (int k = 0; k < faces; ++k) {
    Vector w(m);
    for (Index i = 0; i < m; ++i) w(i) = N(rng);
    hs.push_back(Halfspace::from_dense(w.normalized(), U(rng)));
  }
  return ConvexSetSpec::polytope(m, hs, Vector::Zero(m)).with_ball(1.0);
}

// Largest value of g.x over S: projected ascent from a grid of starts (and the full grid in 2-D).
double maximise_linear(const ConvexSetSpec& S, const Vector& g, std::mt19937_64& rng) {
  const Index m = S.dim();
  double best = -INFINITY;
  if (m == 2) {
    const int N = 400;
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const Vector x = (Vector(2) << -1.0 + 2.0 * i / (N - 1), -1.0 + 2.0 * j / (N - 1)).finished();
        if (contains(S, x, 0.0)) best = std::max(best, g.dot(x));
      }
    }
  }
  std::normal_distribution<double> N(0.0, 1.0);
  const double step = 0.05 / std::max(g.norm(), 1e-300);
  for (int s = 0; s < 12; ++s) {
    Vector x(m);
    for (Index i = 0; i < m; ++i) x(i) = N(rng);
    x = project(S, x);
    for (int it = 0; it < 400; ++it) {
      const Vector next = project(S, x + step * g);
      const bool still = (next - x).norm() < 1e-13;
      x = next;
      if (still) break;
    }
    best = std::max(best, g.dot(x));
  }
  return best;
}

Outcome bias_control_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> N(0.0, 1.0);
  const NoiseScale n(100.0);
  const double V = 0.01;
  double var_err = 0.0, sup_err = 0.0, attain_err = 0.0;
  int nontrivial = 0;
  for (int t = 0; t < 10; ++t) {
    const Index m = 2 + t % 3;
    const auto F = random_polytope(rng, m);
    const auto G = random_polytope(rng, m);
    Vector cw(m);
    for (Index i = 0; i < m; ++i) cw(i) = N(rng);
    cw *= 1.5 / cw.norm();
    const LinearFunctional c(cw);
    const auto bc = build_bias_controlled(F, G, c, n, V);
    const auto& e = bc.estimator;
    const double B = bc.tradeoff.B;
    if (B > 0.0) ++nontrivial;
    var_err = std::max(var_err, std::abs(e.variance(n) - V) / V);
    // bias(f) = a + (w - c).f, so the extremes are linear maximisations.
    const Vector d = e.w - cw;
    const double sup_f = e.a + maximise_linear(F, d, rng);
    const double inf_g = e.a - maximise_linear(G, Vector(-d), rng);
    sup_err = std::max({sup_err, std::abs(sup_f - B), std::abs(-inf_g - B)});
    if (bc.extremal) {
      attain_err = std::max(attain_err, std::abs(e.bias(bc.extremal->f_star, c) - B));
      attain_err = std::max(attain_err, std::abs(e.bias(bc.extremal->g_star, c) + B));
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = var_err <= 1e-12 && sup_err <= 1e-4 && attain_err <= 1e-4 && secs < 120.0;
  return {ok, "variance rel err " + num(var_err) + ", |sup bias - B| " + num(sup_err) + ", |bias(f*) - B| " +
                  num(attain_err) + ", " + std::to_string(nontrivial) + "/10 with B > 0, " + num(secs) + " s"};
}

Outcome concavity_suite() {
  const std::vector<double> eps{0.01, 0.03, 0.08, 0.15, 0.3, 0.6, 1.0, 1.7, 2.5};
  std::size_t checks = 0, violations = 0, eps_v_breaks = 0, curves = 0;
  const auto run = [&](const ModulusCurve& w, double n) {
    const auto rep = concavity_check(w, eps, 1e-8);
    checks += rep.checks;
    violations += rep.violations.size();
    ++curves;
    double prev = INFINITY;
    for (double V : {0.002, 0.01, 0.05, 0.2, 1.0}) {
      const auto tp = bias_for_variance(w, n, V);
      if (tp.eps_V > prev * (1 + 1e-8) + 1e-12) ++eps_v_breaks;
      prev = tp.eps_V;
    }
  };
  const auto pair_curves = [&](const UnionSpace& U, const LinearFunctional& c, double n, Index stride) {
    for (Index i = 0; i < U.size(); i += stride)
      for (Index j = 0; j < U.size(); j += stride) run(modulus_curve(U[i], U[j], c), n);
    run([U, c](double e) { return ModulusSample{hull_modulus(U, c, e).omega}; }, n);
    std::vector<double> u;
    for (double e : eps) u.push_back(union_modulus(U, c, e).omega);
    for (std::size_t a = 1; a < u.size(); ++a)
      if (u[a] < u[a - 1] - 1e-8) ++violations;
  };
  pair_curves(UnionSpace(nearly_black_family(8, 2)), LinearFunctional::ones(8), 8.0, 5);
  pair_curves(UnionSpace(structured_family(16, 3)), LinearFunctional::ones(16), 16.0, 3);
  {
    const Index g = 33;
    const auto F1 = lipschitz_grid_set(1.0, GridSide::left, g).with_ball(10.0);
    const auto F2 = lipschitz_grid_set(0.5, GridSide::right, g).with_ball(10.0);
    const auto P = peak_grid_set(g).with_ball(10.0);
    const auto c = LipschitzGrid(g).point_evaluation();
    for (const auto* a : {&F1, &F2, &P})
      for (const auto* b : {&F1, &F2, &P}) run(modulus_curve(*a, *b, c), 100.0);
  }
  {
    std::mt19937_64 rng(303);
    for (int t = 0; t < 4; ++t) {
      const Index m = 2 + t % 3;
      const auto A = random_polytope(rng, m), B = random_polytope(rng, m);
      run(modulus_curve(A, B, LinearFunctional::ones(m)), 25.0);
    }
  }
  return {violations == 0 && eps_v_breaks == 0,
          std::to_string(curves) + " curves, " + std::to_string(checks) + " checks, " + std::to_string(violations) +
              " violations, " + std::to_string(eps_v_breaks) + " eps(V) increases"};
}

Outcome hull_benchmark_nearly_black() {
  std::string detail;
  bool ok = true;
  for (Index n : {16, 64}) {
    for (Index k : {1, 2}) {
      const UnionSpace U(nearly_black_family(n, k));
      const auto c = LinearFunctional::ones(n);
      const NoiseScale ns{double(n)};
      const auto hull = hull_linear_minimax(U, c, ns);
      AffineEstimator sum;
      sum.w = Vector::Ones(n);
      MCConfig cfg;
      cfg.reps = 20000;
      cfg.seed = 404;
      const auto chk = mc_risk(sum, Vector(Vector::Zero(n)), c, ns, cfg);
      const bool here = std::abs(hull.value - 1.0) <= 1e-9 && std::abs(chk.mc.mean - 1.0) <= chk.mc.half_width;
      ok = ok && here;
      detail += "n=" + std::to_string(n) + ",k=" + std::to_string(k) + ": hull " + num(hull.value) + ", sum risk " +
                num(chk.mc.mean) + " +/- " + num(chk.mc.half_width) + "; ";
    }
  }
  return {ok, detail};
}

Outcome selection_error() {
  const Index n = 64, k = 2;
  const UnionSpace U(structured_family(n, k));
  const auto c = LinearFunctional::ones(n);
  const NoiseScale ns{double(n)};
  const auto bank = build_selection_estimator(U, c, ns);
  const double w = union_modulus(U, c, ns.sigma()).omega;
  const Index truth = 20, rival = 23;
  const int R = 10000;
  bool ok = true;
  std::string detail = "M " + num(bank.M()) + ", omega " + num(w) + "; ";
  for (double gamma : {10.0, 15.0}) {
    // A block on the true set with sum gamma M omega gives the disjoint rival exactly that bias.
    Vector f = Vector::Zero(n);
    for (Index i : U[truth].support().indices()) f(i) = gamma * bank.M() * w / double(k);
    const double bias = std::abs(bank.base(rival).bias(f, c));
    int hits = 0;
    for (int r = 0; r < R; ++r) hits += evaluate_selection(bank, sample(f, ns, 505, r)).i_hat == rival;
    const double p = double(hits) / R;
    const double bound = selection_error_bound(double(k), gamma);
    const double se = std::sqrt(std::max(bound * (1.0 - bound), 0.0) / R);
    const bool here = bias >= gamma * bank.M() * w * (1 - 1e-12) && p <= bound + 3.0 * se;
    ok = ok && here;
    detail += "gamma " + num(gamma) + ": freq " + num(p) + " vs bound " + num(bound) + " (set-count form " +
              num(std::min(1.0, selection_error_bound(double(U.size()), gamma))) + "); ";
  }
  return {ok, detail};
}

struct RunLog {
  std::vector<std::pair<std::string, ExperimentReport>> reports;
  double structured_secs = 0.0;
};

RunLog& runs() {
  static RunLog log;
  return log;
}

ExperimentOptions mc_opts(std::size_t reps) {
  ExperimentOptions o;
  o.mc.reps = reps;
  o.mc.seed = 606;
  o.mc.p = 2.0;
  return o;
}

Outcome structured_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> ratios;
  std::string detail;
  for (auto [n, k] : std::vector<std::pair<Index, Index>>{{256, 4}, {1024, 6}, {4096, 8}}) {
    auto rep = run_experiment_structured(n, k, mc_opts(2000));
    const auto* worst = rep.worst_rows().front();
    const double r = worst->risk / (double(k) * std::log(double(n)) / double(n));
    ratios.push_back(r);
    detail += "(" + std::to_string(n) + "," + std::to_string(k) + ") " + num(r) + "; ";
    runs().reports.emplace_back("structured " + std::to_string(n) + " " + std::to_string(k), std::move(rep));
  }
  const double secs = seconds_since(t0);
  runs().structured_secs = secs;
  const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
  return {spread < 2.0 && secs < 600.0, "risk/(k ln n/n): " + detail + "spread " + num(spread) + ", " + num(secs) + " s"};
}

Outcome linear_gap() {
  auto rep = run_experiment_linear_vs_nonlinear(4096, 8, mc_opts(2000));
  double hull = 0.0;
  for (const auto& r : rep.rows)
    if (r.estimator_kind == "hull_linear") hull = r.risk;
  const double worst = rep.worst_rows().front()->risk;
  const double ratio = hull / worst;
  runs().reports.emplace_back("linear_vs_nonlinear 4096 8", std::move(rep));
  return {ratio >= 10.0, "hull-linear " + num(hull) + " / selection " + num(worst) + " = " + num(ratio)};
}

std::vector<std::vector<int>> all_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> mask(n, 0);
  std::fill(mask.end() - k, mask.end(), 1);
  do {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask[i]) s.push_back(i);
    out.push_back(s);
  } while (std::next_permutation(mask.begin(), mask.end()));
  return out;
}

Outcome affinity_machinery() {
  double oracle_err = 0.0;
  for (int n = 2; n <= 4; ++n) {
    for (int k = 1; 2 * k <= n; ++k) {
      const auto S = all_subsets(n, k);
      for (double rho : {0.0, 0.5, 1.0, std::sqrt(std::log(4.0)), 2.0}) {
        double avg = 0.0;
        for (const auto& a : S) {
          for (const auto& b : S) {
            int j = 0;
            for (int x : a) j += int(std::count(b.begin(), b.end(), x));
            avg += std::exp(rho * rho * j);
          }
        }
        avg /= double(S.size() * S.size());
        oracle_err = std::max(oracle_err, std::abs(hypergeometric_affinity(n, k, rho).affinity - avg) / std::max(1.0, avg));
      }
    }
  }
  double worst_aff = 0.0;
  for (auto [n, k] : std::vector<std::pair<double, double>>{{100, 3}, {1e4, 10}, {1e6, 30}}) {
    worst_aff = std::max(worst_aff, hypergeometric_affinity(n, k, std::sqrt(std::log(n / (k * k)))).affinity);
  }
  const double e = std::exp(1.0);
  const double r = -2.0 * e + std::sqrt(4.0 * e * e + 1.0);
  const double c1_err = std::abs(nearly_black_c1() - r * r);
  const double lb = nearly_black_lower_bound(1e6, 10).value;
  const bool ok = oracle_err <= 1e-12 && worst_aff <= 4.0 * e && c1_err <= 1e-12 && std::abs(lb - 7.612e-6) <= 1e-9;
  return {ok, "oracle err " + num(oracle_err) + ", max affinity " + num(worst_aff) + " <= 4e = " + num(4 * e) +
                  ", c1 err " + num(c1_err) + ", bound(1e6, 10) = " + num(lb)};
}

Outcome structured_affinity_check() {
  bool ok = true;
  std::string detail;
  for (auto [n, k] : std::vector<std::pair<double, double>>{{64, 2}, {1024, 8}}) {
    const auto rep = structured_affinity(n, k, structured_rho(n, k));
    const double identity = std::abs(rep.upper_bound_used - 4.0);
    ok = ok && rep.affinity <= 4.0 && identity <= 1e-12;
    detail += "(" + num(n) + "," + num(k) + ") affinity " + num(rep.affinity) + ", identity err " + num(identity) + "; ";
  }
  return {ok, detail};
}

Outcome lipschitz_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Index> grids{33, 65, 129};
  const std::vector<double> eps{0.01, 0.04, 0.09};
  auto rep = run_experiment_lipschitz(grids, eps);
  const double secs = seconds_since(t0);
  // err[eps][grid] for F1; hull[eps][grid]
  std::map<std::string, std::map<double, double>> err, hull;
  bool all_divergent = true;
  for (const auto& r : rep.rows) {
    const std::string e = r.f_label.substr(0, r.f_label.find(';'));
    if (r.estimator_kind == "omega_F1") err[e][r.m] = std::abs(r.risk / r.bound_lower - 1.0);
    if (r.estimator_kind == "omega_hull") {
      hull[e][r.m] = r.risk;
      all_divergent = all_divergent && r.f_label.find(";divergent") != std::string::npos;
    }
  }
  bool ok = all_divergent && secs < 300.0;
  std::string detail;
  for (const auto& [e, by_grid] : err) {
    double prev = INFINITY;
    for (Index g : grids) {
      const double v = by_grid.at(double(g));
      ok = ok && v <= prev + 1e-12;
      prev = v;
    }
    ok = ok && by_grid.at(129.0) <= 0.10;
    const double growth = hull[e].at(129.0) / hull[e].at(33.0);
    ok = ok && std::abs(growth - 2.0) < 0.05;
    detail += e + ": F1 err " + num(by_grid.at(33.0)) + " -> " + num(by_grid.at(65.0)) + " -> " + num(by_grid.at(129.0)) +
              ", hull growth " + num(growth) + "; ";
  }
  runs().reports.emplace_back("lipschitz", std::move(rep));
  return {ok, detail + "hull divergent " + std::string(all_divergent ? "yes" : "no") + ", " + num(secs) + " s"};
}

Outcome ordering_and_reproducibility() {
  runs().reports.emplace_back("nearly_black 16 2", run_experiment_nearly_black(16, 2, mc_opts(2000)));
  bool ok = true;
  std::string detail;
  for (const auto& [name, rep] : runs().reports) {
    bool ordered = rep.ordering_ok();
    if (name == "lipschitz") {
      for (const auto& r : rep.rows) ordered = ordered && r.risk <= r.bound_upper * (1 + 1e-9);
    }
    ExperimentReport again;
    if (name == "lipschitz") {
      again = run_experiment_lipschitz({33, 65, 129}, {0.01, 0.04, 0.09});
    } else {
      const auto sp1 = name.find(' '), sp2 = name.rfind(' ');
      const Index n = std::stol(name.substr(sp1 + 1, sp2 - sp1 - 1)), k = std::stol(name.substr(sp2 + 1));
      const std::string kind = name.substr(0, sp1);
      if (kind == "structured") again = run_experiment_structured(n, k, mc_opts(2000));
      if (kind == "linear_vs_nonlinear") again = run_experiment_linear_vs_nonlinear(n, k, mc_opts(2000));
      if (kind == "nearly_black") again = run_experiment_nearly_black(n, k, mc_opts(2000));
    }
    const bool same = again.to_csv() == rep.to_csv();
    ok = ok && ordered && same;
    detail += name + (ordered ? " ordered" : " UNORDERED") + (same ? "/identical" : "/DIFFERENT") + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 subspace modulus closed form", subspace_closed_form},
      {"2 bias-controlled estimator exactness", bias_control_exactness},
      {"3 concavity and monotonicity of the modulus", concavity_suite},
      {"4 hull-linear benchmark on nearly-black", hull_benchmark_nearly_black},
      {"5 selection error frequency", selection_error},
      {"6 structured rate stability", structured_rate},
      {"7 linear versus selection gap", linear_gap},
      {"8 hypergeometric affinity machinery", affinity_machinery},
      {"9 structured affinity", structured_affinity_check},
      {"10 Lipschitz modulus convergence", lipschitz_convergence},
      {"11 bound ordering and reproducibility", ordering_and_reproducibility},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
