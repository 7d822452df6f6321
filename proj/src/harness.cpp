#include "minimax/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace minimax {

void MCConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (!(p >= 1.0)) throw std::invalid_argument("loss power must be >= 1");
}

double pairwise_sum(const double* x, std::size_t len) {
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, len - half);
}

RiskEstimate mc_risk(const Evaluator& est, const Vector& f, const LinearFunctional& c,
                     const NoiseScale& n, const MCConfig& cfg) {
  cfg.validate();
  const double target = apply_functional(c, f);
  const std::size_t R = cfg.reps;
  std::vector<double> loss(R);
  const auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const Vector y = sample(f, n, cfg.seed, r);
      const double d = std::abs(est(y) - target);
      loss[r] = cfg.p == 2.0 ? d * d : std::pow(d, cfg.p);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(R)));
  if (workers == 1) {
    run(0, R);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, R * w / workers, R * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }
  RiskEstimate out;
  out.reps = R;
  out.mean = pairwise_sum(loss.data(), R) / static_cast<double>(R);
  if (R > 1) {
    for (auto& l : loss) l = (l - out.mean) * (l - out.mean);
    const double var = pairwise_sum(loss.data(), R) / static_cast<double>(R - 1);
    out.half_width = 1.96 * std::sqrt(var / static_cast<double>(R));
  }
  return out;
}

AffineRiskCheck mc_risk(const AffineEstimator& est, const Vector& f, const LinearFunctional& c,
                        const NoiseScale& n, const MCConfig& cfg) {
  AffineRiskCheck out;
  out.mc = mc_risk(affine_evaluator(est), f, c, n, cfg);
  out.analytic = analytic_risk(est, f, c, n, cfg.p);
  out.within = std::abs(out.mc.mean - out.analytic) <= out.mc.half_width;
  return out;
}

WorstCase worst_case_risk(const Evaluator& est, const std::vector<Candidate>& candidates,
                          const LinearFunctional& c, const NoiseScale& n, const MCConfig& cfg) {
  if (candidates.empty()) throw std::invalid_argument("candidate list is empty");
  WorstCase out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.per_candidate.push_back(mc_risk(est, candidates[i].f, c, n, cfg));
    if (i == 0 || out.per_candidate[i].mean > out.risk.mean) {
      out.risk = out.per_candidate[i];
      out.index = i;
    }
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::vector<Candidate> curated_candidates(const UnionSpace& U, const LinearFunctional& c,
                                          const NoiseScale& n, const CandidateOptions& opts) {
  const Index m = U.dim();
  const Index K = U.size();
  const Index mid = K / 2;
  const double nv = n.value();
  const double scale = std::sqrt(std::log(nv) / nv);
  std::vector<Candidate> out;
  out.push_back({"zero", Vector::Zero(m)});

  const Index spike_at = U[mid].support().size() > 0 ? U[mid].support().indices().front() : 0;
  for (double r : opts.spike_r) {
    Vector f = Vector::Zero(m);
    f(spike_at) = r * scale;
    out.push_back({"spike:r=" + fmt(r), f});
  }

  std::vector<Index> sets = opts.block_sets;
  if (sets.empty()) {
    sets = {0};
    if (mid != 0) sets.push_back(mid);
    if (K - 1 != mid && K - 1 != 0) sets.push_back(K - 1);
  }
  const double unit = opts.block_unit > 0.0 ? opts.block_unit : scale;
  for (Index s : sets) {
    if (!U[s].is_subspace()) continue;
    for (double r : opts.block_r) {
      Vector f = Vector::Zero(m);
      for (Index i : U[s].support().indices()) f(i) = r * unit;
      out.push_back({"block:set=" + std::to_string(s + 1) + ",r=" + fmt(r), f});
    }
  }

  if (opts.extremal) {
    const auto pair = ordered_modulus(U[0], U[mid], c, n.sigma());
    out.push_back({"extremal:f", pair.f_star});
    out.push_back({"extremal:g", pair.g_star});
  }
  return out;
}

Evaluator selection_evaluator(const PairEstimatorBank& bank) {
  return [&bank](const Vector& y) { return evaluate_selection(bank, y).estimate; };
}

Evaluator affine_evaluator(const AffineEstimator& e) {
  return [e](const Vector& y) { return e.estimate(y); };
}

namespace {

void add_selection_rows(ExperimentReport& rep, const std::string& name, Index n, Index k,
                        const std::vector<Candidate>& cands, const WorstCase& wc, double lower,
                        double rate) {
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& r = wc.per_candidate[i];
    rep.rows.push_back({name, double(n), double(k), double(n), "selection", cands[i].label, r.mean,
                        r.half_width, lower, rate, r.mean / rate});
  }
  rep.rows.push_back({name, double(n), double(k), double(n), "selection",
                      "worst:" + cands[wc.index].label, wc.risk.mean, wc.risk.half_width, lower, rate,
                      wc.risk.mean / rate});
}

ReportRow hull_row(const std::string& name, Index n, Index k, double hull, double lower, double rate,
                   double worst) {
  return {name, double(n), double(k), double(n), "hull_linear", "sup", hull, 0.0, lower, rate,
          worst > 0.0 ? hull / worst : 0.0};
}

}  // namespace

ExperimentReport run_experiment_nearly_black(Index n, Index k, const ExperimentOptions& opts) {
  opts.mc.validate();
  if (n < 2 || k < 0 || k > n) throw std::invalid_argument("nearly-black experiment needs 0 <= k <= n, n >= 2");
  const std::string name = "nearly_black";
  ExperimentReport rep;
  if (k == 0) {
    // Only the zero vector: every estimator that reports 0 is exact.
    rep.rows.push_back({name, double(n), 0.0, double(n), "selection", "worst:zero", 0.0, 0.0, 0.0, 0.0, 0.0});
    rep.rows.push_back({name, double(n), 0.0, double(n), "hull_linear", "sup", 0.0, 0.0, 0.0, 0.0, 0.0});
    return rep;
  }
  if (log_choose(double(n), double(k)) > std::log(double(opts.enumeration_cap)) + 1e-9) {
    throw std::length_error("C(n, k) exceeds the enumeration cap; use the structured experiment");
  }
  const NoiseScale ns{double(n)};
  const auto c = LinearFunctional::ones(n);
  const UnionSpace U(nearly_black_family(n, k));
  const auto bank = build_selection_estimator(U, c, ns);
  CandidateOptions co;
  co.block_unit = std::sqrt(std::log(double(n)) / double(n));
  const auto cands = curated_candidates(U, c, ns, co);
  const auto wc = worst_case_risk(selection_evaluator(bank), cands, c, ns, opts.mc);
  const double rate = double(k * k) * std::log(double(n)) / double(n);
  double lower = two_point_lower_bound(U, c, ns).value;
  if (n >= 4 && k * k <= n) lower = std::max(lower, nearly_black_lower_bound(double(n), double(k)).value);
  add_selection_rows(rep, name, n, k, cands, wc, lower, rate);
  const auto hull = hull_linear_minimax(U, c, ns);
  rep.rows.push_back(hull_row(name, n, k, hull.value, lower, rate, wc.risk.mean));
  return rep;
}

ExperimentReport run_experiment_structured(Index n, Index k, const ExperimentOptions& opts) {
  opts.mc.validate();
  if (k < 1 || n - k < 2) throw std::invalid_argument("structured experiment needs k >= 1 and n - k >= 2");
  const std::string name = "structured";
  ExperimentReport rep;
  const NoiseScale ns{double(n)};
  const auto c = LinearFunctional::ones(n);
  const UnionSpace U(structured_family(n, k));
  const auto bank = build_selection_estimator(U, c, ns);
  CandidateOptions co;
  co.block_unit = std::sqrt(std::log(double(n)) / (double(k) * double(n)));
  const auto cands = curated_candidates(U, c, ns, co);
  const auto wc = worst_case_risk(selection_evaluator(bank), cands, c, ns, opts.mc);
  const double rate = double(k) * std::log(double(n)) / double(n);
  double lower = two_point_lower_bound(U, c, ns).value;
  if (n >= 4) lower = std::max(lower, structured_lower_bound(double(n), double(k)).value);
  add_selection_rows(rep, name, n, k, cands, wc, lower, rate);
  const auto hull = hull_linear_minimax(U, c, ns);
  rep.rows.push_back(hull_row(name, n, k, hull.value, lower, rate, wc.risk.mean));
  return rep;
}

ExperimentReport run_experiment_linear_vs_nonlinear(Index n, Index k, const ExperimentOptions& opts) {
  ExperimentReport rep = run_experiment_structured(n, k, opts);
  for (auto& r : rep.rows) r.experiment = "linear_vs_nonlinear";
  // The unbiased full-sum estimator attains the hull benchmark up to one coordinate.
  AffineEstimator sum;
  sum.w = Vector::Ones(n);
  const NoiseScale ns{double(n)};
  const auto c = LinearFunctional::ones(n);
  const auto chk = mc_risk(sum, Vector(Vector::Zero(n)), c, ns, opts.mc);
  const auto& hull = rep.rows.back();
  const double worst = rep.worst_rows().front()->risk;
  rep.rows.push_back({"linear_vs_nonlinear", double(n), double(k), double(n), "linear_sum", "zero",
                      chk.mc.mean, chk.mc.half_width, hull.bound_lower, hull.bound_upper,
                      worst > 0.0 ? chk.mc.mean / worst : 0.0});
  return rep;
}

ExperimentReport run_experiment_lipschitz(const std::vector<Index>& grid_sizes,
                                          const std::vector<double>& eps_list, double ball) {
  ExperimentReport rep;
  const std::string name = "lipschitz";
  const double c13 = std::cbrt(3.0);
  const double c14_stated = std::pow(2.0, 0.25);
  const double c14_derived = std::pow(6.0, 0.25);
  for (Index g : grid_sizes) {
    const LipschitzGrid grid(g);
    const auto F1 = lipschitz_grid_set(1.0, GridSide::left, g).with_ball(ball);
    const auto F2 = lipschitz_grid_set(0.5, GridSide::right, g).with_ball(ball);
    const UnionSpace U({F1, F2});
    const auto c = grid.point_evaluation();
    for (double e : eps_list) {
      const std::string label = "eps=" + fmt(e);
      const double ceiling = c.weights().norm() * e;
      const auto cell = [&](const std::string& kind, double w, double ref) {
        rep.rows.push_back({name, 0.0, 0.0, double(g), kind, label, w, 0.0, ref, ceiling, ref > 0.0 ? w / ref : 0.0});
      };
      const double r1 = c13 * std::pow(e, 2.0 / 3.0);
      const double r2 = c14_stated * std::sqrt(e);
      cell("omega_F1", ordered_modulus(F1, F1, c, e).omega, r1);
      cell("omega_F2_F1", ordered_modulus(F2, F1, c, e).omega, r1);
      const double w2 = ordered_modulus(F2, F2, c, e).omega;
      cell("omega_F2", w2, r2);
      cell("omega_F1_F2", ordered_modulus(F1, F2, c, e).omega, r2);
      const double r2d = c14_derived * std::sqrt(e);
      rep.rows.push_back({name, 0.0, 0.0, double(g), "omega_F2_derived_ref", label, w2, 0.0, r2d, ceiling,
                          r2d > 0.0 ? w2 / r2d : 0.0});
      // The hull modulus is capped only by the grid: omega = ||c|| eps, which grows like sqrt(grid).
      const double wh = hull_modulus(U, c, e).omega;
      const bool divergent = e > 0.0 && wh >= (1.0 - 1e-4) * ceiling;
      rep.rows.push_back({name, 0.0, 0.0, double(g), "omega_hull", label + (divergent ? ";divergent" : ""), wh,
                          0.0, 0.0, ceiling, ceiling > 0.0 ? wh / ceiling : 0.0});
    }
  }
  return rep;
}

}  // namespace minimax
