#include "minimax/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "minimax/harness.hpp"

namespace minimax {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

Vector to_vector(const nlohmann::json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = arr[i].get<double>();
  return v;
}

Vector parse_list(const std::vector<double>& xs) {
  Vector v(static_cast<Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Index>(i)) = xs[i];
  return v;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("MINIMAX_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw std::runtime_error("MINIMAX_SEED is not an unsigned integer");
    }
  }
  return 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax estimation of linear functionals over unions of convex sets"};
  app.require_subcommand(1);

  std::string format = "csv";
  std::string out_path;

  // modulus
  auto* mod = app.add_subcommand("modulus", "ordered modulus omega(eps, F, G)");
  std::string f_path, g_path, example;
  std::vector<double> eps_list, c_list;
  bool force_numeric = false;
  mod->add_option("--f", f_path, "JSON set F");
  mod->add_option("--g", g_path, "JSON set G (defaults to F)");
  mod->add_option("--example", example, "built-in example")->check(CLI::IsMember({"subspace"}));
  mod->add_option("--eps", eps_list, "epsilon values (default 2)")->delimiter(',');
  mod->add_option("--c", c_list, "functional weights (default all ones)")->delimiter(',');
  mod->add_flag("--numeric", force_numeric, "use the conic solver even for subspaces");
  mod->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  mod->add_option("--out", out_path);

  // estimate
  auto* est = app.add_subcommand("estimate", "selection estimate for one observation");
  std::string union_path, y_path, fvec_path;
  double n_est = 0.0;
  std::uint64_t seed = default_seed();
  bool tables = false;
  est->add_option("--union", union_path, "JSON union of sets")->required();
  est->add_option("--n", n_est, "noise calibration n")->required();
  est->add_option("--y", y_path, "JSON array observation");
  est->add_option("--f", fvec_path, "JSON array parameter to sample from");
  est->add_option("--seed", seed);
  est->add_option("--c", c_list, "functional weights (default all ones)")->delimiter(',');
  est->add_flag("--tables", tables, "include the z tables");
  est->add_option("--out", out_path);

  // bounds
  auto* bnd = app.add_subcommand("bounds", "lower and tail bounds");
  std::string kind;
  double n_b = 0.0, k_b = 0.0, gamma = 3.0, cpar = 2.0, rho = -1.0;
  bnd->add_option("--kind", kind)
      ->required()
      ->check(CLI::IsMember({"nearly-black", "structured", "two-point", "selection-error", "gaussian-tail",
                             "hypergeometric"}));
  bnd->add_option("--n", n_b);
  bnd->add_option("--k", k_b);
  bnd->add_option("--gamma", gamma);
  bnd->add_option("--c-param", cpar);
  bnd->add_option("--rho", rho);
  bnd->add_option("--out", out_path);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run an experiment");
  std::string which;
  Index n_x = 64, k_x = 2;
  std::vector<Index> grids;
  Index m_x = 0;
  MCConfig mc;
  mc.seed = seed;
  exp->add_option("which", which)
      ->required()
      ->check(CLI::IsMember({"nearly-black", "structured", "lipschitz", "linear-vs-nonlinear"}));
  exp->add_option("--n", n_x);
  exp->add_option("--k", k_x);
  exp->add_option("--m", m_x, "grid size (lipschitz)");
  exp->add_option("--grids", grids, "grid sizes (lipschitz)")->delimiter(',');
  exp->add_option("--eps", eps_list, "epsilon values (lipschitz)")->delimiter(',');
  exp->add_option("--reps", mc.reps);
  exp->add_option("--seed", mc.seed);
  exp->add_option("--p", mc.p);
  exp->add_option("--workers", mc.workers);
  exp->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*mod) {
      if (example.empty() && f_path.empty()) {
        err << "modulus: give --f (and optionally --g) or --example\n";
        return 2;
      }
      std::optional<ConvexSetSpec> F, G;
      if (example == "subspace") {
        F = ConvexSetSpec::coordinate_subspace(3, IndexSet({0, 1}, 3));
        G = ConvexSetSpec::coordinate_subspace(3, IndexSet({1, 2}, 3));
      } else {
        F = set_from_json(read_json(f_path));
        G = g_path.empty() ? *F : set_from_json(read_json(g_path));
      }
      const LinearFunctional c = c_list.empty() ? LinearFunctional::ones(F->dim())
                                                : LinearFunctional(parse_list(c_list));
      if (eps_list.empty()) eps_list = {2.0};
      ModulusOptions opts;
      opts.force_numeric = force_numeric;
      nlohmann::json rows = nlohmann::json::array();
      std::ostringstream csv;
      csv << "epsilon,omega,attained,method\n";
      for (double e : eps_list) {
        const auto r = ordered_modulus(*F, *G, c, e, opts);
        csv << format_number(e) << ',' << format_number(r.omega) << ',' << (r.attained ? "true" : "false")
            << ',' << to_string(r.method) << "\n";
        rows.push_back({{"epsilon", e}, {"omega", r.omega}, {"attained", r.attained}, {"method", to_string(r.method)}});
      }
      emit(format == "json" ? rows.dump(2) + "\n" : csv.str(), out_path, out);
      return 0;
    }

    if (*est) {
      if (y_path.empty() == fvec_path.empty()) {
        err << "estimate: give exactly one of --y and --f\n";
        return 2;
      }
      const UnionSpace U = union_from_json(read_json(union_path));
      const NoiseScale ns(n_est);
      const LinearFunctional c = c_list.empty() ? LinearFunctional::ones(U.dim())
                                                : LinearFunctional(parse_list(c_list));
      const Vector y = !y_path.empty() ? to_vector(read_json(y_path))
                                       : sample(to_vector(read_json(fvec_path)), ns, seed);
      const auto bank = build_selection_estimator(U, c, ns);
      SelectionOptions so;
      so.tables = tables;
      const auto o = evaluate_selection(bank, y, so);
      nlohmann::json j = {{"i_hat", o.i_hat + 1}, {"estimate", o.estimate}, {"score", o.score}};
      if (tables) {
        const auto mat = [](const Matrix& a) {
          nlohmann::json rows = nlohmann::json::array();
          for (Index i = 0; i < a.rows(); ++i) {
            nlohmann::json r = nlohmann::json::array();
            for (Index k = 0; k < a.cols(); ++k) r.push_back(a(i, k));
            rows.push_back(r);
          }
          return rows;
        };
        j["z_u"] = mat(o.z_u);
        j["z_l"] = mat(o.z_l);
        j["z"] = mat(o.z);
      }
      emit(j.dump(2) + "\n", out_path, out);
      return 0;
    }

    if (*bnd) {
      nlohmann::json j = {{"kind", kind}, {"n", n_b}, {"k", k_b}};
      const auto put_affinity = [&](const std::optional<AffinityReport>& a) {
        j["affinity"] = a ? nlohmann::json(a->affinity) : nlohmann::json(nullptr);
        j["feasible"] = a ? a->feasible : false;
      };
      if (kind == "nearly-black") {
        const auto v = nearly_black_lower_bound(n_b, k_b);
        j["value"] = v.value;
        put_affinity(v.affinity);
      } else if (kind == "structured") {
        const auto v = structured_lower_bound(n_b, k_b);
        j["value"] = v.value;
        put_affinity(v.affinity);
      } else if (kind == "two-point") {
        const UnionSpace U(nearly_black_family(Index(n_b), Index(k_b)));
        j["value"] = two_point_lower_bound(U, LinearFunctional::ones(Index(n_b)), NoiseScale(n_b)).value;
        put_affinity(std::nullopt);
      } else if (kind == "selection-error") {
        j["value"] = selection_error_bound(k_b, gamma);
        j["gamma"] = gamma;
      } else if (kind == "gaussian-tail") {
        j["value"] = gaussian_max_tail_bound(n_b, cpar);
        j["c_param"] = cpar;
      } else {
        const double r = rho >= 0.0 ? rho : std::sqrt(std::log(n_b / (k_b * k_b)));
        const auto a = hypergeometric_affinity(n_b, k_b, r);
        j["value"] = a.affinity;
        j["rho"] = r;
        j["upper_bound"] = a.upper_bound_used;
        j["affinity"] = a.affinity;
        j["feasible"] = a.feasible;
      }
      emit(j.dump(2) + "\n", out_path, out);
      return 0;
    }

    ExperimentReport rep;
    ExperimentOptions opts;
    opts.mc = mc;
    if (which == "nearly-black") {
      rep = run_experiment_nearly_black(n_x, k_x, opts);
    } else if (which == "structured") {
      rep = run_experiment_structured(n_x, k_x, opts);
    } else if (which == "linear-vs-nonlinear") {
      rep = run_experiment_linear_vs_nonlinear(n_x, k_x, opts);
    } else {
      if (grids.empty()) grids = m_x > 0 ? std::vector<Index>{m_x} : std::vector<Index>{33, 65, 129};
      if (eps_list.empty()) eps_list = {0.01, 0.04, 0.09};
      rep = run_experiment_lipschitz(grids, eps_list);
    }
    emit(format == "json" ? rep.to_json().dump(2) + "\n" : rep.to_csv(), out_path, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace minimax
