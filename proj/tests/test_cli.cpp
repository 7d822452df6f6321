#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minimax/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "minimax");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = minimax::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "minimax_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"bounds", "--kind", "unknown"}).code == 2);
  CHECK(run({"estimate", "--n", "4"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("runtime failures exit with 1") {
  const Run r = run({"bounds", "--kind", "nearly-black", "--n", "100", "--k", "11"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(run({"modulus", "--f", "/nonexistent/set.json"}).code == 1);
}

TEST_CASE("bounds subcommand") {
  const Run r = run({"bounds", "--kind", "nearly-black", "--n", "144", "--k", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["kind"] == "nearly-black");
  CHECK(j["value"].get<double>() == doctest::Approx(8.2277e-4).epsilon(1e-4));
  CHECK(j["feasible"].get<bool>());

  const auto s = nlohmann::json::parse(run({"bounds", "--kind", "selection-error", "--k", "2", "--gamma", "15"}).out);
  CHECK(s["value"].get<double>() == doctest::Approx(4.0 * std::exp(-4.5)).epsilon(1e-12));
}

TEST_CASE("modulus of the subspace example") {
  const Run r = run({"modulus", "--example", "subspace"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("epsilon,omega,attained,method", 0) == 0);
  const Run j = run({"modulus", "--example", "subspace", "--eps", "2", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto rows = nlohmann::json::parse(j.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["omega"].get<double>() == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("modulus from set files") {
  const auto f = scratch("f.json", R"({"type": "coordinate_subspace", "m": 3, "indices": [1, 2]})");
  const auto g = scratch("g.json", R"({"type": "coordinate_subspace", "m": 3, "indices": [3]})");
  const Run r = run({"modulus", "--f", f.string(), "--g", g.string(), "--eps", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto rows = nlohmann::json::parse(r.out);
  CHECK(rows[0]["omega"].get<double>() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("estimate from an observation file") {
  const auto u = scratch("u.json", R"({"members": [
      {"type": "interval_subspace", "m": 4, "start": 1, "length": 2},
      {"type": "interval_subspace", "m": 4, "start": 3, "length": 2}]})");
  const auto y = scratch("y.json", "[5, 5, 0, 0]");
  const Run r = run({"estimate", "--union", u.string(), "--n", "4", "--y", y.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["i_hat"] == 1);
  CHECK(j["estimate"].get<double>() == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("experiment output is reproducible") {
  const std::vector<std::string> args{"experiment", "structured", "--n", "8", "--k", "2", "--reps", "200", "--seed", "3"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("experiment,n,k,m,estimator_kind,f_label,risk,half_width,bound_lower,bound_upper,ratio", 0) == 0);

  const auto path = fs::temp_directory_path() / "minimax_cli_test" / "out.csv";
  auto with_out = args;
  with_out.push_back("--out");
  with_out.push_back(path.string());
  REQUIRE(run(with_out).code == 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == a.out);
}
