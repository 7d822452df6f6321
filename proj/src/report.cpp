#include "minimax/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace minimax {

const std::vector<std::string>& ExperimentReport::columns() {
  static const std::vector<std::string> cols = {"experiment", "n", "k", "m", "estimator_kind", "f_label",
                                                "risk", "half_width", "bound_lower", "bound_upper", "ratio"};
  return cols;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

}  // namespace

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << format_number(r.n) << ',' << format_number(r.k) << ','
       << format_number(r.m) << ',' << csv_field(r.estimator_kind) << ',' << csv_field(r.f_label) << ','
       << format_number(r.risk) << ',' << format_number(r.half_width) << ',' << format_number(r.bound_lower)
       << ',' << format_number(r.bound_upper) << ',' << format_number(r.ratio) << "\n";
  }
  return os.str();
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"experiment", r.experiment},
                   {"n", number(r.n)},
                   {"k", number(r.k)},
                   {"m", number(r.m)},
                   {"estimator_kind", r.estimator_kind},
                   {"f_label", r.f_label},
                   {"risk", number(r.risk)},
                   {"half_width", number(r.half_width)},
                   {"bound_lower", number(r.bound_lower)},
                   {"bound_upper", number(r.bound_upper)},
                   {"ratio", number(r.ratio)}});
  }
  return {{"columns", columns()}, {"rows", arr}};
}

std::vector<const ReportRow*> ExperimentReport::worst_rows() const {
  std::vector<const ReportRow*> out;
  for (const auto& r : rows) {
    if (r.f_label.rfind("worst", 0) == 0) out.push_back(&r);
  }
  return out;
}

bool ExperimentReport::ordering_ok() const {
  for (const auto* r : worst_rows()) {
    if (!(r->risk >= r->bound_lower)) return false;
  }
  return true;
}

namespace {

std::vector<Index> one_based(const nlohmann::json& arr, Index m) {
  std::vector<Index> out;
  for (const auto& v : arr) {
    const long i = v.get<long>();
    if (i < 1 || i > m) throw std::invalid_argument("index out of range in set description");
    out.push_back(static_cast<Index>(i - 1));
  }
  return out;
}

Vector to_vector(const nlohmann::json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = arr[i].get<double>();
  return v;
}

nlohmann::json from_vector(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

ConvexSetSpec set_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  const Index m = j.at("m").get<Index>();
  std::optional<ConvexSetSpec> s;
  if (type == "coordinate_subspace") {
    s = ConvexSetSpec::coordinate_subspace(m, IndexSet(one_based(j.at("indices"), m), m));
  } else if (type == "interval_subspace") {
    s = ConvexSetSpec::interval_subspace(m, j.at("start").get<Index>() - 1, j.at("length").get<Index>());
  } else if (type == "polytope") {
    std::vector<Halfspace> hs;
    for (const auto& h : j.at("halfspaces")) {
      const Vector w = to_vector(h.at("w"));
      if (w.size() != m) throw std::invalid_argument("halfspace normal has wrong length");
      hs.push_back(Halfspace::from_dense(w, h.at("b").get<double>()));
    }
    const Vector witness = j.contains("witness") ? to_vector(j.at("witness")) : Vector::Zero(m);
    s = ConvexSetSpec::polytope(m, std::move(hs), witness);
  } else {
    throw std::invalid_argument("unknown set type '" + type + "'");
  }
  if (j.contains("ball")) s = s->with_ball(j.at("ball").get<double>());
  return *s;
}

nlohmann::json set_to_json(const ConvexSetSpec& s) {
  nlohmann::json j;
  j["m"] = s.dim();
  if (s.kind() == SetKind::interval_subspace) {
    j["type"] = "interval_subspace";
    j["start"] = s.interval_start() + 1;
    j["length"] = s.support().size();
  } else if (s.kind() == SetKind::coordinate_subspace) {
    j["type"] = "coordinate_subspace";
    nlohmann::json idx = nlohmann::json::array();
    for (Index i : s.support().indices()) idx.push_back(i + 1);
    j["indices"] = idx;
  } else {
    j["type"] = "polytope";
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& h : s.halfspaces()) hs.push_back({{"w", from_vector(h.dense(s.dim()))}, {"b", h.b}});
    j["halfspaces"] = hs;
    j["witness"] = from_vector(s.witness());
  }
  if (s.ball()) j["ball"] = *s.ball();
  return j;
}

UnionSpace union_from_json(const nlohmann::json& j) {
  std::vector<ConvexSetSpec> members;
  for (const auto& s : j.at("members")) members.push_back(set_from_json(s));
  return UnionSpace(std::move(members));
}

nlohmann::json union_to_json(const UnionSpace& U) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : U.members()) arr.push_back(set_to_json(s));
  return {{"members", arr}};
}

}  // namespace minimax
