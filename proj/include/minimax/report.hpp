#pragma once

// Experiment tables (CSV / JSON) and JSON descriptions of sets and unions.

#include <string>
#include <vector>

#include <json.hpp>

#include "minimax/convex_sets.hpp"

namespace minimax {

struct ReportRow {
  std::string experiment;
  double n = 0.0;
  double k = 0.0;
  double m = 0.0;
  std::string estimator_kind;
  std::string f_label;
  double risk = 0.0;
  double half_width = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double ratio = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  static const std::vector<std::string>& columns();

  std::string to_csv() const;
  nlohmann::json to_json() const;

  /// Rows whose f_label starts with "worst" (the empirical maximum risk of an estimator).
  std::vector<const ReportRow*> worst_rows() const;
  /// Every worst row has risk >= bound_lower.
  bool ordering_ok() const;
};

/// Formats a double deterministically (round-trip precision).
std::string format_number(double x);

// Set schema (indices one-based):
//   {"type": "coordinate_subspace", "m": 3, "indices": [1, 2]}
//   {"type": "interval_subspace", "m": 8, "start": 1, "length": 2}
//   {"type": "polytope", "m": 2, "halfspaces": [{"w": [1, 0], "b": 1}], "witness": [0, 0]}
// each optionally with "ball": r. A union is {"members": [...]}.
ConvexSetSpec set_from_json(const nlohmann::json& j);
nlohmann::json set_to_json(const ConvexSetSpec& s);
UnionSpace union_from_json(const nlohmann::json& j);
nlohmann::json union_to_json(const UnionSpace& U);

}  // namespace minimax
