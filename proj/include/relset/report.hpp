#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "relset/explain.hpp"

namespace relset {

// One explained dataset row plus the batch aggregates, as emitted by the CLI.
struct InstanceRecord {
  int row = 0;  // 0-based input row index
  std::vector<int> subset;
  Rational epsilon;
  Rational precision;
  double wall_ms = 0.0;
  std::vector<DeletionStep> trace;
  std::string declared_class;  // empty when the dataset has no class column
  bool declared_agrees = true;
  std::string predicted_class;
};

nlohmann::json rational_json(const Rational& r);
nlohmann::json record_json(const InstanceRecord& rec);

// Aggregates are derived from the records only, so a reader can recompute
// them; size variance is exact, its square root is reported as a decimal.
nlohmann::json aggregate_json(const std::vector<InstanceRecord>& records);

nlohmann::json run_report(const nlohmann::json& config, const std::vector<InstanceRecord>& records);

std::string report_csv(const std::vector<InstanceRecord>& records);

}  // namespace relset
