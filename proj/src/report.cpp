#include "relset/report.hpp"

#include <cmath>
#include <sstream>

namespace relset {

using nlohmann::json;

json rational_json(const Rational& r) { return json{{"ratio", r.ratio_string()}, {"decimal", r.decimal_string()}}; }

json record_json(const InstanceRecord& rec) {
  json j;
  j["row"] = rec.row;
  j["subset"] = rec.subset;
  j["size"] = rec.subset.size();
  j["epsilon"] = rational_json(rec.epsilon);
  j["precision"] = rational_json(rec.precision);
  j["time_ms"] = rec.wall_ms;
  j["predicted_class"] = rec.predicted_class;
  if (!rec.declared_class.empty()) {
    j["declared_class"] = rec.declared_class;
    j["declared_agrees"] = rec.declared_agrees;
  }
  if (!rec.trace.empty()) {
    json steps = json::array();
    for (const auto& s : rec.trace)
      steps.push_back({{"feature", s.feature}, {"candidate", rational_json(s.candidate)}, {"kept", s.kept}});
    j["trace"] = std::move(steps);
  }
  return j;
}

json aggregate_json(const std::vector<InstanceRecord>& records) {
  json j;
  const long long n = static_cast<long long>(records.size());
  j["count"] = n;
  if (n == 0) return j;

  long long size_sum = 0, size_sq_sum = 0, size_max = 0;
  Rational prec_sum, prec_min = records.front().precision;
  double time_sum = 0.0, time_max = 0.0;
  for (const auto& rec : records) {
    long long s = static_cast<long long>(rec.subset.size());
    size_sum += s;
    size_sq_sum += s * s;
    size_max = std::max(size_max, s);
    prec_sum += rec.precision;
    if (rec.precision < prec_min) prec_min = rec.precision;
    time_sum += rec.wall_ms;
    time_max = std::max(time_max, rec.wall_ms);
  }
  Rational mean_size(size_sum, n);
  Rational variance = Rational(size_sq_sum, n) - mean_size * mean_size;
  j["size_mean"] = rational_json(mean_size);
  j["size_max"] = size_max;
  j["size_variance"] = rational_json(variance);
  j["size_stddev"] = std::sqrt(variance.to_double());
  j["precision_mean"] = rational_json(prec_sum / Rational(n));
  j["precision_min"] = rational_json(prec_min);
  j["time_ms_mean"] = time_sum / static_cast<double>(n);
  j["time_ms_max"] = time_max;
  return j;
}

json run_report(const json& config, const std::vector<InstanceRecord>& records) {
  json j;
  j["config"] = config;
  j["records"] = json::array();
  for (const auto& rec : records) j["records"].push_back(record_json(rec));
  j["aggregates"] = aggregate_json(records);
  return j;
}

std::string report_csv(const std::vector<InstanceRecord>& records) {
  std::ostringstream out;
  out << "row,size,subset,epsilon,epsilon_decimal,precision,precision_decimal,time_ms\n";
  for (const auto& rec : records) {
    out << rec.row << ',' << rec.subset.size() << ',' << '"';
    for (size_t i = 0; i < rec.subset.size(); ++i) out << (i ? " " : "") << rec.subset[i];
    out << '"' << ',' << rec.epsilon.ratio_string() << ',' << rec.epsilon.decimal_string() << ','
        << rec.precision.ratio_string() << ',' << rec.precision.decimal_string() << ',' << rec.wall_ms << '\n';
  }
  return out.str();
}

}  // namespace relset
