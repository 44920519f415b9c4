#include "lextopic/report.hpp"

#include <cstdio>

#include "lextopic/error.hpp"

namespace lextopic {

void MetricReport::set(std::string key, double value) {
  for (auto& [k, v] : values) {
    if (k == key) {
      v = value;
      return;
    }
  }
  values.emplace_back(std::move(key), value);
}

std::optional<double> MetricReport::get(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  return std::nullopt;
}

double MetricReport::at(std::string_view key) const {
  if (auto v = get(key)) return *v;
  throw ValidationError("metric \"" + std::string(key) + "\" not in report " + name);
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& [k, v] : values) metrics.push_back({{"name", k}, {"value", v}});
  return {{"report", name}, {"metrics", metrics}, {"config", config}, {"details", details},
          {"warnings", warnings}};
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
  MetricReport r;
  try {
    r.name = j.at("report").get<std::string>();
    for (const auto& m : j.at("metrics")) r.values.emplace_back(m.at("name").get<std::string>(), m.at("value").get<double>());
    r.config = j.value("config", nlohmann::json::object());
    r.details = j.value("details", nlohmann::json::object());
    r.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report schema: ") + e.what());
  }
  return r;
}

std::string MetricReport::to_text() const {
  std::string out;
  char buf[64];
  for (const auto& [k, v] : values) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out += k + "\t" + buf + "\n";
  }
  for (const auto& w : warnings) out += "warning\t" + w + "\n";
  return out;
}

}  // namespace lextopic
