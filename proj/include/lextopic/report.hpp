#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace lextopic {

/// Named scalar results plus the configuration that produced them.
/// Insertion order is kept so reports print and serialize stably.
struct MetricReport {
  std::string name;
  std::vector<std::pair<std::string, double>> values;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> warnings;

  void set(std::string key, double value);
  std::optional<double> get(std::string_view key) const;
  double at(std::string_view key) const;

  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);
  /// One "key<TAB>value" line per metric.
  std::string to_text() const;
};

}  // namespace lextopic
