#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wildfire/projection.hpp"
#include "wildfire/wind.hpp"

namespace wildfire {

using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM:SSZ". Throws ParseError.
Timestamp parse_utc(const std::string& text);
std::string format_utc(Timestamp t);

struct ScenarioConfig {
  GeoPoint ignition{};
  Timestamp ignition_time{};
  WindSample wind{};
  /// When set, wind comes from this station file instead of `wind`.
  std::optional<std::string> wind_file;
  double humidity = 30.0;     // percent
  double temperature = 20.0;  // degrees Celsius; carried, not used by the spread rate
  int horizon = 60;           // minutes
  int ring_interval = 15;     // minutes

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  static ScenarioConfig from_json(const nlohmann::json& doc);
  static ScenarioConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace wildfire
