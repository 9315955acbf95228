#include "wildfire/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "wildfire/errors.hpp"

namespace wildfire {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

Timestamp parse_utc(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c%n", &y, &mo, &d, &h, &mi, &s, &tail,
                  &consumed) != 7 ||
      tail != 'Z' || static_cast<std::size_t>(consumed) != text.size()) {
    throw ParseError("timestamp '" + text + "' is not YYYY-MM-DDTHH:MM:SSZ");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw ParseError("timestamp '" + text + "' out of range");
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s};
}

std::string format_utc(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

void ScenarioConfig::validate() const {
  if (!std::isfinite(ignition.lon) || !std::isfinite(ignition.lat) || std::abs(ignition.lon) > 180.0 ||
      std::abs(ignition.lat) > 90.0) {
    throw ConfigError("ignition must be a valid lon/lat");
  }
  if (!(humidity >= 0.0 && humidity <= 100.0)) throw ConfigError("humidity must be within [0, 100]");
  if (!std::isfinite(temperature)) throw ConfigError("temperature must be finite");
  if (ring_interval <= 0) throw ConfigError("ring_interval must be positive");
  if (horizon <= 0 || horizon % ring_interval != 0) {
    throw ConfigError("horizon must be a positive multiple of ring_interval");
  }
  WindSample::make(wind.speed, wind.direction_to);
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& doc) {
  ScenarioConfig c;
  try {
    const auto& ign = doc.at("ignition");
    c.ignition = {ign.at("lon").get<double>(), ign.at("lat").get<double>()};
    c.ignition_time = parse_utc(doc.at("ignition_time").get<std::string>());
    const auto& wind = doc.at("wind");
    if (wind.contains("file")) {
      c.wind_file = wind.at("file").get<std::string>();
    } else {
      c.wind = WindSample::make(wind.at("speed").get<double>(),
                                wind.at("direction_to").get<double>() * kDegToRad);
    }
    c.humidity = doc.value("humidity", c.humidity);
    c.temperature = doc.value("temperature", c.temperature);
    c.horizon = doc.value("horizon", c.horizon);
    c.ring_interval = doc.value("ring_interval", c.ring_interval);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json wind_json;
  if (wind_file) {
    wind_json = {{"file", *wind_file}};
  } else {
    wind_json = {{"speed", wind.speed}, {"direction_to", wind.direction_to / kDegToRad}};
  }
  return {{"ignition", {{"lon", ignition.lon}, {"lat", ignition.lat}}},
          {"ignition_time", format_utc(ignition_time)},
          {"wind", wind_json},
          {"humidity", humidity},
          {"temperature", temperature},
          {"horizon", horizon},
          {"ring_interval", ring_interval}};
}

}  // namespace wildfire
