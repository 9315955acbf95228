#include "wildfire/wind.hpp"

#include <fstream>
#include <limits>
#include <numbers>

#include "wildfire/errors.hpp"

namespace wildfire {

WindSample WindSample::make(double speed, double direction_to) {
  if (!(speed >= 0.0) || !std::isfinite(speed)) throw ConfigError("wind speed must be finite and >= 0");
  if (!std::isfinite(direction_to)) throw ConfigError("wind direction must be finite");
  return {speed, normalize_angle(direction_to)};
}

FileWind::FileWind(std::vector<Station> stations) : stations_(std::move(stations)) {
  if (stations_.empty()) throw ConfigError("wind file holds no stations");
}

FileWind FileWind::from_json(const nlohmann::json& doc) {
  std::vector<Station> stations;
  try {
    for (const auto& s : doc.at("stations")) {
      const double deg = s.at("direction_to").get<double>();
      stations.push_back({{s.at("lon").get<double>(), s.at("lat").get<double>()},
                          WindSample::make(s.at("speed").get<double>(), deg * std::numbers::pi / 180.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("wind file: ") + e.what());
  }
  return FileWind(std::move(stations));
}

FileWind FileWind::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open wind file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

WindSample FileWind::at(GeoPoint where, double) const {
  const LocalFrame frame(where);
  const Station* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : stations_) {
    const double d = norm(frame.to_local(s.where));
    if (d < best_d) {
      best_d = d;
      best = &s;
    }
  }
  return best->sample;
}

}  // namespace wildfire
