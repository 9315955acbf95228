#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "wildfire/geometry.hpp"
#include "wildfire/projection.hpp"

namespace wildfire {

/// Wind speed (m/s) and the compass direction the air moves toward.
struct WindSample {
  double speed = 0.0;
  double direction_to = 0.0;

  static WindSample make(double speed, double direction_to);
  /// Velocity vector in m/s, x east and y north.
  Point vector() const { return speed * compass_unit(direction_to); }
};

class WindProvider {
 public:
  virtual ~WindProvider() = default;
  /// `seconds` is the offset from the provider's reference time.
  virtual WindSample at(GeoPoint where, double seconds) const = 0;
};

class ConstantWind final : public WindProvider {
 public:
  explicit ConstantWind(WindSample sample) : sample_(sample) {}
  WindSample at(GeoPoint, double) const override { return sample_; }

 private:
  WindSample sample_;
};

/// Station samples read from a JSON file; queries return the nearest station.
///   {"stations": [{"lon": .., "lat": .., "speed": m/s, "direction_to": degrees}, ...]}
class FileWind final : public WindProvider {
 public:
  struct Station {
    GeoPoint where;
    WindSample sample;
  };

  explicit FileWind(std::vector<Station> stations);
  static FileWind from_json(const nlohmann::json& doc);
  static FileWind load(const std::filesystem::path& path);

  WindSample at(GeoPoint where, double seconds) const override;

 private:
  std::vector<Station> stations_;
};

}  // namespace wildfire
