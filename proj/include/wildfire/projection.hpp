#pragma once

#include "wildfire/geometry.hpp"

namespace wildfire {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Equirectangular local frame anchored at a reference point. Accurate to well
/// under a meter across the tens of kilometers a single fire covers.
class LocalFrame {
 public:
  static constexpr double kMetersPerDegreeLon = 111'320.0;
  static constexpr double kMetersPerDegreeLat = 110'540.0;

  LocalFrame() = default;
  explicit LocalFrame(GeoPoint anchor);

  GeoPoint anchor() const { return anchor_; }
  Point to_local(GeoPoint g) const;
  GeoPoint to_geo(Point p) const;

 private:
  GeoPoint anchor_{};
  double lon_scale_ = kMetersPerDegreeLon;
};

}  // namespace wildfire
