#include "wildfire/projection.hpp"

#include <cmath>
#include <numbers>

namespace wildfire {

LocalFrame::LocalFrame(GeoPoint anchor)
    : anchor_(anchor),
      lon_scale_(std::cos(anchor.lat * std::numbers::pi / 180.0) * kMetersPerDegreeLon) {}

Point LocalFrame::to_local(GeoPoint g) const {
  return {(g.lon - anchor_.lon) * lon_scale_, (g.lat - anchor_.lat) * kMetersPerDegreeLat};
}

GeoPoint LocalFrame::to_geo(Point p) const {
  return {anchor_.lon + p.x / lon_scale_, anchor_.lat + p.y / kMetersPerDegreeLat};
}

}  // namespace wildfire
