#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wildfire/projection.hpp"
#include "wildfire/routing.hpp"
#include "wildfire/spread.hpp"

namespace wildfire::geojson {

using nlohmann::json;

/// Closed linear ring of [lon, lat] positions.
json linear_ring(const Polygon& loop, const LocalFrame& frame);

/// MultiPolygon of all rings, outermost (latest horizon) first.
json rings_geometry(const IsochroneSet& rings);

/// Inverse of rings_geometry. `ring_minutes` lists horizons in ascending order.
IsochroneSet rings_from_geometry(const json& geometry, const std::vector<int>& ring_minutes, GeoPoint anchor);

/// LineString route with score, angle_deg, time_to_safety_s, mode and rejected_candidates.
json route_feature(const ScoredRoute& route, const LocalFrame& frame,
                   const std::vector<ScoredRoute>& rejected);

/// Rejection details for a set of candidates, as [lon, lat] plus times.
json rejection_reasons(const std::vector<ScoredRoute>& rejected, const LocalFrame& frame);

/// Structural RFC 7946 check. Empty result means valid.
std::vector<std::string> validate(const json& doc);

}  // namespace wildfire::geojson
