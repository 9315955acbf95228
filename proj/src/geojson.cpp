#include "wildfire/geojson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wildfire/errors.hpp"

namespace wildfire::geojson {

json linear_ring(const Polygon& loop, const LocalFrame& frame) {
  json coords = json::array();
  for (const Point& p : loop) {
    const GeoPoint g = frame.to_geo(p);
    coords.push_back({g.lon, g.lat});
  }
  if (!loop.empty()) coords.push_back(coords.front());
  return coords;
}

json rings_geometry(const IsochroneSet& rings) {
  const LocalFrame frame(rings.anchor);
  std::vector<const Isochrone*> order;
  for (const auto& r : rings.rings) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->minutes > b->minutes; });
  json polygons = json::array();
  for (const auto* r : order) polygons.push_back(json::array({linear_ring(r->polygon, frame)}));
  return {{"type", "MultiPolygon"}, {"coordinates", polygons}};
}

IsochroneSet rings_from_geometry(const json& geometry, const std::vector<int>& ring_minutes, GeoPoint anchor) {
  IsochroneSet out;
  out.anchor = anchor;
  const LocalFrame frame(anchor);
  try {
    if (geometry.at("type") != "MultiPolygon") throw ParseError("rings geometry must be a MultiPolygon");
    const auto& polys = geometry.at("coordinates");
    if (polys.size() != ring_minutes.size()) {
      throw StructuralError("ring count does not match ring_minutes");
    }
    for (std::size_t i = 0; i < polys.size(); ++i) {
      Polygon loop;
      for (const auto& c : polys[i].at(0)) loop.push_back(frame.to_local({c.at(0).get<double>(), c.at(1).get<double>()}));
      if (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      // Geometry is outermost first; minutes are ascending.
      out.rings.push_back({ring_minutes[ring_minutes.size() - 1 - i], std::move(loop)});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("rings geometry: ") + e.what());
  }
  std::sort(out.rings.begin(), out.rings.end(), [](const auto& a, const auto& b) { return a.minutes < b.minutes; });
  return out;
}

json rejection_reasons(const std::vector<ScoredRoute>& rejected, const LocalFrame& frame) {
  json out = json::array();
  for (const auto& r : rejected) {
    if (!r.conflict) continue;
    const GeoPoint g = frame.to_geo(r.conflict->where);
    out.push_back({{"point", {g.lon, g.lat}},
                   {"user_time_s", r.conflict->user_time},
                   {"fire_arrival_s", r.conflict->fire_arrival},
                   {"slot_minutes", r.conflict->slot_minutes},
                   {"time_to_safety_s", r.time_to_safety}});
  }
  return out;
}

json route_feature(const ScoredRoute& route, const LocalFrame& frame, const std::vector<ScoredRoute>& rejected) {
  json coords = json::array();
  for (const Point& p : route.points) {
    const GeoPoint g = frame.to_geo(p);
    coords.push_back({g.lon, g.lat});
  }
  // A zero-length route still needs two positions to be a valid LineString.
  if (coords.size() == 1) coords.push_back(coords.front());
  return {{"type", "Feature"},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
          {"properties",
           {{"score", route.score},
            {"angle_deg", route.angle * 180.0 / std::numbers::pi},
            {"time_to_safety_s", route.time_to_safety},
            {"distance_m", route.length},
            {"mode", mode_name(route.mode)},
            {"entry_times_s", route.entry_times},
            {"rejected_candidates", rejection_reasons(rejected, frame)}}}};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  std::vector<std::string> errors;

  void object(const json& doc, const std::string& where) {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
      fail(where, "GeoJSON object needs a string 'type'");
      return;
    }
    const std::string type = doc["type"];
    if (type == "FeatureCollection") {
      if (!doc.contains("features") || !doc["features"].is_array()) return fail(where, "'features' must be an array");
      for (std::size_t i = 0; i < doc["features"].size(); ++i) {
        feature(doc["features"][i], where + ".features[" + std::to_string(i) + "]");
      }
    } else if (type == "Feature") {
      feature(doc, where);
    } else {
      geometry(doc, where);
    }
  }

 private:
  void fail(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }

  void feature(const json& f, const std::string& where) {
    if (!f.is_object() || f.value("type", "") != "Feature") return fail(where, "expected a Feature");
    if (!f.contains("geometry")) return fail(where, "Feature needs a 'geometry' member");
    if (!f.contains("properties")) return fail(where, "Feature needs a 'properties' member");
    if (!f["properties"].is_null() && !f["properties"].is_object()) fail(where, "'properties' must be an object or null");
    if (!f["geometry"].is_null()) geometry(f["geometry"], where + ".geometry");
  }

  void geometry(const json& g, const std::string& where) {
    if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) return fail(where, "geometry needs a 'type'");
    const std::string type = g["type"];
    if (type == "GeometryCollection") {
      if (!g.contains("geometries") || !g["geometries"].is_array()) return fail(where, "'geometries' must be an array");
      for (std::size_t i = 0; i < g["geometries"].size(); ++i) {
        geometry(g["geometries"][i], where + ".geometries[" + std::to_string(i) + "]");
      }
      return;
    }
    if (!g.contains("coordinates") || !g["coordinates"].is_array()) return fail(where, "'coordinates' must be an array");
    const json& c = g["coordinates"];
    if (type == "Point") {
      position(c, where);
    } else if (type == "MultiPoint") {
      for (const auto& p : c) position(p, where);
    } else if (type == "LineString") {
      line(c, where);
    } else if (type == "MultiLineString") {
      for (const auto& l : c) line(l, where);
    } else if (type == "Polygon") {
      polygon(c, where);
    } else if (type == "MultiPolygon") {
      for (std::size_t i = 0; i < c.size(); ++i) polygon(c[i], where + "[" + std::to_string(i) + "]");
    } else {
      fail(where, "unknown geometry type '" + type + "'");
    }
  }

  bool position(const json& p, const std::string& where) {
    if (!p.is_array() || p.size() < 2 || p.size() > 3) {
      fail(where, "position must hold 2 or 3 numbers");
      return false;
    }
    for (const auto& v : p) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        fail(where, "position values must be finite numbers");
        return false;
      }
    }
    const double lon = p[0], lat = p[1];
    if (lon < -180.0 || lon > 180.0 || lat < -90.0 || lat > 90.0) {
      fail(where, "position outside [lon, lat] range");
      return false;
    }
    return true;
  }

  void line(const json& c, const std::string& where) {
    if (!c.is_array() || c.size() < 2) return fail(where, "LineString needs two or more positions");
    for (const auto& p : c) position(p, where);
  }

  void polygon(const json& rings, const std::string& where) {
    if (!rings.is_array() || rings.empty()) return fail(where, "Polygon needs at least one linear ring");
    for (std::size_t r = 0; r < rings.size(); ++r) {
      const json& ring = rings[r];
      const std::string at = where + ".ring[" + std::to_string(r) + "]";
      if (!ring.is_array() || ring.size() < 4) {
        fail(at, "linear ring needs four or more positions");
        continue;
      }
      Polygon pts;
      bool ok = true;
      for (const auto& p : ring) {
        ok = position(p, at) && ok;
        if (ok) pts.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      if (!ok) continue;
      if (!(ring.front() == ring.back())) {
        fail(at, "linear ring is not closed");
        continue;
      }
      pts.pop_back();
      const double area = signed_area(pts);
      if (r == 0 && area <= 0.0) fail(at, "exterior ring must be counter-clockwise");
      if (r > 0 && area >= 0.0) fail(at, "interior ring must be clockwise");
    }
  }
};

}  // namespace

std::vector<std::string> validate(const json& doc) {
  Validator v;
  v.object(doc, "$");
  return v.errors;
}

}  // namespace wildfire::geojson
