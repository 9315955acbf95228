#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wildfire::testing {

namespace {

constexpr double kPi = std::numbers::pi;

double shoelace(const std::vector<std::array<double, 2>>& ring) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    s += ring[i][0] * ring[i + 1][1] - ring[i + 1][0] * ring[i][1];
  }
  return s / 2.0;
}

}  // namespace

std::filesystem::path fixture(const std::string& relative) {
  return std::filesystem::path(WILDFIRE_FIXTURES) / relative;
}

TerrainGrid uniform_terrain(GeoPoint center, int n, double cell, FuelClass fuel,
                            const std::function<double(Point)>& elevation, FuelCatalog catalog) {
  const double half = n * cell / 2.0;
  const LocalFrame frame(center);
  GridSpec spec{n, n, cell, frame.to_geo({-half, -half})};
  std::vector<FuelClass> classes(static_cast<std::size_t>(n) * n, fuel);
  std::vector<double> elev(classes.size(), 0.0);
  if (elevation) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const Point centre{(c + 0.5) * cell, (n - r - 0.5) * cell};
        elev[static_cast<std::size_t>(r) * n + c] = elevation(centre);
      }
    }
  }
  return TerrainGrid(spec, std::move(classes), std::move(elev), std::move(catalog));
}

FuelCatalog single_fuel_catalog(double r0, double wind_coeff, double slope_coeff) {
  FuelCatalog c;
  c.add(1, FuelEntry{"test", FuelParams{r0, wind_coeff, slope_coeff}, "fine"});
  return c;
}

ScenarioConfig make_scenario(GeoPoint ignition, double wind_speed, double direction_to_deg,
                             double humidity) {
  ScenarioConfig s;
  s.ignition = ignition;
  s.ignition_time = parse_utc("2023-06-10T14:00:00Z");
  s.wind = WindSample::make(wind_speed, direction_to_deg * kPi / 180.0);
  s.humidity = humidity;
  return s;
}

double extent_along(const Polygon& polygon, double compass_radians) {
  const double ux = std::sin(compass_radians), uy = std::cos(compass_radians);
  double best = -std::numeric_limits<double>::infinity();
  for (const Point& p : polygon) best = std::max(best, p.x * ux + p.y * uy);
  return best;
}

bool inside_oracle(const Polygon& poly, Point p) {
  const std::size_t n = poly.size();
  bool in = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[j], b = poly[i];
    const double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), 1.0});
    if (std::abs(cr) <= 1e-9 * scale * scale && std::min(a.x, b.x) - 1e-9 <= p.x &&
        p.x <= std::max(a.x, b.x) + 1e-9 && std::min(a.y, b.y) - 1e-9 <= p.y &&
        p.y <= std::max(a.y, b.y) + 1e-9) {
      return true;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

double arrival_oracle(const IsochroneSet& rings, Point p) {
  for (std::size_t k = 0; k < rings.rings.size(); ++k) {
    if (inside_oracle(rings.rings[k].polygon, p)) {
      return k == 0 ? 0.0 : rings.rings[k - 1].minutes * 60.0;
    }
  }
  return std::numeric_limits<double>::infinity();
}

int count_violations(const ScoredRoute& route, const IsochroneSet& rings, double margin, double step) {
  int bad = 0;
  if (route.points.size() == 1) {
    return route.entry_times.front() + margin < arrival_oracle(rings, route.points.front()) ? 0 : 1;
  }
  for (std::size_t i = 0; i + 1 < route.points.size(); ++i) {
    const Point a = route.points[i], b = route.points[i + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int s = 0; s <= n; ++s) {
      const double f = static_cast<double>(s) / n;
      const Point p{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
      const double user = route.entry_times[i] + f * (route.entry_times[i + 1] - route.entry_times[i]);
      if (!(user + margin < arrival_oracle(rings, p))) ++bad;
    }
  }
  return bad;
}

IsochroneSet circular_rings(double r0, double growth, int vertices) {
  IsochroneSet set;
  set.anchor = kAthalassa;
  for (int m = 0; m <= 60; m += 15) {
    Polygon poly;
    const double r = r0 + growth * m;
    for (int k = 0; k < vertices; ++k) {
      const double th = 2.0 * kPi * k / vertices;
      poly.push_back({r * std::cos(th), r * std::sin(th)});
    }
    set.rings.push_back({m, std::move(poly)});
  }
  return set;
}

std::vector<std::vector<int>> all_simple_paths(const RoadGraph& graph, int from, const std::set<int>& targets,
                                               Mode mode) {
  std::vector<std::vector<int>> out;
  std::vector<int> path{from};
  std::vector<char> used(graph.node_count(), 0);
  used[static_cast<std::size_t>(from)] = 1;
  std::function<void(int)> walk = [&](int u) {
    if (path.size() > 1 && targets.contains(u)) out.push_back(path);
    for (int e : graph.incident(u)) {
      const RoadEdge& edge = graph.edges()[static_cast<std::size_t>(e)];
      if (!allows(edge.modes, mode)) continue;
      const int v = edge.a == u ? edge.b : edge.a;
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      path.push_back(v);
      walk(v);
      path.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    }
  };
  walk(from);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ToyProblem random_toy(std::mt19937_64& rng, int max_nodes) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(6, max_nodes);
  for (;;) {
    ToyProblem toy;
    toy.rings = circular_rings(5.0, 3.0);
    toy.fire_direction = 2.0 * kPi * unit(rng);
    const int n = count(rng);
    const double r = 300.0 + 600.0 * unit(rng);
    const double th = 2.0 * kPi * unit(rng);
    toy.start = {r * std::cos(th), r * std::sin(th)};
    toy.graph.add_node(toy.start);
    for (int i = 1; i < n; ++i) toy.graph.add_node({-2500.0 + 5000.0 * unit(rng), -2500.0 + 5000.0 * unit(rng)});
    // Random spanning tree plus extra chords.
    for (int i = 1; i < n; ++i) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      toy.graph.add_edge(i, pick(rng), kAllModes);
    }
    std::uniform_int_distribution<int> any(0, n - 1);
    const int extra = n / 2 + 1;
    for (int e = 0; e < extra; ++e) {
      const int a = any(rng), b = any(rng);
      if (a != b && !toy.graph.hop_length(a, b, Mode::Walking)) toy.graph.add_edge(a, b, kAllModes);
    }
    const FireTimeline timeline(toy.rings);
    const auto safe = safe_nodes(toy.graph, timeline);
    if (!safe.empty() && !safe.contains(0)) return toy;
  }
}

std::vector<ScoredRoute> exhaustive_survivors(const ToyProblem& toy, const TransportMode& mode,
                                              const RoutingOptions& options) {
  const FireTimeline timeline(toy.rings);
  const auto safe = safe_nodes(toy.graph, timeline, options.safe_distance);
  std::vector<ScoredRoute> out;
  for (auto& p : all_simple_paths(toy.graph, 0, safe, mode.mode)) {
    ScoredRoute r = make_route(toy.graph, p, mode, options.departure_s);
    if (!check_fire_conflict(r, timeline, options.margin_s, options.sample_step)) out.push_back(std::move(r));
  }
  return out;
}

const ScoredRoute& oracle_min_time(const std::vector<ScoredRoute>& routes) {
  return *std::min_element(routes.begin(), routes.end(), [](const ScoredRoute& a, const ScoredRoute& b) {
    if (a.time_to_safety != b.time_to_safety) return a.time_to_safety < b.time_to_safety;
    return a.nodes < b.nodes;
  });
}

const ScoredRoute& oracle_max_angle(const std::vector<ScoredRoute>& routes, double fire_direction) {
  auto angle = [&](const ScoredRoute& r) {
    const Point a = r.points.front(), b = r.points.back();
    double d = std::fmod(std::abs(std::atan2(b.x - a.x, b.y - a.y) - fire_direction), 2.0 * kPi);
    return d > kPi ? 2.0 * kPi - d : d;
  };
  return *std::min_element(routes.begin(), routes.end(), [&](const ScoredRoute& a, const ScoredRoute& b) {
    const double aa = angle(a), ab = angle(b);
    if (aa != ab) return aa > ab;
    if (a.time_to_safety != b.time_to_safety) return a.time_to_safety < b.time_to_safety;
    return a.nodes < b.nodes;
  });
}

namespace {

using nlohmann::json;

void check_position(const json& p, std::vector<std::string>& errs) {
  if (!p.is_array() || p.size() < 2 || p.size() > 3) {
    errs.push_back("position must hold 2 or 3 numbers");
    return;
  }
  for (const auto& v : p) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) errs.push_back("position value is not a finite number");
  }
  if (errs.empty() && (std::abs(p[0].get<double>()) > 180.0 || std::abs(p[1].get<double>()) > 90.0)) {
    errs.push_back("position outside lon/lat range");
  }
}

void check_ring(const json& ring, bool exterior, std::vector<std::string>& errs) {
  if (!ring.is_array() || ring.size() < 4) {
    errs.push_back("linear ring needs at least four positions");
    return;
  }
  std::vector<std::array<double, 2>> pts;
  for (const auto& p : ring) {
    check_position(p, errs);
    if (!errs.empty()) return;
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (ring.front() != ring.back()) errs.push_back("linear ring is not closed");
  const double area = shoelace(pts);
  if (exterior && !(area > 0.0)) errs.push_back("exterior ring is not counter-clockwise");
  if (!exterior && !(area < 0.0)) errs.push_back("hole is not clockwise");
}

void check_polygon(const json& rings, std::vector<std::string>& errs) {
  if (!rings.is_array() || rings.empty()) {
    errs.push_back("polygon needs at least one ring");
    return;
  }
  for (std::size_t i = 0; i < rings.size(); ++i) check_ring(rings[i], i == 0, errs);
}

void check_geometry(const json& g, std::vector<std::string>& errs) {
  if (g.is_null()) return;
  if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) {
    errs.push_back("geometry lacks a type");
    return;
  }
  const std::string type = g["type"];
  if (type == "GeometryCollection") {
    for (const auto& child : g.at("geometries")) check_geometry(child, errs);
    return;
  }
  if (!g.contains("coordinates") || !g["coordinates"].is_array()) {
    errs.push_back(type + " lacks coordinates");
    return;
  }
  const json& c = g["coordinates"];
  if (type == "Point") {
    check_position(c, errs);
  } else if (type == "MultiPoint") {
    for (const auto& p : c) check_position(p, errs);
  } else if (type == "LineString") {
    if (c.size() < 2) errs.push_back("LineString needs two positions");
    for (const auto& p : c) check_position(p, errs);
  } else if (type == "MultiLineString") {
    for (const auto& line : c) {
      if (!line.is_array() || line.size() < 2) errs.push_back("LineString needs two positions");
      else for (const auto& p : line) check_position(p, errs);
    }
  } else if (type == "Polygon") {
    check_polygon(c, errs);
  } else if (type == "MultiPolygon") {
    for (const auto& poly : c) check_polygon(poly, errs);
  } else {
    errs.push_back("unknown geometry type " + type);
  }
}

void check_feature(const json& f, std::vector<std::string>& errs) {
  if (!f.is_object() || f.value("type", "") != "Feature") {
    errs.push_back("feature type must be Feature");
    return;
  }
  if (!f.contains("geometry")) errs.push_back("feature lacks geometry");
  if (!f.contains("properties") || !(f["properties"].is_object() || f["properties"].is_null())) {
    errs.push_back("feature properties must be an object or null");
  }
  if (f.contains("id") && !(f["id"].is_string() || f["id"].is_number())) errs.push_back("feature id type");
  if (f.contains("geometry")) check_geometry(f["geometry"], errs);
}

}  // namespace

std::vector<std::string> rfc7946_errors(const json& doc) {
  std::vector<std::string> errs;
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    errs.push_back("document lacks a type");
    return errs;
  }
  const std::string type = doc["type"];
  if (type == "FeatureCollection") {
    if (!doc.contains("features") || !doc["features"].is_array()) {
      errs.push_back("FeatureCollection lacks a features array");
      return errs;
    }
    for (const auto& f : doc["features"]) check_feature(f, errs);
  } else if (type == "Feature") {
    check_feature(doc, errs);
  } else {
    check_geometry(doc, errs);
  }
  return errs;
}

}  // namespace wildfire::testing
