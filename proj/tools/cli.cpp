#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wildfire/errors.hpp"
#include "wildfire/geojson.hpp"
#include "wildfire/routing.hpp"
#include "wildfire/scenario.hpp"
#include "wildfire/spread.hpp"
#include "wildfire/terrain.hpp"

namespace wildfire::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Inputs {
  std::string scenario;
  std::string terrain;
  std::string elevation;
  std::string catalog;
  std::string graph;
  std::string engine;
  std::vector<std::string> starts;
  std::string mode = "walking";
  double alpha = 0.5;
  int k = 8;
  double margin = 300.0;
};

struct Loaded {
  ScenarioConfig scenario;
  EngineConfig engine;
  std::optional<TerrainGrid> terrain;
  std::unique_ptr<WindProvider> wind;
  std::optional<RoadNetwork> roads;
  std::vector<GeoPoint> starts;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

class LoadFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GeoPoint parse_lonlat(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw LoadFailure("--start expects lon,lat, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw LoadFailure("--start expects lon,lat, got '" + text + "'");
  }
}

template <typename F>
auto load_step(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw LoadFailure(what + ": " + e.what());
  }
}

Loaded load_inputs(const Inputs& in, bool need_terrain) {
  Loaded l;
  l.scenario = load_step("scenario", [&] { return ScenarioConfig::load(in.scenario); });
  if (!in.engine.empty()) l.engine = load_step("engine config", [&] { return EngineConfig::load(in.engine); });
  if (need_terrain) {
    FuelCatalog catalog = in.catalog.empty()
                              ? FuelCatalog::defaults()
                              : load_step("fuel catalog", [&] { return FuelCatalog::load(in.catalog); });
    const AsciiGrid fuel = load_step("terrain", [&] { return load_ascii_grid(in.terrain); });
    AsciiGrid elev;
    if (in.elevation.empty()) {
      elev = fuel;
      std::fill(elev.values.begin(), elev.values.end(), 0.0);
      elev.nodata.reset();
    } else {
      elev = load_step("elevation", [&] { return load_ascii_grid(in.elevation); });
    }
    l.terrain.emplace(load_step("terrain", [&] { return TerrainGrid::from_rasters(fuel, elev, std::move(catalog)); }));
  }
  if (l.scenario.wind_file) {
    l.wind = std::make_unique<FileWind>(load_step("wind file", [&] { return FileWind::load(*l.scenario.wind_file); }));
  } else {
    l.wind = std::make_unique<ConstantWind>(l.scenario.wind);
  }
  if (!in.graph.empty()) l.roads = load_step("road graph", [&] { return RoadNetwork::load(in.graph); });
  for (const auto& s : in.starts) l.starts.push_back(parse_lonlat(s));
  if (!l.starts.empty() && !l.roads) throw LoadFailure("--start needs --graph");
  return l;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw LoadFailure("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json rings_document(const IsochroneSet& rings, const ScenarioConfig& scenario) {
  json minutes = json::array();
  json hectares = json::array();
  for (const auto& r : rings.rings) {
    minutes.push_back(r.minutes);
    hectares.push_back(signed_area(r.polygon) / 10'000.0);
  }
  json feature = {{"type", "Feature"},
                  {"geometry", geojson::rings_geometry(rings)},
                  {"properties",
                   {{"ignition", {rings.anchor.lon, rings.anchor.lat}},
                    {"ignition_time", format_utc(scenario.ignition_time)},
                    {"ring_minutes", minutes},
                    {"ring_hectares", hectares}}}};
  return {{"type", "FeatureCollection"}, {"features", json::array({feature})}};
}

IsochroneSet rings_from_document(const json& doc) {
  try {
    const auto& f = doc.at("features").at(0);
    const auto& props = f.at("properties");
    const GeoPoint anchor{props.at("ignition").at(0).get<double>(), props.at("ignition").at(1).get<double>()};
    return geojson::rings_from_geometry(f.at("geometry"), props.at("ring_minutes").get<std::vector<int>>(), anchor);
  } catch (const json::exception& e) {
    throw LoadFailure(std::string("rings file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Invariant checks

CheckResult check_schedule(const IsochroneSet& rings, const ScenarioConfig& s) {
  CheckResult c{"ring_schedule"};
  std::vector<int> expected;
  for (int m = 0; m <= s.horizon; m += s.ring_interval) expected.push_back(m);
  std::vector<int> got;
  for (const auto& r : rings.rings) got.push_back(r.minutes);
  if (got != expected) {
    c.passed = false;
    c.detail = "rings do not follow the ring interval up to the horizon";
  }
  return c;
}

CheckResult check_nesting(const IsochroneSet& rings) {
  CheckResult c{"ring_nesting"};
  for (std::size_t k = 0; k + 1 < rings.rings.size(); ++k) {
    const auto& inner = rings.rings[k];
    const auto& outer = rings.rings[k + 1];
    for (const Point& p : inner.polygon) {
      if (!contains(outer.polygon, p)) {
        c.passed = false;
        c.detail = "ring " + std::to_string(inner.minutes) + " leaves ring " + std::to_string(outer.minutes);
        return c;
      }
    }
  }
  return c;
}

CheckResult check_simple(const IsochroneSet& rings) {
  CheckResult c{"ring_simplicity"};
  for (const auto& r : rings.rings) {
    if (!is_simple(r.polygon)) {
      c.passed = false;
      c.detail = "ring " + std::to_string(r.minutes) + " self-intersects";
      return c;
    }
  }
  return c;
}

bool homogeneous(const TerrainGrid& t) {
  const auto& spec = t.spec();
  const FuelClass f0 = t.fuel_at({0, 0});
  const double e0 = t.elevation_at({0, 0});
  for (int r = 0; r < spec.nrows; ++r) {
    for (int c = 0; c < spec.ncols; ++c) {
      if (t.fuel_at({r, c}) != f0 || t.elevation_at({r, c}) != e0) return false;
    }
  }
  return true;
}

CheckResult check_isotropy(const IsochroneSet& rings) {
  CheckResult c{"isotropy"};
  const auto& last = rings.rings.back().polygon;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const Point& p : last) {
    lo = std::min(lo, norm(p));
    hi = std::max(hi, norm(p));
  }
  if (!(lo > 0.0) || hi / lo > 1.15) {
    c.passed = false;
    std::ostringstream ss;
    ss << "max/min radius ratio " << hi / lo << " exceeds 1.15";
    c.detail = ss.str();
  }
  return c;
}

// Re-walks a route every 5 m against the fire timeline.
CheckResult check_conflict_soundness(const ScoredRoute& route, const FireTimeline& timeline, double margin) {
  CheckResult c{"conflict_soundness"};
  constexpr double kStep = 5.0;
  for (std::size_t i = 0; i + 1 < route.points.size(); ++i) {
    const Point a = route.points[i], b = route.points[i + 1];
    const double len = distance(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / kStep)));
    for (int s = 0; s <= n; ++s) {
      const double f = static_cast<double>(s) / n;
      const double user = route.entry_times[i] + f * route.leg_times[i];
      if (user + margin >= timeline.arrival(a + f * (b - a))) {
        c.passed = false;
        c.detail = "route meets the fire on leg " + std::to_string(i);
        return c;
      }
    }
  }
  return c;
}

// Exhaustive simple-path enumeration on a six-node toy graph: the alpha -> 0
// selection must equal the fastest surviving path.
CheckResult check_alpha_limit() {
  CheckResult c{"alpha_limit_min_time"};
  RoadGraph g;
  const Point pts[] = {{-300, 0}, {-300, 700}, {-1200, 300}, {-900, -600}, {-1700, -200}, {-2000, 700}};
  for (const Point& p : pts) g.add_node(p);
  g.add_edge(0, 1, kAllModes);
  g.add_edge(0, 2, kAllModes);
  g.add_edge(0, 3, kAllModes);
  g.add_edge(2, 4, kAllModes);
  g.add_edge(3, 4, kAllModes);
  g.add_edge(1, 5, kAllModes);
  g.add_edge(2, 5, kAllModes);
  IsochroneSet rings;
  for (int m = 0; m <= 60; m += 15) {
    Polygon circle;
    const double r = 5.0 + 2.0 * m;
    for (int k = 0; k < 32; ++k) {
      const double th = 2 * std::numbers::pi * k / 32;
      circle.push_back({r * std::cos(th), r * std::sin(th)});
    }
    rings.rings.push_back({m, circle});
  }
  const FireTimeline timeline(rings);
  const TransportMode mode = TransportMode::of(Mode::Walking, 0.01);
  RoutingOptions opt;
  opt.k = 1000;
  const double east = std::numbers::pi / 2;
  const ScoredRoute chosen = best_route(g, pts[0], mode, timeline, east, opt).best;

  const auto safe = safe_nodes(g, timeline);
  std::optional<ScoredRoute> fastest;
  std::vector<int> path{0};
  std::vector<char> used(g.node_count(), 0);
  used[0] = 1;
  std::function<void(int)> dfs = [&](int u) {
    if (safe.contains(u)) {
      ScoredRoute r = make_route(g, path, mode);
      if (!check_fire_conflict(r, timeline, opt.margin_s, opt.sample_step) &&
          (!fastest || r.time_to_safety < fastest->time_to_safety)) {
        fastest = r;
      }
    }
    for (int e : g.incident(u)) {
      const auto& edge = g.edges()[static_cast<std::size_t>(e)];
      const int v = edge.a == u ? edge.b : edge.a;
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      path.push_back(v);
      dfs(v);
      path.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    }
  };
  dfs(0);
  if (!fastest || fastest->nodes != chosen.nodes) {
    c.passed = false;
    c.detail = "alpha=0.01 selection differs from the exhaustive min-time path";
  }
  return c;
}

json checks_json(const std::vector<CheckResult>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return out;
}

void add_common(CLI::App* cmd, Inputs& in) {
  cmd->add_option("scenario", in.scenario, "scenario JSON")->required();
  cmd->add_option("--terrain", in.terrain, "fuel class ESRI ASCII grid");
  cmd->add_option("--elevation", in.elevation, "elevation ESRI ASCII grid (flat when omitted)");
  cmd->add_option("--catalog", in.catalog, "fuel catalog CSV (built-in when omitted)");
  cmd->add_option("--graph", in.graph, "road network GeoJSON");
  cmd->add_option("--engine", in.engine, "engine config JSON");
  cmd->add_option("--start", in.starts, "start position lon,lat (repeatable)");
  cmd->add_option("--mode", in.mode, "walking, cycling or driving");
  cmd->add_option("--alpha", in.alpha, "angle weight in (0,1)");
  cmd->add_option("--k", in.k, "candidate routes per start");
  cmd->add_option("--margin", in.margin, "safety margin in seconds");
}

std::string fmt_fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// Subcommands

int run(const Inputs& in, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  if (in.terrain.empty()) {
    err << "run: --terrain is required\n";
    return 1;
  }
  Loaded l;
  Mode mode{};
  try {
    l = load_inputs(in, true);
    mode = parse_mode(in.mode);
    TransportMode::of(mode, in.alpha);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  IsochroneSet rings;
  try {
    rings = simulate(l.scenario, *l.terrain, *l.wind, l.engine);
  } catch (const std::exception& e) {
    err << "error: simulation: " << e.what() << '\n';
    return 1;
  }
  const LocalFrame frame(rings.anchor);

  json ring_rows = json::array();
  out << "ring  hectares\n";
  for (const auto& r : rings.rings) {
    const double ha = signed_area(r.polygon) / 10'000.0;
    ring_rows.push_back({{"minutes", r.minutes}, {"hectares", ha}});
    out << std::setw(4) << r.minutes << "  " << fmt_fixed(ha, 3) << '\n';
  }

  std::vector<CheckResult> checks{check_schedule(rings, l.scenario), check_nesting(rings), check_simple(rings)};

  json routes = json::array();
  json route_features = json::array();
  bool any_unroutable = false;
  if (l.roads) {
    const RoadGraph graph = RoadGraph::build(*l.roads, frame);
    const FireTimeline timeline(rings);
    const TransportMode transport = TransportMode::of(mode, in.alpha);
    RoutingOptions opt;
    opt.k = in.k;
    opt.margin_s = in.margin;
    const double fire_direction = l.wind->at(l.scenario.ignition, 0.0).direction_to;
    for (const GeoPoint& start : l.starts) {
      json row = {{"start", {start.lon, start.lat}}, {"mode", mode_name(mode)}, {"status", "ok"},
                  {"error", nullptr}, {"distance_m", nullptr}, {"time_to_safety_s", nullptr},
                  {"score", nullptr}, {"angle_deg", nullptr}};
      try {
        const RouteSelection sel = best_route(graph, frame.to_local(start), transport, timeline, fire_direction, opt);
        row["distance_m"] = sel.best.length;
        row["time_to_safety_s"] = sel.best.time_to_safety;
        row["score"] = sel.best.score;
        row["angle_deg"] = sel.best.angle * 180.0 / std::numbers::pi;
        route_features.push_back(geojson::route_feature(sel.best, frame, sel.rejected));
        checks.push_back(check_conflict_soundness(sel.best, timeline, opt.margin_s));
        out << "route from " << start.lon << "," << start.lat << ": " << fmt_fixed(sel.best.length, 1) << " m, "
            << fmt_fixed(sel.best.time_to_safety, 1) << " s (" << mode_name(mode) << "), score "
            << fmt_fixed(sel.best.score, 4) << '\n';
      } catch (const RoutingError& e) {
        any_unroutable = true;
        row["status"] = e.kind() == RoutingError::Kind::Snap ? "snap_error" : "no_safe_route";
        row["error"] = e.what();
        out << "route from " << start.lon << "," << start.lat << ": " << e.what() << '\n';
      }
      routes.push_back(row);
    }
  }

  json report = {{"scenario", l.scenario.to_json()},
                 {"engine", l.engine.to_json()},
                 {"rings", ring_rows},
                 {"routes", routes},
                 {"checks", checks_json(checks)}};
  try {
    fs::create_directories(out_dir);
    write_json(fs::path(out_dir) / "rings.geojson", rings_document(rings, l.scenario));
    write_json(fs::path(out_dir) / "route.geojson", {{"type", "FeatureCollection"}, {"features", route_features}});
    write_json(fs::path(out_dir) / "report.json", report);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (any_unroutable) return 2;
  return 0;
}

int check(const Inputs& in, const std::string& rings_path, std::ostream& out, std::ostream& err) {
  Loaded l;
  IsochroneSet rings;
  bool simulated = false;
  try {
    l = load_inputs(in, rings_path.empty());
    if (!rings_path.empty()) {
      std::ifstream f(rings_path);
      if (!f) throw LoadFailure("cannot open rings file " + rings_path);
      json doc;
      try {
        f >> doc;
      } catch (const json::exception& e) {
        throw LoadFailure(rings_path + ": " + e.what());
      }
      rings = rings_from_document(doc);
    } else {
      if (in.terrain.empty()) throw LoadFailure("check needs --terrain or --rings");
      rings = simulate(l.scenario, *l.terrain, *l.wind, l.engine);
      simulated = true;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::vector<CheckResult> checks{check_schedule(rings, l.scenario), check_nesting(rings), check_simple(rings)};
  const auto doc_errors = geojson::validate(rings_document(rings, l.scenario));
  checks.push_back({"geojson_validity", doc_errors.empty(), doc_errors.empty() ? "" : doc_errors.front()});
  if (simulated && l.scenario.wind.speed == 0.0 && !l.scenario.wind_file && homogeneous(*l.terrain)) {
    checks.push_back(check_isotropy(rings));
  }
  if (l.roads && !l.starts.empty()) {
    const LocalFrame frame(rings.anchor);
    const RoadGraph graph = RoadGraph::build(*l.roads, frame);
    const FireTimeline timeline(rings);
    RoutingOptions opt;
    opt.k = in.k;
    opt.margin_s = in.margin;
    const TransportMode transport = TransportMode::of(parse_mode(in.mode), in.alpha);
    const double dir = l.wind->at(l.scenario.ignition, 0.0).direction_to;
    for (const GeoPoint& s : l.starts) {
      try {
        const auto sel = best_route(graph, frame.to_local(s), transport, timeline, dir, opt);
        checks.push_back(check_conflict_soundness(sel.best, timeline, opt.margin_s));
      } catch (const RoutingError&) {
        // Nothing returned, nothing to verify.
      }
    }
  }
  checks.push_back(check_alpha_limit());

  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) out << ": " << c.detail;
    out << '\n';
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wildfire scenario runner"};
  app.require_subcommand(1);
  Inputs run_in, check_in;
  std::string out_dir = "out";
  std::string rings_path;

  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and plan escape routes");
  add_common(run_cmd, run_in);
  run_cmd->add_option("--out", out_dir, "output directory");

  auto* check_cmd = app.add_subcommand("check", "run the invariant suite");
  add_common(check_cmd, check_in);
  check_cmd->add_option("--rings", rings_path, "check an existing rings.geojson instead of simulating");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }
  if (*run_cmd) return run(run_in, out_dir, out, err);
  return check(check_in, rings_path, out, err);
}

}  // namespace wildfire::cli
