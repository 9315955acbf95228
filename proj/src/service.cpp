#include "wildfire/service.hpp"

#include <cstdlib>
#include <fstream>
#include <random>

#include <spdlog/spdlog.h>

#include "wildfire/errors.hpp"
#include "wildfire/geojson.hpp"

namespace wildfire {

namespace {

using nlohmann::json;

std::string new_uuid() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<std::uint64_t> dist;
  std::uint64_t hi = dist(rng);
  std::uint64_t lo = dist(rng);
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xFFFF), static_cast<unsigned>(hi & 0xFFFF),
                static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

Response error(int status, const std::string& message) { return {status, {{"error", message}}}; }

std::optional<json> parse_body(const std::string& body, Response& failure) {
  try {
    json doc = json::parse(body);
    if (!doc.is_object()) {
      failure = error(400, "request body must be a JSON object");
      return std::nullopt;
    }
    return doc;
  } catch (const json::parse_error& e) {
    failure = error(400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

const char* routing_kind(RoutingError::Kind k) {
  switch (k) {
    case RoutingError::Kind::Snap: return "snap";
    case RoutingError::Kind::NoEscape: return "no_escape";
    case RoutingError::Kind::NoSafeRoute: return "no_safe_route";
  }
  return "unknown";
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

ServiceConfig ServiceConfig::from_json(const json& doc) {
  ServiceConfig c;
  try {
    c.terrain_fuel = doc.value("terrain_fuel", c.terrain_fuel);
    c.terrain_elev = doc.value("terrain_elev", c.terrain_elev);
    c.fuel_catalog = doc.value("fuel_catalog", c.fuel_catalog);
    c.road_graph = doc.value("road_graph", c.road_graph);
    c.wind_backend = doc.value("wind_backend", c.wind_backend);
    c.bind_addr = doc.value("bind_addr", c.bind_addr);
    c.journal_path = doc.value("journal_path", c.journal_path);
    c.cors_origin = doc.value("cors_origin", c.cors_origin);
    if (doc.contains("engine")) c.engine = EngineConfig::from_json(doc["engine"]);
    if (doc.contains("routing")) {
      const auto& r = doc["routing"];
      c.routing.k = r.value("k", c.routing.k);
      c.routing.margin_s = r.value("margin_s", c.routing.margin_s);
      c.routing.sample_step = r.value("sample_step", c.routing.sample_step);
      c.routing.safe_distance = r.value("safe_distance", c.routing.safe_distance);
      c.routing.snap_radius = r.value("snap_radius", c.routing.snap_radius);
    }
    if (doc.contains("alpha")) {
      for (const auto& [name, value] : doc["alpha"].items()) {
        const double a = value.get<double>();
        TransportMode::of(parse_mode(name), a);
        c.alpha[parse_mode(name)] = a;
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("service config: ") + e.what());
  }
  return c;
}

void ServiceConfig::apply_env() {
  const std::pair<const char*, std::string*> vars[] = {
      {"TERRAIN_FUEL", &terrain_fuel}, {"TERRAIN_ELEV", &terrain_elev}, {"FUEL_CATALOG", &fuel_catalog},
      {"ROAD_GRAPH", &road_graph},     {"WIND_BACKEND", &wind_backend}, {"BIND_ADDR", &bind_addr},
      {"JOURNAL_PATH", &journal_path}};
  for (const auto& [name, field] : vars) {
    if (const char* v = std::getenv(name)) *field = v;
  }
}

ServiceConfig ServiceConfig::load(const std::optional<std::filesystem::path>& path) {
  ServiceConfig c;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw std::runtime_error("cannot open service config " + path->string());
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ParseError(path->string() + ": " + e.what());
    }
    c = from_json(doc);
  }
  c.apply_env();
  return c;
}

// ---------------------------------------------------------------------------
// FireService

FireService::FireService(std::shared_ptr<const TerrainGrid> terrain, std::shared_ptr<const RoadNetwork> roads,
                         ServiceConfig config)
    : terrain_(std::move(terrain)), roads_(std::move(roads)), config_(std::move(config)) {
  if (!terrain_) throw ConfigError("service needs terrain");
  config_.engine.validate();
  if (!config_.journal_path.empty()) store_ = FireStore(config_.journal_path);
}

std::unique_ptr<FireService> FireService::from_config(const ServiceConfig& config) {
  if (config.terrain_fuel.empty() || config.terrain_elev.empty()) {
    throw ConfigError("TERRAIN_FUEL and TERRAIN_ELEV must be set");
  }
  FuelCatalog catalog = config.fuel_catalog.empty() ? FuelCatalog::defaults() : FuelCatalog::load(config.fuel_catalog);
  auto terrain = std::make_shared<const TerrainGrid>(
      TerrainGrid::load(config.terrain_fuel, config.terrain_elev, std::move(catalog)));
  std::shared_ptr<const RoadNetwork> roads;
  if (!config.road_graph.empty()) roads = std::make_shared<const RoadNetwork>(RoadNetwork::load(config.road_graph));
  return std::make_unique<FireService>(std::move(terrain), std::move(roads), config);
}

std::unique_ptr<WindProvider> FireService::wind_for(const ScenarioConfig& scenario) const {
  if (scenario.wind_file) return std::make_unique<FileWind>(FileWind::load(*scenario.wind_file));
  const std::string& backend = config_.wind_backend;
  if (backend.rfind("file:", 0) == 0) return std::make_unique<FileWind>(FileWind::load(backend.substr(5)));
  if (backend != "constant") throw ConfigError("unknown wind backend '" + backend + "'");
  return std::make_unique<ConstantWind>(scenario.wind);
}

json FireService::fire_json(const FireEvent& fire) const {
  json rings = nullptr;
  if (fire.rings) {
    rings = json::array();
    const LocalFrame frame(fire.rings->anchor);
    for (const auto& r : fire.rings->rings) {
      rings.push_back({{"minutes", r.minutes},
                       {"area_ha", signed_area(r.polygon) / 10'000.0},
                       {"coordinates", geojson::linear_ring(r.polygon, frame)}});
    }
  }
  return {{"id", fire.id},
          {"status", status_name(fire.status)},
          {"ignition", {{"lon", fire.scenario.ignition.lon}, {"lat", fire.scenario.ignition.lat}}},
          {"ignition_time", format_utc(fire.scenario.ignition_time)},
          {"scenario", fire.scenario.to_json()},
          {"note", fire.note},
          {"rings", rings}};
}

Response FireService::create_fire(const std::string& body) {
  Response failure;
  const auto doc = parse_body(body, failure);
  if (!doc) return failure;

  FireEvent fire;
  try {
    fire.scenario = ScenarioConfig::from_json(*doc);
    if (doc->contains("note")) {
      if (!(*doc)["note"].is_string()) return error(400, "'note' must be a string");
      fire.note = (*doc)["note"].get<std::string>();
    }
  } catch (const ParseError& e) {
    return error(400, e.what());
  } catch (const ConfigError& e) {
    return error(400, e.what());
  }

  const LocalFrame frame(fire.scenario.ignition);
  const Point in_grid = Point{0.0, 0.0} - frame.to_local(terrain_->spec().origin);
  if (!terrain_->in_extent(in_grid)) return error(422, "ignition outside terrain");
  if (terrain_->sample(in_grid).fuel == kNonBurnable) return error(422, "non-burnable ignition");

  fire.id = new_uuid();
  std::unique_lock lock(mutex_);
  store_.create(fire);
  spdlog::info("fire {} added (pending)", fire.id);
  return {201, fire_json(*store_.find(fire.id))};
}

Response FireService::ignite(const std::string& id) {
  ScenarioConfig scenario;
  {
    std::shared_lock lock(mutex_);
    const FireEvent* fire = store_.find(id);
    if (!fire) return error(404, "unknown fire " + id);
    if (fire->status != FireStatus::Pending) return error(409, "fire " + id + " is " + status_name(fire->status));
    scenario = fire->scenario;
  }

  IsochroneSet rings;
  try {
    const auto wind = wind_for(scenario);
    rings = simulate(scenario, *terrain_, *wind, config_.engine);
  } catch (const IgnitionError& e) {
    return error(422, e.what());
  } catch (const OutOfBounds& e) {
    return error(422, e.what());
  }

  std::unique_lock lock(mutex_);
  const FireEvent* fire = store_.find(id);
  if (!fire) return error(404, "unknown fire " + id);
  if (fire->status != FireStatus::Pending) return error(409, "fire " + id + " is " + status_name(fire->status));
  store_.activate(id, std::move(rings));
  spdlog::info("fire {} ignited", id);
  return {200, fire_json(*store_.find(id))};
}

Response FireService::stop(const std::string& id) {
  std::unique_lock lock(mutex_);
  const FireEvent* fire = store_.find(id);
  if (!fire) return error(404, "unknown fire " + id);
  if (fire->status != FireStatus::Active) return error(409, "fire " + id + " is " + status_name(fire->status));
  store_.stop(id);
  return {200, fire_json(*store_.find(id))};
}

Response FireService::remove(const std::string& id) {
  {
    std::unique_lock lock(mutex_);
    if (!store_.find(id)) return error(404, "unknown fire " + id);
    store_.remove(id);
  }
  std::lock_guard glock(graph_mutex_);
  graphs_.erase(id);
  return {200, {{"id", id}, {"deleted", true}}};
}

Response FireService::get_fire(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const FireEvent* fire = store_.find(id);
  if (!fire) return error(404, "unknown fire " + id);
  return {200, fire_json(*fire)};
}

Response FireService::list_fires() const {
  std::shared_lock lock(mutex_);
  json features = json::array();
  for (const FireEvent* fire : store_.list()) {
    if (fire->status != FireStatus::Active || !fire->rings) continue;
    json minutes = json::array();
    for (const auto& r : fire->rings->rings) minutes.push_back(r.minutes);
    features.push_back({{"type", "Feature"},
                        {"id", fire->id},
                        {"geometry", geojson::rings_geometry(*fire->rings)},
                        {"properties",
                         {{"id", fire->id},
                          {"ignition_time", format_utc(fire->scenario.ignition_time)},
                          {"ring_minutes", minutes},
                          {"note", fire->note}}}});
  }
  return {200, {{"type", "FeatureCollection"}, {"features", features}}};
}

std::shared_ptr<const RoadGraph> FireService::graph_for(const std::string& id, GeoPoint anchor) const {
  std::lock_guard lock(graph_mutex_);
  auto& slot = graphs_[id];
  if (!slot) slot = std::make_shared<const RoadGraph>(RoadGraph::build(*roads_, LocalFrame(anchor)));
  return slot;
}

Response FireService::route(const std::string& body) const {
  Response failure;
  const auto doc = parse_body(body, failure);
  if (!doc) return failure;

  GeoPoint start;
  Mode mode = Mode::Walking;
  std::string fire_id;
  RoutingOptions options = config_.routing;
  try {
    start = {doc->at("lon").get<double>(), doc->at("lat").get<double>()};
    mode = parse_mode(doc->value("mode", std::string("walking")));
    fire_id = doc->at("fire_id").get<std::string>();
    options.departure_s = doc->value("departure_s", 0.0);
  } catch (const json::exception& e) {
    return error(400, std::string("route request: ") + e.what());
  } catch (const ConfigError& e) {
    return error(400, e.what());
  }
  if (!roads_) return error(503, "no road graph loaded");

  ScenarioConfig scenario;
  IsochroneSet rings;
  {
    std::shared_lock lock(mutex_);
    const FireEvent* fire = store_.find(fire_id);
    if (!fire) return error(404, "unknown fire " + fire_id);
    if (fire->status != FireStatus::Active) return error(409, "fire " + fire_id + " is " + status_name(fire->status));
    scenario = fire->scenario;
    rings = *fire->rings;
  }

  const LocalFrame frame(rings.anchor);
  const auto graph = graph_for(fire_id, rings.anchor);
  const FireTimeline timeline(std::move(rings));
  const double fire_direction = wind_for(scenario)->at(scenario.ignition, 0.0).direction_to;
  const TransportMode transport = TransportMode::of(mode, config_.alpha.at(mode));
  try {
    const RouteSelection sel = best_route(*graph, frame.to_local(start), transport, timeline, fire_direction, options);
    return {200, geojson::route_feature(sel.best, frame, sel.rejected)};
  } catch (const RoutingError& e) {
    return {422,
            {{"error", e.what()},
             {"kind", routing_kind(e.kind())},
             {"reasons", geojson::rejection_reasons(e.rejected(), frame)}}};
  }
}

}  // namespace wildfire
