#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "wildfire/fire_store.hpp"
#include "wildfire/routing.hpp"
#include "wildfire/spread.hpp"
#include "wildfire/terrain.hpp"

namespace wildfire {

struct ServiceConfig {
  std::string terrain_fuel;
  std::string terrain_elev;
  std::string fuel_catalog;  // empty: built-in catalog
  std::string road_graph;    // empty: routing disabled
  std::string wind_backend = "constant";  // or "file:<stations.json>"
  std::string bind_addr = "127.0.0.1:8080";
  std::string journal_path;  // empty: in-memory only
  std::string cors_origin = "*";
  EngineConfig engine;
  RoutingOptions routing;
  std::map<Mode, double> alpha{{Mode::Walking, 0.5}, {Mode::Cycling, 0.5}, {Mode::Driving, 0.5}};

  static ServiceConfig from_json(const nlohmann::json& doc);
  /// Reads an optional JSON file, then applies TERRAIN_FUEL, TERRAIN_ELEV,
  /// FUEL_CATALOG, ROAD_GRAPH, WIND_BACKEND, BIND_ADDR and JOURNAL_PATH.
  static ServiceConfig load(const std::optional<std::filesystem::path>& path);
  void apply_env();
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Fire lifecycle and routing backend. Handlers take raw request bodies and
/// return a status plus JSON, so they can be driven with or without HTTP.
/// Mutations are serialized; reads run concurrently; simulations for
/// distinct fires run in parallel outside the lock.
class FireService {
 public:
  FireService(std::shared_ptr<const TerrainGrid> terrain, std::shared_ptr<const RoadNetwork> roads,
              ServiceConfig config);

  /// Loads terrain, catalog and roads named in the config.
  static std::unique_ptr<FireService> from_config(const ServiceConfig& config);

  Response create_fire(const std::string& body);
  Response ignite(const std::string& id);
  Response stop(const std::string& id);
  Response remove(const std::string& id);
  Response get_fire(const std::string& id) const;
  Response list_fires() const;
  Response route(const std::string& body) const;

  const ServiceConfig& config() const { return config_; }

 private:
  nlohmann::json fire_json(const FireEvent& fire) const;
  std::unique_ptr<WindProvider> wind_for(const ScenarioConfig& scenario) const;
  std::shared_ptr<const RoadGraph> graph_for(const std::string& id, GeoPoint anchor) const;

  std::shared_ptr<const TerrainGrid> terrain_;
  std::shared_ptr<const RoadNetwork> roads_;
  ServiceConfig config_;

  mutable std::shared_mutex mutex_;
  FireStore store_;

  mutable std::mutex graph_mutex_;
  mutable std::map<std::string, std::shared_ptr<const RoadGraph>> graphs_;
};

/// Thin cpp-httplib binding for FireService.
class HttpServer {
 public:
  explicit HttpServer(FireService& service);
  ~HttpServer();

  /// Binds to `host`; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wildfire
