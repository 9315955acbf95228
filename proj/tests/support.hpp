#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wildfire/routing.hpp"
#include "wildfire/scenario.hpp"
#include "wildfire/spread.hpp"
#include "wildfire/terrain.hpp"

namespace wildfire::testing {

inline const GeoPoint kAthalassa{33.395, 35.125};

std::filesystem::path fixture(const std::string& relative);

/// Square grid of `n`x`n` cells centered on `center`. `elevation` receives
/// grid-frame cell centers; flat at zero when empty.
TerrainGrid uniform_terrain(GeoPoint center, int n, double cell, FuelClass fuel,
                            const std::function<double(Point)>& elevation = {},
                            FuelCatalog catalog = FuelCatalog::defaults());

/// Single-class catalog with the given base rate.
FuelCatalog single_fuel_catalog(double r0, double wind_coeff = 0.4, double slope_coeff = 2.0);

ScenarioConfig make_scenario(GeoPoint ignition, double wind_speed, double direction_to_deg,
                             double humidity);

/// Largest projection of any vertex onto the compass direction.
double extent_along(const Polygon& polygon, double compass_radians);

/// Even-odd point-in-polygon with an inclusive on-edge test.
bool inside_oracle(const Polygon& polygon, Point p);

/// Ring rule recomputed from scratch: first containing ring k gets the
/// previous horizon in seconds, 0 inside ring 0, +inf outside all.
double arrival_oracle(const IsochroneSet& rings, Point p);

/// Samples every `step` meters plus every vertex and counts samples where the
/// user is not `margin` seconds ahead of the fire.
int count_violations(const ScoredRoute& route, const IsochroneSet& rings, double margin,
                     double step = 5.0);

/// Concentric circular rings around the origin with radius r0 + growth * minutes.
IsochroneSet circular_rings(double r0, double growth, int vertices = 48);

/// Every simple path from `from` ending at a node of `targets`, usable by `mode`.
std::vector<std::vector<int>> all_simple_paths(const RoadGraph& graph, int from,
                                               const std::set<int>& targets, Mode mode);

struct ToyProblem {
  RoadGraph graph;
  Point start;
  IsochroneSet rings;
  double fire_direction = 0.0;
};

/// Random graph of at most `max_nodes` nodes with a burning origin, a start
/// 300 to 900 m from it and at least one reachable safe node.
ToyProblem random_toy(std::mt19937_64& rng, int max_nodes = 12);

/// Surviving (conflict-free) routes over every simple path, scored with
/// `alpha`. Empty when nothing survives.
std::vector<ScoredRoute> exhaustive_survivors(const ToyProblem& toy, const TransportMode& mode,
                                              const RoutingOptions& options);

/// Lexicographic oracles over exhaustive survivors. Ties go to the smaller
/// time, then the smaller node path.
const ScoredRoute& oracle_min_time(const std::vector<ScoredRoute>& routes);
const ScoredRoute& oracle_max_angle(const std::vector<ScoredRoute>& routes, double fire_direction);

/// RFC 7946 structural check written independently of the library validator.
std::vector<std::string> rfc7946_errors(const nlohmann::json& doc);

}  // namespace wildfire::testing
