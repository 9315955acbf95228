#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wildfire/geometry.hpp"
#include "wildfire/projection.hpp"
#include "wildfire/spread.hpp"

namespace wildfire {

enum class Mode : std::uint8_t { Walking = 1, Cycling = 2, Driving = 4 };
using ModeSet = std::uint8_t;
inline constexpr ModeSet kAllModes = 7;

inline bool allows(ModeSet set, Mode m) { return (set & static_cast<ModeSet>(m)) != 0; }

/// Throws ConfigError for anything but walking, cycling, driving.
Mode parse_mode(const std::string& name);
std::string mode_name(Mode m);

/// Conservative travel speeds: walking 4.5, cycling 15, driving 50 km/h.
struct TransportMode {
  Mode mode = Mode::Walking;
  double speed_kmh = 4.5;
  double alpha = 0.5;

  static TransportMode of(Mode m, double alpha = 0.5);
  double speed_mps() const { return speed_kmh * 1000.0 / 3600.0; }
};

struct RoadNode {
  Point position;
  GeoPoint geo;
};

struct RoadEdge {
  int a = 0;
  int b = 0;
  double length = 0.0;
  ModeSet modes = kAllModes;
};

/// Polylines in lon/lat as read from a GeoJSON road layer.
struct RoadNetwork {
  struct Way {
    std::vector<GeoPoint> points;
    ModeSet modes = kAllModes;
  };
  std::vector<Way> ways;

  static RoadNetwork from_geojson(const nlohmann::json& doc);
  static RoadNetwork load(const std::filesystem::path& path);
};

/// Undirected road graph in a local frame. Node ids are dense indices.
class RoadGraph {
 public:
  static constexpr double kSnapTolerance = 1.0;

  /// Vertices closer than one meter merge into one node; each polyline
  /// segment becomes an edge. Throws StructuralError when nothing remains.
  static RoadGraph build(const RoadNetwork& network, const LocalFrame& frame);
  static RoadGraph load(const std::filesystem::path& path, const LocalFrame& frame);

  int add_node(Point p, GeoPoint geo = {});
  /// Edges shorter than the straight line are stretched to it; zero-length edges are ignored.
  void add_edge(int a, int b, ModeSet modes, std::optional<double> length = std::nullopt);

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  const RoadNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  /// Edge indices touching `id`.
  const std::vector<int>& incident(int id) const { return adjacency_.at(static_cast<std::size_t>(id)); }

  /// Shortest edge between a and b usable by `mode`.
  std::optional<double> hop_length(int a, int b, Mode mode) const;
  /// Nearest node within `radius`; ties go to the lower id.
  std::optional<int> nearest_node(Point p, double radius) const;

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Fire arrival lookup over nested isochrone rings (same local frame as the graph).
class FireTimeline {
 public:
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  explicit FireTimeline(IsochroneSet rings);

  const IsochroneSet& rings() const { return rings_; }
  /// Ring with the latest horizon.
  const Isochrone& outer() const { return rings_.rings.back(); }

  /// Seconds after ignition. A point first contained by ring m gets the
  /// previous ring's horizon, or 0 inside the ignition disk.
  double arrival(Point p) const;
  /// The value `arrival` assigns to points first contained by ring index k.
  double ring_arrival(std::size_t k) const;

 private:
  IsochroneSet rings_;
};

struct RoutingOptions {
  int k = 8;
  double margin_s = 300.0;
  double sample_step = 25.0;
  double safe_distance = 1000.0;
  double snap_radius = 200.0;
  double off_route = 500.0;
  double departure_s = 0.0;  // user start time, seconds after ignition
};

struct Conflict {
  Point where;
  double user_time = 0.0;
  double fire_arrival = 0.0;
  int slot_minutes = 0;  // fire slot the user would share
};

struct ScoredRoute {
  std::vector<int> nodes;
  std::vector<Point> points;
  std::vector<double> entry_times;  // seconds after ignition
  std::vector<double> leg_times;    // edge_length / speed per hop
  double length = 0.0;
  double time_to_safety = 0.0;
  double angle = 0.0;  // radians in [0, π]
  double angle_norm = 0.0;
  double time_norm = 0.0;
  double score = 0.0;
  Mode mode = Mode::Walking;
  bool rejected = false;
  std::optional<Conflict> conflict;

  double bearing() const;
};

class RoutingError : public std::runtime_error {
 public:
  enum class Kind { Snap, NoEscape, NoSafeRoute };
  RoutingError(Kind kind, const std::string& what, std::vector<ScoredRoute> rejected = {})
      : std::runtime_error(what), kind_(kind), rejected_(std::move(rejected)) {}
  Kind kind() const { return kind_; }
  const std::vector<ScoredRoute>& rejected() const { return rejected_; }

 private:
  Kind kind_;
  std::vector<ScoredRoute> rejected_;
};

/// Nodes at least `safe_distance` from the outer ring (inside counts as zero).
std::set<int> safe_nodes(const RoadGraph& graph, const FireTimeline& timeline,
                         double safe_distance = 1000.0);

/// Fills points, entry and leg times, length and time_to_safety for a node path.
ScoredRoute make_route(const RoadGraph& graph, std::vector<int> nodes, const TransportMode& mode,
                       double departure_s = 0.0);

/// Up to k loopless fastest paths from the snapped start to any safe node.
std::vector<ScoredRoute> candidate_routes(const RoadGraph& graph, Point start,
                                          const TransportMode& mode, const FireTimeline& timeline,
                                          const RoutingOptions& options = {});

/// First point where the user would be at or behind the fire (with margin).
std::optional<Conflict> check_fire_conflict(const ScoredRoute& route, const FireTimeline& timeline,
                                            double margin_s = 300.0, double sample_step = 25.0);

/// Normalized score: alpha * angle/π + (1 - alpha) * t_min/time_to_safety.
double score_route(ScoredRoute& route, double fire_direction, double alpha, double t_min);

struct RouteSelection {
  ScoredRoute best;
  std::vector<ScoredRoute> survivors;
  std::vector<ScoredRoute> rejected;
};

/// Argmax of score over surviving candidates; ties go to the shorter
/// time_to_safety, then the lexicographically smaller node path.
const ScoredRoute& select_best(const std::vector<ScoredRoute>& scored);

RouteSelection best_route(const RoadGraph& graph, Point start, const TransportMode& mode,
                          const FireTimeline& timeline, double fire_direction,
                          const RoutingOptions& options = {});

enum class Turn { Left, Straight, Right };

struct TurnInstruction {
  std::size_t node_index = 0;
  Turn turn = Turn::Straight;
  double angle = 0.0;     // radians, positive clockwise
  double distance = 0.0;  // meters from the current position along the route
};

struct Guidance {
  bool off_route = false;
  std::size_t next_index = 0;
  double relative_bearing = 0.0;  // radians in (-π, π], positive to the right
  double distance_to_next = 0.0;
  double remaining = 0.0;
  std::vector<TurnInstruction> turns;
};

/// Navigation cues relative to the user's heading (compass radians).
Guidance guidance(const ScoredRoute& route, Point position, double heading,
                  double off_route_threshold = 500.0);

}  // namespace wildfire
