#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "wildfire/geometry.hpp"
#include "wildfire/projection.hpp"
#include "wildfire/scenario.hpp"
#include "wildfire/terrain.hpp"
#include "wildfire/wind.hpp"

namespace wildfire {

/// Front-tracking knobs. Lengths in meters.
struct EngineConfig {
  double dq = 10.0;         // spatial increment per marker advance
  double d_min = 5.0;       // markers closer than this on both sides are dropped
  double d_max = 25.0;      // gaps wider than this get a midpoint marker
  int remesh_every = 64;    // event pops between remesh passes
  double r_init = 5.0;      // ignition disk radius
  int initial_markers = 16;

  void validate() const;
  static EngineConfig from_json(const nlohmann::json& doc);
  static EngineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Rate of spread in m/min. Wind and slope amplify the base rate; they never
/// slow it below the no-wind, flat-ground value.
double rate_of_spread(const FuelParams& fuel, double effective_wind, double slope_tan,
                      double moisture_damp);

/// Outward unit normal at a marker of a counter-clockwise loop, taken
/// perpendicular to the chord between its neighbors.
Point outward_normal(Point prev, Point next);

struct Marker {
  int id = 0;
  Point position;           // where the marker was at `time`
  double time = 0.0;        // seconds since ignition
  Point destination;        // pending target; equals position when frozen
  double destination_time = 0.0;
  bool frozen = false;
  bool pinned = false;      // clamped at the terrain edge; never moves again

  /// Linear interpolation along the pending leg.
  Point position_at(double t) const;
};

/// Pending marker arrivals ordered by time, ties by marker id. Holds at most
/// one event per marker.
class EventQueue {
 public:
  struct Event {
    double time = 0.0;
    int marker = 0;
    friend auto operator<=>(const Event&, const Event&) = default;
  };

  void push(double time, int marker);
  Event pop();
  const Event& top() const { return *events_.begin(); }
  bool erase(int marker);
  bool contains(int marker) const { return pending_.contains(marker); }
  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

 private:
  std::set<Event> events_;
  std::unordered_map<int, double> pending_;
};

/// Closed counter-clockwise loop of markers; neighbors are adjacent entries.
class FireFront {
 public:
  FireFront() = default;
  explicit FireFront(std::vector<Marker> loop);

  std::size_t size() const { return loop_.size(); }
  std::span<const Marker> markers() const { return loop_; }
  Marker& at(int id) { return loop_[index_.at(id)]; }
  const Marker& at(int id) const { return loop_[index_.at(id)]; }
  bool contains(int id) const { return index_.contains(id); }
  const Marker& prev(int id) const;
  const Marker& next(int id) const;

  std::vector<Marker>& loop() { return loop_; }
  /// Call after inserting or erasing loop entries.
  void reindex();

  Polygon positions_at(double t) const;
  Polygon positions() const;

 private:
  std::vector<Marker> loop_;
  std::unordered_map<int, std::size_t> index_;
};

/// Midpoint insertion above `d_max`, removal of markers crowded on both sides
/// below `d_min`. Never drops the loop under four markers. Returns ids of
/// inserted and removed markers so the caller can update its event queue.
struct RemeshResult {
  std::vector<int> inserted;
  std::vector<int> removed;
};
RemeshResult remesh(FireFront& front, double d_min, double d_max, int& next_id);

/// Cuts self-intersections, keeping the largest-area simple sub-loop, and
/// returns it counter-clockwise. Consecutive duplicate vertices are removed.
Polygon prune_loops(Polygon polygon);

struct Isochrone {
  int minutes = 0;
  Polygon polygon;  // local-frame meters, counter-clockwise
  friend bool operator==(const Isochrone&, const Isochrone&) = default;
};

struct IsochroneSet {
  GeoPoint anchor;  // origin of the local frame
  std::vector<Isochrone> rings;

  const Isochrone* ring(int minutes) const;
  friend bool operator==(const IsochroneSet&, const IsochroneSet&) = default;
};


/// Environment as seen from the local frame anchored at the ignition point.
class SpreadEnvironment {
 public:
  SpreadEnvironment(const TerrainGrid& terrain, const WindProvider& wind, LocalFrame frame,
                    double moisture_damp, double wind_time_offset = 0.0);

  const LocalFrame& frame() const { return frame_; }
  bool in_extent(Point local) const { return terrain_.in_extent(local - grid_origin_); }
  CellSample sample(Point local) const { return terrain_.sample(local - grid_origin_); }
  double slope_toward(Point local, double direction) const {
    return terrain_.slope_toward(local - grid_origin_, direction);
  }
  WindSample wind(Point local, double seconds) const;
  double moisture_damp() const { return damp_; }
  /// Nearest point of the terrain extent.
  Point clamp(Point local) const;

 private:
  const TerrainGrid& terrain_;
  const WindProvider& wind_;
  LocalFrame frame_;
  Point grid_origin_;
  double damp_;
  double wind_time_offset_;
};

/// Discrete-event front tracker for one fire. Single-threaded; owns its state.
class FrontTracker {
 public:
  FrontTracker(const SpreadEnvironment& env, EngineConfig config);

  /// Seeds the ignition disk at the local origin. Throws IgnitionError on
  /// non-burnable fuel and OutOfBounds outside the terrain.
  void ignite();

  /// Processes every event with time <= `until` (seconds).
  void run_until(double until);
  double now() const { return now_; }
  std::uint64_t pops() const { return pops_; }

  /// Front polygon at `t` seconds; `t` must not precede the last processed event.
  Polygon snapshot(double t) const;

  const FireFront& front() const { return front_; }
  const EventQueue& queue() const { return queue_; }

  /// Observer invoked on each popped event (time, marker id).
  std::function<void(double, int)> on_event;

  /// Same kinematics as the tracker: new position and arrival time for one
  /// advance of `marker` given its current neighbors.
  struct Advance {
    Point position;
    double arrival = 0.0;
    bool frozen = false;
    bool clamped = false;
  };
  Advance advance_marker(const Marker& marker, Point prev, Point next, double t) const;

 private:
  void plan(Marker& m, double t);
  void do_remesh();

  const SpreadEnvironment& env_;
  EngineConfig config_;
  FireFront front_;
  EventQueue queue_;
  double now_ = 0.0;
  std::uint64_t pops_ = 0;
  int next_id_ = 0;
};

/// Runs a fire to `scenario.horizon` minutes and snapshots every ring interval.
IsochroneSet simulate(const ScenarioConfig& scenario, const TerrainGrid& terrain,
                      const WindProvider& wind, const EngineConfig& config = {});

}  // namespace wildfire
