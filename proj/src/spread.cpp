#include "wildfire/spread.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "wildfire/errors.hpp"

namespace wildfire {

// ---------------------------------------------------------------------------
// Configuration

void EngineConfig::validate() const {
  if (!(dq > 0.0)) throw ConfigError("dq must be positive");
  if (!(d_min > 0.0) || !(d_min < d_max)) throw ConfigError("need 0 < d_min < d_max");
  if (remesh_every < 1) throw ConfigError("remesh_every must be >= 1");
  if (!(r_init > 0.0)) throw ConfigError("r_init must be positive");
  if (initial_markers < 4) throw ConfigError("initial_markers must be >= 4");
}

EngineConfig EngineConfig::from_json(const nlohmann::json& doc) {
  EngineConfig c;
  try {
    c.dq = doc.value("dq", c.dq);
    c.d_min = doc.value("d_min", c.d_min);
    c.d_max = doc.value("d_max", c.d_max);
    c.remesh_every = doc.value("remesh_every", c.remesh_every);
    c.r_init = doc.value("r_init", c.r_init);
    c.initial_markers = doc.value("initial_markers", c.initial_markers);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("engine config: ") + e.what());
  }
  c.validate();
  return c;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open engine config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json EngineConfig::to_json() const {
  return {{"dq", dq},           {"d_min", d_min},   {"d_max", d_max},
          {"remesh_every", remesh_every}, {"r_init", r_init}, {"initial_markers", initial_markers}};
}

// ---------------------------------------------------------------------------
// Kinematics

double rate_of_spread(const FuelParams& fuel, double effective_wind, double slope_tan,
                      double moisture_damp) {
  if (fuel.r0 <= 0.0) return 0.0;
  return moisture_damp * fuel.r0 *
         (1.0 + fuel.wind_coeff * std::max(effective_wind, 0.0) +
          fuel.slope_coeff * std::max(slope_tan, 0.0));
}

Point outward_normal(Point prev, Point next) {
  const Point chord = next - prev;
  const double len = norm(chord);
  if (len == 0.0) return {0.0, 0.0};
  // Interior lies to the left of a counter-clockwise traversal.
  return {chord.y / len, -chord.x / len};
}

Point Marker::position_at(double t) const {
  if (frozen || destination_time <= time || t <= time) return position;
  if (t >= destination_time) return destination;
  const double f = (t - time) / (destination_time - time);
  return position + f * (destination - position);
}

// ---------------------------------------------------------------------------
// EventQueue

void EventQueue::push(double time, int marker) {
  erase(marker);
  events_.insert({time, marker});
  pending_[marker] = time;
}

EventQueue::Event EventQueue::pop() {
  const Event e = *events_.begin();
  events_.erase(events_.begin());
  pending_.erase(e.marker);
  return e;
}

bool EventQueue::erase(int marker) {
  const auto it = pending_.find(marker);
  if (it == pending_.end()) return false;
  events_.erase({it->second, marker});
  pending_.erase(it);
  return true;
}

// ---------------------------------------------------------------------------
// FireFront

FireFront::FireFront(std::vector<Marker> loop) : loop_(std::move(loop)) { reindex(); }

void FireFront::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < loop_.size(); ++i) index_[loop_[i].id] = i;
}

const Marker& FireFront::prev(int id) const {
  const std::size_t i = index_.at(id);
  return loop_[(i + loop_.size() - 1) % loop_.size()];
}

const Marker& FireFront::next(int id) const {
  const std::size_t i = index_.at(id);
  return loop_[(i + 1) % loop_.size()];
}

Polygon FireFront::positions_at(double t) const {
  Polygon out;
  out.reserve(loop_.size());
  for (const auto& m : loop_) out.push_back(m.position_at(t));
  return out;
}

Polygon FireFront::positions() const {
  Polygon out;
  out.reserve(loop_.size());
  for (const auto& m : loop_) out.push_back(m.position);
  return out;
}

RemeshResult remesh(FireFront& front, double d_min, double d_max, int& next_id) {
  if (!(d_min < d_max)) throw ConfigError("remesh needs d_min < d_max");
  RemeshResult result;
  auto& loop = front.loop();

  for (std::size_t i = 0; i < loop.size() && loop.size() > 4;) {
    const std::size_t n = loop.size();
    const Point p = loop[i].position;
    const double before = distance(loop[(i + n - 1) % n].position, p);
    const double after = distance(p, loop[(i + 1) % n].position);
    if (before < d_min && after < d_min) {
      result.removed.push_back(loop[i].id);
      loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }

  std::vector<Marker> out;
  out.reserve(loop.size() * 2);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Marker& a = loop[i];
    const Marker& b = loop[(i + 1) % loop.size()];
    out.push_back(a);
    const double gap = distance(a.position, b.position);
    if (gap <= d_max) continue;
    const int pieces = static_cast<int>(std::ceil(gap / d_max));
    for (int k = 1; k < pieces; ++k) {
      const double f = static_cast<double>(k) / pieces;
      Marker m;
      m.id = next_id++;
      m.position = a.position + f * (b.position - a.position);
      m.time = 0.5 * (a.time + b.time);
      m.destination = m.position;
      m.destination_time = m.time;
      out.push_back(m);
      result.inserted.push_back(m.id);
    }
  }
  loop = std::move(out);
  front.reindex();
  return result;
}

// ---------------------------------------------------------------------------
// Loop pruning

namespace {

Polygon drop_duplicates(const Polygon& in) {
  Polygon out;
  out.reserve(in.size());
  for (const Point& p : in) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

bool on_closed_segment(Point p, Point a, Point b) {
  return cross(b - a, p - a) == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Locates a point shared by two touching segments.
Point touch_point(Point a, Point b, Point c, Point d) {
  double t = 0.0, u = 0.0;
  if (segment_crossing(a, b, c, d, t, u)) return a + t * (b - a);
  if (on_closed_segment(c, a, b)) return c;
  if (on_closed_segment(d, a, b)) return d;
  if (on_closed_segment(a, c, d)) return a;
  return b;
}

}  // namespace

Polygon prune_loops(Polygon polygon) {
  Polygon loop = drop_duplicates(polygon);
  while (loop.size() >= 3) {
    const std::size_t n = loop.size();
    bool split = false;
    for (std::size_t i = 0; i < n && !split; ++i) {
      for (std::size_t j = i + 2; j < n && !split; ++j) {
        if (i == 0 && j == n - 1) continue;
        const Point a = loop[i], b = loop[i + 1];
        const Point c = loop[j], d = loop[(j + 1) % n];
        if (!segments_intersect(a, b, c, d)) continue;
        const Point x = touch_point(a, b, c, d);
        Polygon first{x};
        for (std::size_t k = i + 1; k <= j; ++k) first.push_back(loop[k]);
        Polygon second{x};
        for (std::size_t k = j + 1; k < n; ++k) second.push_back(loop[k]);
        for (std::size_t k = 0; k <= i; ++k) second.push_back(loop[k]);
        first = drop_duplicates(first);
        second = drop_duplicates(second);
        const double a1 = first.size() >= 3 ? std::abs(signed_area(first)) : -1.0;
        const double a2 = second.size() >= 3 ? std::abs(signed_area(second)) : -1.0;
        loop = a1 >= a2 ? std::move(first) : std::move(second);
        split = true;
      }
    }
    if (!split) break;
  }
  if (signed_area(loop) < 0.0) std::reverse(loop.begin(), loop.end());
  return loop;
}

const Isochrone* IsochroneSet::ring(int minutes) const {
  for (const auto& r : rings) {
    if (r.minutes == minutes) return &r;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Environment

SpreadEnvironment::SpreadEnvironment(const TerrainGrid& terrain, const WindProvider& wind,
                                     LocalFrame frame, double moisture_damp, double wind_time_offset)
    : terrain_(terrain),
      wind_(wind),
      frame_(frame),
      grid_origin_(frame.to_local(terrain.spec().origin)),
      damp_(moisture_damp),
      wind_time_offset_(wind_time_offset) {}

WindSample SpreadEnvironment::wind(Point local, double seconds) const {
  return wind_.at(frame_.to_geo(local), wind_time_offset_ + seconds);
}

Point SpreadEnvironment::clamp(Point local) const {
  const auto& spec = terrain_.spec();
  const Point g = local - grid_origin_;
  return grid_origin_ + Point{std::clamp(g.x, 0.0, spec.width()), std::clamp(g.y, 0.0, spec.height())};
}

// ---------------------------------------------------------------------------
// FrontTracker

FrontTracker::FrontTracker(const SpreadEnvironment& env, EngineConfig config)
    : env_(env), config_(config) {
  config_.validate();
}

void FrontTracker::ignite() {
  const CellSample at_origin = env_.sample({0.0, 0.0});
  if (at_origin.fuel == kNonBurnable) throw IgnitionError("non-burnable ignition");

  std::vector<Marker> loop;
  const int n = config_.initial_markers;
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    Marker m;
    m.id = next_id_++;
    m.position = env_.clamp({config_.r_init * std::cos(theta), config_.r_init * std::sin(theta)});
    m.destination = m.position;
    loop.push_back(m);
  }
  front_ = FireFront(std::move(loop));
  queue_ = EventQueue{};
  now_ = 0.0;
  pops_ = 0;
  for (auto& m : front_.loop()) plan(m, 0.0);
}

FrontTracker::Advance FrontTracker::advance_marker(const Marker& marker, Point prev, Point next,
                                                   double t) const {
  Advance a{marker.position, t, true, false};
  if (marker.pinned || !env_.in_extent(marker.position)) return a;
  Point n = outward_normal(prev, next);
  if (norm(n) == 0.0) {
    // Neighbors coincide; fall back to the radial direction from the ignition point.
    const double r = norm(marker.position);
    if (r == 0.0) return a;
    n = (1.0 / r) * marker.position;
  }
  const CellSample cell = env_.sample(marker.position);
  const WindSample w = env_.wind(marker.position, t);
  const double effective_wind = dot(w.vector(), n);
  const double slope = env_.slope_toward(marker.position, bearing({0.0, 0.0}, n));
  const double ros = rate_of_spread(cell.params, effective_wind, slope, env_.moisture_damp());
  if (ros <= 0.0) return a;

  Point target = marker.position + config_.dq * n;
  if (!env_.in_extent(target)) {
    target = env_.clamp(target);
    a.clamped = true;
  }
  const double step = distance(marker.position, target);
  if (step == 0.0) return a;
  a.position = target;
  a.arrival = t + step / (ros / 60.0);
  a.frozen = false;
  return a;
}

void FrontTracker::plan(Marker& m, double t) {
  m.position = m.position_at(t);
  m.time = t;
  const Point prev = front_.prev(m.id).position_at(t);
  const Point next = front_.next(m.id).position_at(t);
  const Advance a = advance_marker(m, prev, next, t);
  if (a.frozen) {
    m.frozen = true;
    m.destination = m.position;
    m.destination_time = t;
    queue_.erase(m.id);
    return;
  }
  m.frozen = false;
  m.pinned = a.clamped;
  m.destination = a.position;
  m.destination_time = a.arrival;
  queue_.push(a.arrival, m.id);
}

void FrontTracker::run_until(double until) {
  while (!queue_.empty() && queue_.top().time <= until) {
    const EventQueue::Event e = queue_.pop();
    now_ = e.time;
    ++pops_;
    if (on_event) on_event(e.time, e.marker);

    Marker& m = front_.at(e.marker);
    m.position = m.destination;
    m.time = e.time;
    if (m.pinned) {
      m.frozen = true;
      m.destination_time = e.time;
    } else {
      plan(m, e.time);
    }
    // A frozen neighbor gets another look now that its normal has changed.
    for (int id : {front_.prev(e.marker).id, front_.next(e.marker).id}) {
      Marker& nb = front_.at(id);
      if (nb.frozen && !nb.pinned) plan(nb, e.time);
    }
    if (pops_ % static_cast<std::uint64_t>(config_.remesh_every) == 0) do_remesh();
  }
}

void FrontTracker::do_remesh() {
  for (auto& m : front_.loop()) {
    m.position = m.position_at(now_);
    m.time = now_;
  }
  const RemeshResult r = remesh(front_, config_.d_min, config_.d_max, next_id_);
  for (int id : r.removed) queue_.erase(id);
  for (int id : r.inserted) plan(front_.at(id), now_);
}

Polygon FrontTracker::snapshot(double t) const { return prune_loops(front_.positions_at(t)); }

IsochroneSet simulate(const ScenarioConfig& scenario, const TerrainGrid& terrain,
                      const WindProvider& wind, const EngineConfig& config) {
  scenario.validate();
  const SpreadEnvironment env(terrain, wind, LocalFrame(scenario.ignition),
                              moisture_damp(scenario.humidity));
  FrontTracker tracker(env, config);
  tracker.ignite();

  IsochroneSet out;
  out.anchor = scenario.ignition;
  for (int minutes = 0; minutes <= scenario.horizon; minutes += scenario.ring_interval) {
    const double t = minutes * 60.0;
    tracker.run_until(t);
    out.rings.push_back({minutes, tracker.snapshot(t)});
  }
  return out;
}

}  // namespace wildfire
