#include "wildfire/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <queue>

#include <spdlog/spdlog.h>

#include "wildfire/errors.hpp"

namespace wildfire {

Mode parse_mode(const std::string& name) {
  if (name == "walking") return Mode::Walking;
  if (name == "cycling") return Mode::Cycling;
  if (name == "driving") return Mode::Driving;
  throw ConfigError("unknown transport mode '" + name + "'");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Walking: return "walking";
    case Mode::Cycling: return "cycling";
    case Mode::Driving: return "driving";
  }
  return "unknown";
}

TransportMode TransportMode::of(Mode m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly between 0 and 1");
  switch (m) {
    case Mode::Walking: return {m, 4.5, alpha};
    case Mode::Cycling: return {m, 15.0, alpha};
    case Mode::Driving: return {m, 50.0, alpha};
  }
  throw ConfigError("unknown transport mode");
}

// ---------------------------------------------------------------------------
// Road network ingestion

namespace {

ModeSet parse_modes(const nlohmann::json& props, std::size_t feature) {
  const nlohmann::json* modes = nullptr;
  if (props.is_object() && props.contains("modes")) modes = &props["modes"];
  if (!modes || modes->is_null()) {
    spdlog::warn("road feature {} has no modes; allowing all", feature);
    return kAllModes;
  }
  std::vector<std::string> names;
  if (modes->is_string()) {
    std::string s = modes->get<std::string>();
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const auto comma = s.find(',', pos);
      std::string part = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      part.erase(0, part.find_first_not_of(' '));
      part.erase(part.find_last_not_of(' ') + 1);
      if (!part.empty()) names.push_back(part);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } else if (modes->is_array()) {
    for (const auto& m : *modes) names.push_back(m.get<std::string>());
  } else {
    throw ParseError("road feature " + std::to_string(feature) + ": 'modes' must be a string or array");
  }
  ModeSet set = 0;
  for (const auto& n : names) set |= static_cast<ModeSet>(parse_mode(n));
  if (set == 0) {
    spdlog::warn("road feature {} has an empty mode list; allowing all", feature);
    return kAllModes;
  }
  return set;
}

}  // namespace

RoadNetwork RoadNetwork::from_geojson(const nlohmann::json& doc) {
  RoadNetwork net;
  try {
    if (doc.at("type") != "FeatureCollection") throw ParseError("road network must be a FeatureCollection");
    const auto& features = doc.at("features");
    for (std::size_t i = 0; i < features.size(); ++i) {
      const auto& f = features[i];
      const auto& geom = f.at("geometry");
      if (geom.is_null() || geom.at("type") != "LineString") {
        spdlog::warn("road feature {} is not a LineString; skipped", i);
        continue;
      }
      Way way;
      way.modes = parse_modes(f.contains("properties") ? f["properties"] : nlohmann::json(), i);
      for (const auto& c : geom.at("coordinates")) {
        way.points.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      }
      net.ways.push_back(std::move(way));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("road network: ") + e.what());
  }
  return net;
}

RoadNetwork RoadNetwork::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open road network " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_geojson(doc);
}

RoadGraph RoadGraph::build(const RoadNetwork& network, const LocalFrame& frame) {
  RoadGraph g;
  // One-meter buckets; a vertex merges with any node in the surrounding 3x3 block.
  std::map<std::pair<long long, long long>, std::vector<int>> buckets;
  auto node_for = [&](GeoPoint geo) {
    const Point p = frame.to_local(geo);
    const long long bx = static_cast<long long>(std::floor(p.x / kSnapTolerance));
    const long long by = static_cast<long long>(std::floor(p.y / kSnapTolerance));
    int best = -1;
    double best_d = kSnapTolerance;
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find({bx + dx, by + dy});
        if (it == buckets.end()) continue;
        for (int id : it->second) {
          const double d = distance(g.nodes_[static_cast<std::size_t>(id)].position, p);
          if (d <= best_d && (best < 0 || d < best_d || id < best)) {
            best = id;
            best_d = d;
          }
        }
      }
    }
    if (best >= 0) return best;
    const int id = g.add_node(p, geo);
    buckets[{bx, by}].push_back(id);
    return id;
  };

  for (const auto& way : network.ways) {
    int prev = -1;
    for (const auto& geo : way.points) {
      const int id = node_for(geo);
      if (prev >= 0) g.add_edge(prev, id, way.modes);
      prev = id;
    }
  }
  if (g.edges_.empty()) throw StructuralError("road network holds no usable edges");
  return g;
}

RoadGraph RoadGraph::load(const std::filesystem::path& path, const LocalFrame& frame) {
  return build(RoadNetwork::load(path), frame);
}

int RoadGraph::add_node(Point p, GeoPoint geo) {
  nodes_.push_back({p, geo});
  adjacency_.emplace_back();
  return static_cast<int>(nodes_.size() - 1);
}

void RoadGraph::add_edge(int a, int b, ModeSet modes, std::optional<double> length) {
  const double straight = distance(node(a).position, node(b).position);
  const double len = std::max(length.value_or(straight), straight);
  if (a == b || len <= 0.0) {
    spdlog::debug("dropping zero-length road edge at node {}", a);
    return;
  }
  if (modes == 0) throw ConfigError("road edge must allow at least one mode");
  edges_.push_back({a, b, len, modes});
  const int e = static_cast<int>(edges_.size() - 1);
  adjacency_[static_cast<std::size_t>(a)].push_back(e);
  adjacency_[static_cast<std::size_t>(b)].push_back(e);
}

std::optional<double> RoadGraph::hop_length(int a, int b, Mode mode) const {
  std::optional<double> best;
  for (int e : incident(a)) {
    const RoadEdge& edge = edges_[static_cast<std::size_t>(e)];
    const int other = edge.a == a ? edge.b : edge.a;
    if (other != b || !allows(edge.modes, mode)) continue;
    if (!best || edge.length < *best) best = edge.length;
  }
  return best;
}

std::optional<int> RoadGraph::nearest_node(Point p, double radius) const {
  std::optional<int> best;
  double best_d = radius;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double d = distance(nodes_[i].position, p);
    if (d < best_d || (d == best_d && !best)) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// FireTimeline

FireTimeline::FireTimeline(IsochroneSet rings) : rings_(std::move(rings)) {
  if (rings_.rings.empty()) throw ConfigError("fire timeline needs at least one ring");
  std::sort(rings_.rings.begin(), rings_.rings.end(),
            [](const Isochrone& a, const Isochrone& b) { return a.minutes < b.minutes; });
}

double FireTimeline::ring_arrival(std::size_t k) const {
  return k == 0 ? 0.0 : rings_.rings[k - 1].minutes * 60.0;
}

double FireTimeline::arrival(Point p) const {
  for (std::size_t k = 0; k < rings_.rings.size(); ++k) {
    if (contains(rings_.rings[k].polygon, p)) return ring_arrival(k);
  }
  return kNever;
}

// ---------------------------------------------------------------------------
// Candidate generation

std::set<int> safe_nodes(const RoadGraph& graph, const FireTimeline& timeline, double safe_distance) {
  std::set<int> out;
  const Polygon& outer = timeline.outer().polygon;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (distance_to_polygon(graph.nodes()[i].position, outer) >= safe_distance) {
      out.insert(static_cast<int>(i));
    }
  }
  return out;
}

double ScoredRoute::bearing() const {
  if (points.size() < 2) return 0.0;
  return wildfire::bearing(points.front(), points.back());
}

ScoredRoute make_route(const RoadGraph& graph, std::vector<int> nodes, const TransportMode& mode,
                       double departure_s) {
  ScoredRoute r;
  r.mode = mode.mode;
  r.nodes = std::move(nodes);
  double t = departure_s;
  r.entry_times.push_back(t);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.points.push_back(graph.node(r.nodes[i]).position);
    if (i == 0) continue;
    const auto len = graph.hop_length(r.nodes[i - 1], r.nodes[i], mode.mode);
    if (!len) throw ConfigError("route hop is not traversable by " + mode_name(mode.mode));
    const double dt = *len / mode.speed_mps();
    r.leg_times.push_back(dt);
    r.length += *len;
    r.time_to_safety += dt;
    t += dt;
    r.entry_times.push_back(t);
  }
  return r;
}

namespace {

using Adjacency = std::vector<std::vector<std::pair<int, double>>>;
using Path = std::vector<int>;

// Collapsed per-mode adjacency plus a sink fed by every safe node at zero cost.
Adjacency build_adjacency(const RoadGraph& graph, Mode mode, const std::set<int>& targets, int sink) {
  Adjacency adj(graph.node_count() + 1);
  for (std::size_t a = 0; a < graph.node_count(); ++a) {
    std::map<int, double> best;
    for (int e : graph.incident(static_cast<int>(a))) {
      const RoadEdge& edge = graph.edges()[static_cast<std::size_t>(e)];
      if (!allows(edge.modes, mode)) continue;
      const int other = edge.a == static_cast<int>(a) ? edge.b : edge.a;
      const auto it = best.find(other);
      if (it == best.end() || edge.length < it->second) best[other] = edge.length;
    }
    adj[a].assign(best.begin(), best.end());
  }
  for (int t : targets) adj[static_cast<std::size_t>(t)].push_back({sink, 0.0});
  return adj;
}

double path_cost(const Adjacency& adj, const Path& p) {
  double total = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    for (const auto& [to, w] : adj[static_cast<std::size_t>(p[i - 1])]) {
      if (to == p[i]) {
        total += w;
        break;
      }
    }
  }
  return total;
}

std::optional<Path> shortest(const Adjacency& adj, int source, int target,
                             const std::vector<char>& banned_nodes,
                             const std::set<std::pair<int, int>>& banned_edges) {
  const std::size_t n = adj.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    if (u == target) break;
    for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
      if (banned_nodes[static_cast<std::size_t>(v)] || banned_edges.contains({u, v})) continue;
      const double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        parent[static_cast<std::size_t>(v)] = u;
        pq.push({nd, v});
      }
    }
  }
  if (!std::isfinite(dist[static_cast<std::size_t>(target)])) return std::nullopt;
  Path p;
  for (int v = target; v != -1; v = parent[static_cast<std::size_t>(v)]) p.push_back(v);
  std::reverse(p.begin(), p.end());
  return p;
}

// Yen's loopless k-shortest paths.
std::vector<Path> k_shortest(const Adjacency& adj, int source, int sink, int k) {
  std::vector<Path> found;
  const std::vector<char> none(adj.size(), 0);
  auto first = shortest(adj, source, sink, none, {});
  if (!first) return found;
  found.push_back(*first);
  std::set<std::pair<double, Path>> pending;
  std::set<Path> seen{*first};

  while (static_cast<int>(found.size()) < k) {
    const Path& last = found.back();
    for (std::size_t i = 0; i + 1 < last.size(); ++i) {
      const int spur = last[i];
      const Path root(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      std::set<std::pair<int, int>> banned_edges;
      for (const Path& p : found) {
        if (p.size() > i + 1 && std::equal(root.begin(), root.end(), p.begin())) {
          banned_edges.insert({p[i], p[i + 1]});
        }
      }
      std::vector<char> banned_nodes(adj.size(), 0);
      for (std::size_t r = 0; r < i; ++r) banned_nodes[static_cast<std::size_t>(root[r])] = 1;
      const auto tail = shortest(adj, spur, sink, banned_nodes, banned_edges);
      if (!tail) continue;
      Path total = root;
      total.insert(total.end(), tail->begin() + 1, tail->end());
      if (seen.insert(total).second) pending.insert({path_cost(adj, total), total});
    }
    if (pending.empty()) break;
    found.push_back(pending.begin()->second);
    pending.erase(pending.begin());
  }
  return found;
}

}  // namespace

std::vector<ScoredRoute> candidate_routes(const RoadGraph& graph, Point start, const TransportMode& mode,
                                          const FireTimeline& timeline, const RoutingOptions& options) {
  if (options.k < 1) throw ConfigError("k must be >= 1");
  const auto origin = graph.nearest_node(start, options.snap_radius);
  if (!origin) {
    throw RoutingError(RoutingError::Kind::Snap,
                       "start lies more than " + std::to_string(options.snap_radius) + " m from the road graph");
  }
  const std::set<int> safe = safe_nodes(graph, timeline, options.safe_distance);
  if (safe.empty()) throw RoutingError(RoutingError::Kind::NoEscape, "no escape available: no safe node in graph");

  if (safe.contains(*origin)) return {make_route(graph, {*origin}, mode, options.departure_s)};

  const int sink = static_cast<int>(graph.node_count());
  const Adjacency adj = build_adjacency(graph, mode.mode, safe, sink);
  std::vector<ScoredRoute> out;
  for (Path& p : k_shortest(adj, *origin, sink, options.k)) {
    p.pop_back();
    out.push_back(make_route(graph, std::move(p), mode, options.departure_s));
  }
  if (out.empty()) {
    throw RoutingError(RoutingError::Kind::NoEscape, "no escape available: no safe node reachable by " +
                                                         mode_name(mode.mode));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conflict check

std::optional<Conflict> check_fire_conflict(const ScoredRoute& route, const FireTimeline& timeline,
                                            double margin_s, double sample_step) {
  const auto& rings = timeline.rings().rings;
  auto first_ring = [&](Point p) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < rings.size(); ++k) {
      if (contains(rings[k].polygon, p)) return k;
    }
    return std::nullopt;
  };
  auto probe = [&](Point p, double user_time, std::optional<std::size_t> crossed) -> std::optional<Conflict> {
    std::optional<std::size_t> k = first_ring(p);
    if (crossed && (!k || *crossed < *k)) k = crossed;
    if (!k) return std::nullopt;
    const double fire = timeline.ring_arrival(*k);
    if (user_time + margin_s >= fire) return Conflict{p, user_time, fire, rings[*k].minutes};
    return std::nullopt;
  };

  if (route.points.size() == 1) return probe(route.points.front(), route.entry_times.front(), std::nullopt);

  double covered = 0.0;  // route distance at the start of the current leg
  double next_sample = 0.0;
  for (std::size_t i = 0; i + 1 < route.points.size(); ++i) {
    const Point a = route.points[i];
    const Point b = route.points[i + 1];
    const double leg = distance(a, b);

    // Parameters along the leg paired with the ring whose boundary they sit on.
    std::vector<std::pair<double, std::optional<std::size_t>>> params{{0.0, std::nullopt}, {1.0, std::nullopt}};
    while (leg > 0.0 && next_sample <= covered + leg) {
      params.push_back({(next_sample - covered) / leg, std::nullopt});
      next_sample += sample_step;
    }
    for (std::size_t k = 0; k < rings.size(); ++k) {
      const Polygon& poly = rings[k].polygon;
      for (std::size_t e = 0; e < poly.size(); ++e) {
        double t = 0.0, u = 0.0;
        if (segment_crossing(a, b, poly[e], poly[(e + 1) % poly.size()], t, u)) params.push_back({t, k});
      }
    }
    std::sort(params.begin(), params.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    auto check_at = [&](double f, std::optional<std::size_t> crossed) {
      const Point p = a + f * (b - a);
      const double user = route.entry_times[i] + f * route.leg_times[i];
      return probe(p, user, crossed);
    };
    for (std::size_t j = 0; j < params.size(); ++j) {
      if (auto c = check_at(params[j].first, params[j].second)) return c;
      if (j + 1 < params.size() && params[j + 1].first > params[j].first) {
        if (auto c = check_at(0.5 * (params[j].first + params[j + 1].first), std::nullopt)) return c;
      }
    }
    covered += leg;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scoring and selection

double score_route(ScoredRoute& route, double fire_direction, double alpha, double t_min) {
  route.angle = route.nodes.size() < 2 ? std::numbers::pi : angular_difference(route.bearing(), fire_direction);
  route.angle_norm = route.angle / std::numbers::pi;
  route.time_norm = route.time_to_safety > 0.0 ? t_min / route.time_to_safety : 1.0;
  route.score = alpha * route.angle_norm + (1.0 - alpha) * route.time_norm;
  return route.score;
}

const ScoredRoute& select_best(const std::vector<ScoredRoute>& scored) {
  if (scored.empty()) throw std::logic_error("select_best needs at least one route");
  const ScoredRoute* best = &scored.front();
  for (const auto& r : scored) {
    if (r.score > best->score) {
      best = &r;
    } else if (r.score == best->score) {
      if (r.time_to_safety < best->time_to_safety ||
          (r.time_to_safety == best->time_to_safety && r.nodes < best->nodes)) {
        best = &r;
      }
    }
  }
  return *best;
}

RouteSelection best_route(const RoadGraph& graph, Point start, const TransportMode& mode,
                          const FireTimeline& timeline, double fire_direction, const RoutingOptions& options) {
  RouteSelection sel;
  for (auto& r : candidate_routes(graph, start, mode, timeline, options)) {
    r.conflict = check_fire_conflict(r, timeline, options.margin_s, options.sample_step);
    r.rejected = r.conflict.has_value();
    (r.rejected ? sel.rejected : sel.survivors).push_back(std::move(r));
  }
  if (sel.survivors.empty()) {
    throw RoutingError(RoutingError::Kind::NoSafeRoute, "every candidate route crosses the fire",
                       std::move(sel.rejected));
  }
  double t_min = std::numeric_limits<double>::infinity();
  for (const auto& r : sel.survivors) t_min = std::min(t_min, r.time_to_safety);
  for (auto& r : sel.survivors) score_route(r, fire_direction, mode.alpha, t_min);
  sel.best = select_best(sel.survivors);
  return sel;
}

// ---------------------------------------------------------------------------
// Guidance

Guidance guidance(const ScoredRoute& route, Point position, double heading, double off_route_threshold) {
  if (route.points.empty()) throw std::invalid_argument("guidance needs a non-empty route");
  Guidance g;
  const auto& pts = route.points;

  std::size_t seg = 0;
  double best = pts.size() == 1 ? distance(position, pts.front()) : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d = distance_to_segment(position, pts[i], pts[i + 1]);
    if (d < best) {
      best = d;
      seg = i;
    }
  }
  if (best > off_route_threshold) {
    g.off_route = true;
    return g;
  }
  g.next_index = pts.size() == 1 ? 0 : seg + 1;
  const Point next = pts[g.next_index];
  g.distance_to_next = distance(position, next);
  g.relative_bearing = g.distance_to_next > 0.0 ? signed_angle(bearing(position, next) - heading) : 0.0;

  g.remaining = g.distance_to_next;
  for (std::size_t i = g.next_index; i + 1 < pts.size(); ++i) {
    const double leg = distance(pts[i], pts[i + 1]);
    if (i >= 1) {
      const double turn = signed_angle(bearing(pts[i], pts[i + 1]) - bearing(pts[i - 1], pts[i]));
      constexpr double kStraight = 30.0 * std::numbers::pi / 180.0;
      const Turn kind = std::abs(turn) <= kStraight ? Turn::Straight : (turn > 0 ? Turn::Right : Turn::Left);
      g.turns.push_back({i, kind, turn, g.remaining});
    }
    g.remaining += leg;
  }
  return g;
}

}  // namespace wildfire
