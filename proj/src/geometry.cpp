#include "wildfire/geometry.hpp"

#include <algorithm>
#include <limits>

namespace wildfire {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

double bearing(Point from, Point to) {
  const Point d = to - from;
  return normalize_angle(std::atan2(d.x, d.y));
}

double normalize_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double signed_angle(double radians) {
  double r = normalize_angle(radians);
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

double angular_difference(double a, double b) { return std::abs(signed_angle(a - b)); }

double signed_area(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(loop[i], loop[(i + 1) % n]);
  }
  return 0.5 * twice;
}

double perimeter(std::span<const Point> loop) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    total += distance(loop[i], loop[(i + 1) % loop.size()]);
  }
  return total;
}

Containment locate(Point p, std::span<const Point> loop) {
  const std::size_t n = loop.size();
  if (n == 0) return Containment::Outside;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = loop[j];
    const Point b = loop[i];
    if (p == a || p == b) return Containment::Boundary;
    if (orientation(a, b, p) == 0 && on_segment(p, a, b)) return Containment::Boundary;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside ? Containment::Inside : Containment::Outside;
}

double distance_to_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double distance_to_polygon(Point p, std::span<const Point> loop) {
  if (loop.empty()) return std::numeric_limits<double>::infinity();
  if (contains(loop, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    best = std::min(best, distance_to_segment(p, loop[i], loop[(i + 1) % loop.size()]));
  }
  return best;
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(c, a, b)) return true;
  if (o2 == 0 && on_segment(d, a, b)) return true;
  if (o3 == 0 && on_segment(a, c, d)) return true;
  if (o4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

bool segment_crossing(Point a, Point b, Point c, Point d, double& t, double& u) {
  const Point r = b - a;
  const Point s = d - c;
  const double denom = cross(r, s);
  if (denom == 0.0) return false;
  t = cross(c - a, s) / denom;
  u = cross(c - a, r) / denom;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

bool is_simple(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = loop[i];
    const Point b = loop[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Point c = loop[j];
      const Point d = loop[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one endpoint; they must not overlap beyond it.
        const Point shared = (j == i + 1) ? b : a;
        const Point other_first = (j == i + 1) ? a : b;
        const Point other_second = (j == i + 1) ? d : c;
        if (orientation(other_first, shared, other_second) == 0 &&
            dot(other_first - shared, other_second - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

}  // namespace wildfire
