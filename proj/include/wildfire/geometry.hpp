#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace wildfire {

/// Planar point in meters. x grows east, y grows north.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

using Polygon = std::vector<Point>;

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

/// Unit vector for a compass direction (radians clockwise from north).
inline Point compass_unit(double radians) { return {std::sin(radians), std::cos(radians)}; }

/// Compass bearing from `from` to `to`, radians clockwise from north in [0, 2π).
double bearing(Point from, Point to);

/// Wraps an angle into [0, 2π).
double normalize_angle(double radians);

/// Wraps an angle into (-π, π].
double signed_angle(double radians);

/// Smallest absolute difference between two directions, in [0, π].
double angular_difference(double a, double b);

/// Shoelace area; positive for counter-clockwise loops. The loop is implicitly closed.
double signed_area(std::span<const Point> loop);

double perimeter(std::span<const Point> loop);

enum class Containment { Outside, Boundary, Inside };

/// Crossing-number test with an exact on-edge check. The loop is implicitly closed.
Containment locate(Point p, std::span<const Point> loop);

/// Inside or on the boundary.
inline bool contains(std::span<const Point> loop, Point p) {
  return locate(p, loop) != Containment::Outside;
}

double distance_to_segment(Point p, Point a, Point b);

/// Zero when p lies inside or on the polygon, else distance to its boundary.
double distance_to_polygon(Point p, std::span<const Point> loop);

/// True when closed segments [a,b] and [c,d] share at least one point.
bool segments_intersect(Point a, Point b, Point c, Point d);

/// Parameters (t along ab, u along cd) of a proper or touching crossing.
/// Returns false for parallel segments.
bool segment_crossing(Point a, Point b, Point c, Point d, double& t, double& u);

/// True when no two non-adjacent edges of the closed loop touch.
bool is_simple(std::span<const Point> loop);

}  // namespace wildfire
