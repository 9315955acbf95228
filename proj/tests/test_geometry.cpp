#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wildfire/geometry.hpp"
#include "wildfire/projection.hpp"

using namespace wildfire;

namespace {
constexpr double kPi = std::numbers::pi;
const Polygon kSquare{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
}  // namespace

TEST_CASE("bearing is clockwise from north") {
  CHECK(bearing({0, 0}, {0, 5}) == doctest::Approx(0.0));
  CHECK(bearing({0, 0}, {5, 0}) == doctest::Approx(kPi / 2));
  CHECK(bearing({0, 0}, {0, -5}) == doctest::Approx(kPi));
  CHECK(bearing({0, 0}, {-5, 0}) == doctest::Approx(3 * kPi / 2));
  const Point u = compass_unit(kPi / 2);
  CHECK(u.x == doctest::Approx(1.0));
  CHECK(u.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("angle helpers wrap into their ranges") {
  CHECK(normalize_angle(-kPi / 2) == doctest::Approx(3 * kPi / 2));
  CHECK(normalize_angle(5 * kPi) == doctest::Approx(kPi));
  CHECK(signed_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(signed_angle(-kPi) == doctest::Approx(kPi));
  CHECK(angular_difference(0.1, 2 * kPi - 0.1) == doctest::Approx(0.2));
  CHECK(angular_difference(0.0, kPi) == doctest::Approx(kPi));
}

TEST_CASE("signed area and perimeter") {
  CHECK(signed_area(kSquare) == doctest::Approx(100.0));
  Polygon cw(kSquare.rbegin(), kSquare.rend());
  CHECK(signed_area(cw) == doctest::Approx(-100.0));
  CHECK(perimeter(kSquare) == doctest::Approx(40.0));
}

TEST_CASE("locate distinguishes inside, boundary and outside") {
  CHECK(locate({5, 5}, kSquare) == Containment::Inside);
  CHECK(locate({10, 5}, kSquare) == Containment::Boundary);
  CHECK(locate({0, 0}, kSquare) == Containment::Boundary);
  CHECK(locate({10.0001, 5}, kSquare) == Containment::Outside);
  CHECK(contains(kSquare, {10, 10}));
  CHECK_FALSE(contains(kSquare, {-1, 5}));
}

TEST_CASE("distances to segments and polygons") {
  CHECK(distance_to_segment({5, 3}, {0, 0}, {10, 0}) == doctest::Approx(3.0));
  CHECK(distance_to_segment({13, 4}, {0, 0}, {10, 0}) == doctest::Approx(5.0));
  CHECK(distance_to_polygon({5, 5}, kSquare) == 0.0);
  CHECK(distance_to_polygon({5, 13}, kSquare) == doctest::Approx(3.0));
}

TEST_CASE("segment intersection") {
  CHECK(segments_intersect({0, 0}, {10, 10}, {0, 10}, {10, 0}));
  CHECK(segments_intersect({0, 0}, {10, 0}, {10, 0}, {10, 5}));
  CHECK_FALSE(segments_intersect({0, 0}, {10, 0}, {0, 1}, {10, 1}));
  double t = 0, u = 0;
  REQUIRE(segment_crossing({0, 0}, {10, 10}, {0, 10}, {10, 0}, t, u));
  CHECK(t == doctest::Approx(0.5));
  CHECK(u == doctest::Approx(0.5));
  CHECK_FALSE(segment_crossing({0, 0}, {10, 0}, {0, 1}, {10, 1}, t, u));
}

TEST_CASE("simplicity") {
  CHECK(is_simple(kSquare));
  const Polygon bowtie{{0, 0}, {10, 10}, {10, 0}, {0, 10}};
  CHECK_FALSE(is_simple(bowtie));
}

TEST_CASE("projection round trip stays within half a meter over the scenario extent") {
  const LocalFrame frame({33.395, 35.125});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-20'000.0, 20'000.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point p{d(rng), d(rng)};
    worst = std::max(worst, distance(p, frame.to_local(frame.to_geo(p))));
  }
  CHECK(worst < 0.5);
  const Point east = frame.to_local({33.395 + 1.0, 35.125});
  CHECK(east.x == doctest::Approx(std::cos(35.125 * kPi / 180.0) * 111'320.0));
  const Point north = frame.to_local({33.395, 35.125 + 1.0});
  CHECK(north.y == doctest::Approx(110'540.0));
}
