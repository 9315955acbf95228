#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "support.hpp"
#include "wildfire/errors.hpp"
#include "wildfire/scenario.hpp"
#include "wildfire/terrain.hpp"
#include "wildfire/wind.hpp"

using namespace wildfire;
using namespace wildfire::testing;

namespace {

constexpr double kPi = std::numbers::pi;

AsciiGrid grid_from(const std::string& text) {
  std::istringstream in(text);
  return parse_ascii_grid(in);
}

const char* kTwoByTwo =
    "ncols 2\nnrows 2\nxllcorner 33.0\nyllcorner 35.0\ncellsize 30\n"
    "1 1\n1 1\n";

AsciiGrid flat_like(const AsciiGrid& g, double v) {
  AsciiGrid out = g;
  out.nodata.reset();
  std::fill(out.values.begin(), out.values.end(), v);
  return out;
}

// Ten-by-ten ramp rising 3 m per 30 m cell toward the east.
TerrainGrid east_ramp() {
  return uniform_terrain({33.0, 35.0}, 10, 30.0, 1, [](Point p) { return 0.1 * p.x; });
}

}  // namespace

TEST_CASE("smallest valid grid") {
  const AsciiGrid fuel = grid_from(kTwoByTwo);
  const TerrainGrid t = TerrainGrid::from_rasters(fuel, flat_like(fuel, 0.0), FuelCatalog::defaults());
  CHECK(t.spec().ncols == 2);
  CHECK(t.spec().nrows == 2);
  CHECK(t.cell_size() == 30.0);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(t.fuel_at({r, c}) == 1);
}

TEST_CASE("fuel NODATA reads non-burnable and elevation NODATA is filled") {
  const AsciiGrid fuel = grid_from(
      "ncols 3\nnrows 2\nxllcorner 33\nyllcorner 35\ncellsize 30\nNODATA_value -9999\n1 -9999 2\n1 1 1\n");
  const AsciiGrid elev = grid_from(
      "ncols 3\nnrows 2\nxllcorner 33\nyllcorner 35\ncellsize 30\nnodata_value -1\n10 -1 30\n-1 -1 -1\n");
  const TerrainGrid t = TerrainGrid::from_rasters(fuel, elev, FuelCatalog::defaults());
  CHECK(t.fuel_at({0, 1}) == kNonBurnable);
  CHECK(t.fuel_at({0, 2}) == 2);
  // Equidistant neighbors: the fill keeps a value of one of them.
  const double e = t.elevation_at({0, 1});
  CHECK((e == 10.0 || e == 30.0));
}

TEST_CASE("30 m fixture raster") {
  const AsciiGrid g = load_ascii_grid(fixture("athalassa/fuel.asc"));
  CHECK(g.cellsize == 30.0);
  CHECK(g.ncols == 160);
}

TEST_CASE("malformed grids name the offending header key") {
  CHECK_THROWS_WITH_AS(grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\n1 1\n1 1\n"),
                       doctest::Contains("cellsize"), ParseError);
  CHECK_THROWS_WITH_AS(grid_from("ncols x\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 1\n1 1\n"),
                       doctest::Contains("ncols"), ParseError);
  CHECK_THROWS_WITH_AS(grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nbogus 3\n1 1\n1 1\n"),
                       doctest::Contains("bogus"), ParseError);
  CHECK_THROWS_AS(grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 1\n1\n"), StructuralError);
  CHECK_THROWS_AS(grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 1\n"), StructuralError);
}

TEST_CASE("raster write then load is identical") {
  const AsciiGrid g = load_ascii_grid(fixture("athalassa/elevation.asc"));
  std::stringstream buf;
  write_ascii_grid(buf, g);
  const AsciiGrid back = parse_ascii_grid(buf);
  CHECK(back.ncols == g.ncols);
  CHECK(back.nrows == g.nrows);
  CHECK(back.cellsize == g.cellsize);
  CHECK(back.xllcorner == g.xllcorner);
  CHECK(back.yllcorner == g.yllcorner);
  CHECK(back.values == g.values);
}

TEST_CASE("terrain rasters must share a grid") {
  const AsciiGrid fuel = grid_from(kTwoByTwo);
  AsciiGrid elev = flat_like(fuel, 0.0);
  elev.cellsize = 25.0;
  CHECK_THROWS_AS(TerrainGrid::from_rasters(fuel, elev, FuelCatalog::defaults()), StructuralError);
}

TEST_CASE("unknown fuel class is rejected at load") {
  const AsciiGrid fuel = grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n1 9\n1 1\n");
  CHECK_THROWS(TerrainGrid::from_rasters(fuel, flat_like(fuel, 0.0), FuelCatalog::defaults()));
}

TEST_CASE("sample at cell centers, shared edges and outside") {
  const AsciiGrid fuel = grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n1 2\n1 2\n");
  const TerrainGrid t = TerrainGrid::from_rasters(fuel, flat_like(fuel, 5.0), FuelCatalog::defaults());
  CHECK(t.sample({15, 15}).fuel == 1);
  CHECK(t.sample({45, 15}).fuel == 2);
  CHECK(t.sample({45, 15}).elevation == 5.0);
  CHECK(t.sample({30, 15}).fuel == 1);  // shared edge goes to the lower column
  CHECK(t.cell_of({30, 15}) == CellIndex{1, 0});  // y = 15 lies in the southern row
  CHECK(t.sample({60, 60}).fuel == 2);  // outer corner is inside the extent
  CHECK_THROWS_AS(t.sample({60.01, 15}), OutOfBounds);
  CHECK_THROWS_AS(t.sample({-0.01, 15}), OutOfBounds);
}

TEST_CASE("shared horizontal edge goes to the lower row index") {
  const AsciiGrid fuel = grid_from("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 30\n3 3\n4 4\n");
  const TerrainGrid t = TerrainGrid::from_rasters(fuel, flat_like(fuel, 0.0), FuelCatalog::defaults());
  CHECK(t.sample({15, 30}).fuel == 3);  // row 0 is the northern row
  CHECK(t.sample({15, 10}).fuel == 4);
}

TEST_CASE("sample is total over the interior and matches brute force") {
  const TerrainGrid t = TerrainGrid::load(fixture("athalassa/fuel.asc"), fixture("athalassa/elevation.asc"),
                                          FuelCatalog::load(fixture("athalassa/fuel_catalog.csv")));
  const AsciiGrid raw = load_ascii_grid(fixture("athalassa/fuel.asc"));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = t.spec().width(), h = t.spec().height(), cs = t.cell_size();
  int mismatches = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Point p{u(rng) * w, u(rng) * h};
    // Brute force: scan every cell for the one whose closed square holds p, lowest (col, row) first.
    int found_row = -1, found_col = -1;
    for (int c = 0; c < raw.ncols && found_col < 0; ++c) {
      if (p.x < c * cs || p.x > (c + 1) * cs) continue;
      for (int r = raw.nrows - 1; r >= 0; --r) {
        const double top = (raw.nrows - r) * cs, bottom = top - cs;
        if (p.y >= bottom && p.y <= top) {
          found_row = r;
          found_col = c;
        }
      }
    }
    REQUIRE(found_col >= 0);
    const double v = raw.at(found_row, found_col);
    const FuelClass expect = raw.is_nodata(v) ? kNonBurnable : static_cast<FuelClass>(v);
    mismatches += t.sample(p).fuel != expect;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("slope on flat ground and on a ramp") {
  const TerrainGrid flat = uniform_terrain({33.0, 35.0}, 10, 30.0, 1);
  for (double dir = 0.0; dir < 2 * kPi; dir += 0.7) CHECK(flat.slope_toward({150, 150}, dir) == 0.0);

  const TerrainGrid ramp = east_ramp();
  CHECK(ramp.slope_toward({150, 150}, kPi / 2) == doctest::Approx(0.1));
  CHECK(ramp.slope_toward({150, 150}, 3 * kPi / 2) == doctest::Approx(-0.1));
  CHECK(ramp.slope_toward({150, 150}, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("slope is antisymmetric on linear ramps") {
  const TerrainGrid ramp = uniform_terrain({33.0, 35.0}, 20, 30.0, 1,
                                           [](Point p) { return 0.07 * p.x - 0.04 * p.y + 12.0; });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(100.0, 500.0), dir(0.0, 2 * kPi);
  const double h = ramp.cell_size();
  for (int i = 0; i < 500; ++i) {
    const Point p{pos(rng), pos(rng)};
    const double th = dir(rng);
    const double forward = ramp.slope_toward(p, th);
    const double back = ramp.slope_toward(p + h * compass_unit(th), th + kPi);
    CHECK(std::abs(forward + back) < 1e-9);
  }
}

TEST_CASE("slope probes leaving the grid read flat") {
  const TerrainGrid ramp = east_ramp();
  CHECK(ramp.slope_toward({295, 150}, kPi / 2) == 0.0);
}

TEST_CASE("fuel catalog parsing and validation") {
  std::istringstream csv(
      "id,name,r0,wind_coeff,slope_coeff,moisture_class\n"
      "0,rock,0,0,0,none\n1,grass,2.0,0.4,2.0,fine\n7,reeds,1.1,0.2,1.0,wet\n");
  const FuelCatalog c = FuelCatalog::parse_csv(csv);
  CHECK(c.at(7).name == "reeds");
  CHECK(c.at(7).params.r0 == 1.1);
  CHECK(c.at(7).moisture_class == "wet");
  CHECK(c.at(kNonBurnable).params.r0 == 0.0);

  std::istringstream negative("id,name,r0,wind_coeff,slope_coeff\n1,bad,-1,0,0\n");
  CHECK_THROWS_AS(FuelCatalog::parse_csv(negative), ConfigError);
  std::istringstream burning_zero("id,name,r0,wind_coeff,slope_coeff\n0,bad,1,0,0\n");
  CHECK_THROWS_AS(FuelCatalog::parse_csv(burning_zero), ConfigError);
  std::istringstream missing("id,name,r0,slope_coeff\n1,x,1,1\n");
  CHECK_THROWS_WITH_AS(FuelCatalog::parse_csv(missing), doctest::Contains("wind_coeff"), ParseError);

  const FuelCatalog d = FuelCatalog::defaults();
  CHECK(d.entries().size() == 5);
  std::stringstream round;
  d.write_csv(round);
  const FuelCatalog back = FuelCatalog::parse_csv(round);
  CHECK(back.at(3).params.slope_coeff == d.at(3).params.slope_coeff);
}

TEST_CASE("humidity damping clamps") {
  CHECK(moisture_damp(0.0) == doctest::Approx(1.0));
  CHECK(moisture_damp(30.0) == doctest::Approx(0.76));
  CHECK(moisture_damp(100.0) == doctest::Approx(0.2));
  CHECK(moisture_damp(50.0) > moisture_damp(60.0));
}

TEST_CASE("scenario config parsing") {
  const ScenarioConfig s = ScenarioConfig::load(fixture("athalassa/scenario.json"));
  CHECK(s.wind.speed == doctest::Approx(6.0 / 3.6).epsilon(1e-6));
  CHECK(s.wind.direction_to == doctest::Approx(3 * kPi / 4));
  CHECK(s.humidity == 30.0);
  CHECK(s.temperature == 30.0);
  CHECK(format_utc(s.ignition_time) == "2023-06-10T14:00:00Z");
  const ScenarioConfig again = ScenarioConfig::from_json(s.to_json());
  CHECK(again.to_json() == s.to_json());

  auto doc = s.to_json();
  doc["humidity"] = 120.0;
  CHECK_THROWS_AS(ScenarioConfig::from_json(doc), ConfigError);
  doc = s.to_json();
  doc["ignition_time"] = "yesterday";
  CHECK_THROWS_AS(ScenarioConfig::from_json(doc), ParseError);
  doc = s.to_json();
  doc["ring_interval"] = 7;
  CHECK_THROWS_AS(ScenarioConfig::from_json(doc), ConfigError);
}

TEST_CASE("wind providers") {
  const ConstantWind constant(WindSample::make(3.0, kPi));
  CHECK(constant.at({0, 0}, 100.0).speed == 3.0);
  const Point v = constant.at({0, 0}, 0.0).vector();
  CHECK(v.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(-3.0));
  CHECK_THROWS_AS(WindSample::make(-1.0, 0.0), ConfigError);

  const FileWind stations = FileWind::from_json(nlohmann::json::parse(R"({"stations": [
      {"lon": 33.0, "lat": 35.0, "speed": 2.0, "direction_to": 90},
      {"lon": 34.0, "lat": 35.0, "speed": 5.0, "direction_to": 180}]})"));
  CHECK(stations.at({33.1, 35.0}, 0.0).speed == 2.0);
  CHECK(stations.at({33.1, 35.0}, 0.0).direction_to == doctest::Approx(kPi / 2));
  CHECK(stations.at({33.9, 35.0}, 0.0).speed == 5.0);
  CHECK_THROWS_AS(FileWind::from_json(nlohmann::json::parse(R"({"stations": []})")), ConfigError);
}
