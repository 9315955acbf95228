#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"
#include "wildfire/geojson.hpp"
#include "wildfire/service.hpp"

using namespace wildfire;
using namespace wildfire::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string start_arg() {
  std::ifstream in(fixture("athalassa/start.txt"));
  std::string s;
  in >> s;
  return s;
}

std::vector<std::string> athalassa_args(const std::string& command, const fs::path& out_dir) {
  std::vector<std::string> a{command,
                             fixture("athalassa/scenario.json").string(),
                             "--terrain",
                             fixture("athalassa/fuel.asc").string(),
                             "--elevation",
                             fixture("athalassa/elevation.asc").string(),
                             "--catalog",
                             fixture("athalassa/fuel_catalog.csv").string(),
                             "--graph",
                             fixture("athalassa/roads.geojson").string()};
  if (command == "run") {
    a.push_back("--out");
    a.push_back(out_dir.string());
  }
  return a;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wildfire_cli_" + name);
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

// Key names and value kinds, arrays collapsed to their first element.
json shape(const json& v) {
  if (v.is_object()) {
    json out = json::object();
    for (auto it = v.begin(); it != v.end(); ++it) out[it.key()] = shape(it.value());
    return out;
  }
  if (v.is_array()) return v.empty() ? json::array() : json::array({shape(v.front())});
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_boolean()) return "boolean";
  return "null";
}

}  // namespace

TEST_CASE("run on the pilot fixture walks 800 m in 640 s") {
  const fs::path out = scratch("walk");
  auto args = athalassa_args("run", out);
  args.insert(args.end(), {"--start", start_arg(), "--mode", "walking"});
  const Run r = invoke(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("800.0 m, 640.0 s (walking)") != std::string::npos);
  const json report = read_json(out / "report.json");
  CHECK(report["routes"][0]["time_to_safety_s"].get<double>() == doctest::Approx(640.0).epsilon(1e-6));
  CHECK(report["routes"][0]["distance_m"].get<double>() == doctest::Approx(800.0).epsilon(1e-6));
  REQUIRE(report["rings"].size() == 5);
  const json rings = read_json(out / "rings.geojson");
  for (int k = 0; k < 5; ++k) {
    CHECK(report["rings"][k]["hectares"].get<double>() ==
          doctest::Approx(rings["features"][0]["properties"]["ring_hectares"][k].get<double>()));
  }
  CHECK(geojson::validate(rings).empty());
  CHECK(geojson::validate(read_json(out / "route.geojson")).empty());
  for (const auto& c : report["checks"]) CHECK(c["passed"] == true);
}

TEST_CASE("driving the same corridor takes about 58 s") {
  const fs::path out = scratch("drive");
  auto args = athalassa_args("run", out);
  args.insert(args.end(), {"--start", start_arg(), "--mode", "driving"});
  REQUIRE(invoke(args).code == 0);
  const double t = read_json(out / "report.json")["routes"][0]["time_to_safety_s"];
  CHECK(t == doctest::Approx(800.0 / (50'000.0 / 3600.0)));
  CHECK(std::round(t) == 58.0);
}

TEST_CASE("report.json keeps its schema") {
  const fs::path out = scratch("golden");
  auto args = athalassa_args("run", out);
  args.insert(args.end(), {"--start", start_arg()});
  REQUIRE(invoke(args).code == 0);
  const json golden = read_json(fs::path(WILDFIRE_GOLDEN) / "report_shape.json");
  CHECK(shape(read_json(out / "report.json")) == golden);
}

TEST_CASE("ring hectares equal polygon area over 10,000") {
  const fs::path out = scratch("hectares");
  REQUIRE(invoke(athalassa_args("run", out)).code == 0);
  const json rings = read_json(out / "rings.geojson");
  const auto& f = rings["features"][0];
  const GeoPoint anchor{f["properties"]["ignition"][0], f["properties"]["ignition"][1]};
  const IsochroneSet set = geojson::rings_from_geometry(f["geometry"], {0, 15, 30, 45, 60}, anchor);
  for (int k = 0; k < 5; ++k) {
    CHECK(f["properties"]["ring_hectares"][k].get<double>() ==
          doctest::Approx(signed_area(set.rings[static_cast<std::size_t>(k)].polygon) / 10'000.0).epsilon(1e-6));
  }
}

TEST_CASE("CLI rings match the service rings byte for byte") {
  const fs::path out = scratch("service");
  REQUIRE(invoke(athalassa_args("run", out)).code == 0);
  ServiceConfig c;
  c.terrain_fuel = fixture("athalassa/fuel.asc").string();
  c.terrain_elev = fixture("athalassa/elevation.asc").string();
  c.fuel_catalog = fixture("athalassa/fuel_catalog.csv").string();
  auto svc = FireService::from_config(c);
  const std::string id = svc->create_fire(read_json(fixture("athalassa/scenario.json")).dump()).body["id"];
  REQUIRE(svc->ignite(id).status == 200);
  const json cli_geometry = read_json(out / "rings.geojson")["features"][0]["geometry"];
  CHECK(svc->list_fires().body["features"][0]["geometry"].dump() == cli_geometry.dump());
}

TEST_CASE("loader failures exit 1") {
  const fs::path out = scratch("fail");
  auto args = athalassa_args("run", out);
  args[3] = (fs::temp_directory_path() / "does_not_exist.asc").string();
  const Run missing = invoke(args);
  CHECK(missing.code == 1);
  CHECK(missing.err.find("terrain") != std::string::npos);

  CHECK(invoke({"run", fixture("athalassa/scenario.json").string()}).code == 1);
  CHECK(invoke({"run", "nope.json", "--terrain", fixture("athalassa/fuel.asc").string()}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  auto bad_start = athalassa_args("run", out);
  bad_start.insert(bad_start.end(), {"--start", "33.4"});
  CHECK(invoke(bad_start).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("no safe route exits 2") {
  const fs::path out = scratch("unsafe");
  const GeoPoint inside = LocalFrame(kAthalassa).to_geo({-10.0 / std::sqrt(2.0), 10.0 / std::sqrt(2.0)});
  std::ostringstream start;
  start.precision(12);
  start << inside.lon << "," << inside.lat;
  auto args = athalassa_args("run", out);
  args.insert(args.end(), {"--start", start.str()});
  const Run r = invoke(args);
  CHECK(r.code == 2);
  const json report = read_json(out / "report.json");
  CHECK(report["routes"][0]["status"] == "no_safe_route");
}

TEST_CASE("check passes on the homogeneous fixture") {
  const Run r = invoke({"check", fixture("homogeneous/scenario.json").string(), "--terrain",
                        fixture("homogeneous/fuel.asc").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS isotropy") != std::string::npos);
  CHECK(r.out.find("PASS alpha_limit_min_time") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("check verifies routes on the pilot fixture") {
  auto args = athalassa_args("check", {});
  args.insert(args.end(), {"--start", start_arg()});
  const Run r = invoke(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS conflict_soundness") != std::string::npos);
}

TEST_CASE("check flags a corrupted rings file") {
  const fs::path out = scratch("corrupt");
  REQUIRE(invoke(athalassa_args("run", out)).code == 0);
  json rings = read_json(out / "rings.geojson");
  auto& f = rings["features"][0];
  // Geometry is outermost first: index 1 is ring 45, index 2 is ring 30.
  const double lon0 = f["properties"]["ignition"][0], lat0 = f["properties"]["ignition"][1];
  for (auto& pos : f["geometry"]["coordinates"][2][0]) {
    pos[0] = lon0 + 3.0 * (pos[0].get<double>() - lon0);
    pos[1] = lat0 + 3.0 * (pos[1].get<double>() - lat0);
  }
  std::ofstream(out / "bad.geojson") << rings.dump();
  const Run r = invoke({"check", fixture("athalassa/scenario.json").string(), "--rings", (out / "bad.geojson").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL ring_nesting: ring 30 leaves ring 45") != std::string::npos);

  const Run good = invoke({"check", fixture("athalassa/scenario.json").string(), "--rings", (out / "rings.geojson").string()});
  CHECK(good.code == 0);
}
