#include "wildfire/terrain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

#include "wildfire/errors.hpp"

namespace wildfire {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("invalid value '" + text + "' for '" + what + "'");
  }
}

int parse_int(const std::string& text, const std::string& what) {
  const double v = parse_double(text, what);
  if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max()) {
    throw ParseError("expected an integer for '" + what + "', got '" + text + "'");
  }
  return static_cast<int>(v);
}

bool starts_alpha(const std::string& line) {
  return !line.empty() && std::isalpha(static_cast<unsigned char>(line.front()));
}

int cell_coordinate(double v, double cell) {
  if (v <= 0.0) return 0;
  return static_cast<int>(std::ceil(v / cell)) - 1;
}

void check_fuel(const FuelEntry& e, FuelClass id) {
  const auto& p = e.params;
  const std::string tag = "fuel class " + std::to_string(id) + " (" + e.name + ")";
  if (id < 0) throw ConfigError(tag + ": class id must be non-negative");
  if (!(p.r0 >= 0.0)) throw ConfigError(tag + ": r0 must be >= 0");
  if (!(p.wind_coeff >= 0.0)) throw ConfigError(tag + ": wind_coeff must be >= 0");
  if (!(p.slope_coeff >= 0.0)) throw ConfigError(tag + ": slope_coeff must be >= 0");
  if (!(p.moisture_damp > 0.0 && p.moisture_damp <= 1.0)) {
    throw ConfigError(tag + ": moisture_damp must be in (0, 1]");
  }
  if (id == kNonBurnable && p.r0 != 0.0) throw ConfigError(tag + ": non-burnable class needs r0 = 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// FuelCatalog

FuelCatalog::FuelCatalog() { entries_[kNonBurnable] = FuelEntry{"non-burnable", {}, "none"}; }

FuelCatalog FuelCatalog::defaults() {
  FuelCatalog c;
  c.add(1, {"grass", {2.0, 0.40, 2.0, 1.0}, "dead"});
  c.add(2, {"shrub", {1.2, 0.35, 2.0, 1.0}, "live"});
  c.add(3, {"forest", {0.6, 0.30, 2.5, 1.0}, "live"});
  c.add(4, {"agricultural", {1.5, 0.40, 1.5, 1.0}, "dead"});
  return c;
}

void FuelCatalog::add(FuelClass id, FuelEntry entry) {
  check_fuel(entry, id);
  entries_[id] = std::move(entry);
}

const FuelEntry& FuelCatalog::at(FuelClass id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw ConfigError("unknown fuel class " + std::to_string(id));
  return it->second;
}

FuelCatalog FuelCatalog::parse_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    if (!trim(line).empty()) header = split(lower(trim(line)), ',');
  }
  if (header.empty()) throw ParseError("fuel catalog: missing header row");

  auto column = [&](const std::string& name, bool required) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      if (required) throw ParseError("fuel catalog: missing column '" + name + "'");
      return -1;
    }
    return static_cast<int>(it - header.begin());
  };
  const int c_id = column("id", true);
  const int c_name = column("name", true);
  const int c_r0 = column("r0", true);
  const int c_wind = column("wind_coeff", true);
  const int c_slope = column("slope_coeff", true);
  const int c_moisture = column("moisture_class", false);

  FuelCatalog catalog;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() < header.size()) {
      throw ParseError("fuel catalog line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    FuelEntry e;
    e.name = fields[c_name];
    e.params.r0 = parse_double(fields[c_r0], "r0");
    e.params.wind_coeff = parse_double(fields[c_wind], "wind_coeff");
    e.params.slope_coeff = parse_double(fields[c_slope], "slope_coeff");
    if (c_moisture >= 0) e.moisture_class = fields[c_moisture];
    catalog.add(parse_int(fields[c_id], "id"), std::move(e));
  }
  return catalog;
}

FuelCatalog FuelCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fuel catalog " + path.string());
  return parse_csv(in);
}

void FuelCatalog::write_csv(std::ostream& out) const {
  out << "id,name,r0,wind_coeff,slope_coeff,moisture_class\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& [id, e] : entries_) {
    out << id << ',' << e.name << ',' << e.params.r0 << ',' << e.params.wind_coeff << ','
        << e.params.slope_coeff << ',' << e.moisture_class << '\n';
  }
}

double moisture_damp(double humidity_percent) {
  return std::clamp(1.0 - humidity_percent / 100.0 * 0.8, 0.2, 1.0);
}

// ---------------------------------------------------------------------------
// ESRI ASCII grids

AsciiGrid parse_ascii_grid(std::istream& in) {
  AsciiGrid g;
  std::map<std::string, std::string> header;
  std::string line;
  std::vector<std::string> data_lines;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (data_lines.empty() && starts_alpha(t)) {
      std::istringstream ss(t);
      std::string key, value, extra;
      ss >> key >> value;
      key = lower(key);
      if (value.empty() || (ss >> extra)) throw ParseError("malformed header line for '" + key + "'");
      static const char* kKnown[] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                     "nodata_value"};
      if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
        throw ParseError("unknown header key '" + key + "'");
      }
      if (header.contains(key)) throw ParseError("duplicate header key '" + key + "'");
      header[key] = value;
      continue;
    }
    data_lines.push_back(t);
  }

  auto required = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw ParseError(std::string("missing header key '") + key + "'");
    return it->second;
  };
  g.ncols = parse_int(required("ncols"), "ncols");
  g.nrows = parse_int(required("nrows"), "nrows");
  g.xllcorner = parse_double(required("xllcorner"), "xllcorner");
  g.yllcorner = parse_double(required("yllcorner"), "yllcorner");
  g.cellsize = parse_double(required("cellsize"), "cellsize");
  if (g.ncols <= 0) throw ParseError("'ncols' must be positive");
  if (g.nrows <= 0) throw ParseError("'nrows' must be positive");
  if (g.cellsize <= 0.0) throw ParseError("'cellsize' must be positive");
  if (header.contains("nodata_value")) g.nodata = parse_double(header["nodata_value"], "NODATA_value");

  const std::size_t expected = static_cast<std::size_t>(g.ncols) * g.nrows;
  g.values.reserve(expected);
  for (std::size_t r = 0; r < data_lines.size(); ++r) {
    std::istringstream ss(data_lines[r]);
    std::string tok;
    std::size_t count = 0;
    while (ss >> tok) {
      g.values.push_back(parse_double(tok, "cell value"));
      ++count;
    }
    if (data_lines.size() == static_cast<std::size_t>(g.nrows) &&
        count != static_cast<std::size_t>(g.ncols)) {
      throw StructuralError("row " + std::to_string(r) + " has " + std::to_string(count) +
                            " values, header declares ncols " + std::to_string(g.ncols));
    }
  }
  if (g.values.size() != expected) {
    throw StructuralError("grid declares " + std::to_string(g.nrows) + " rows of " +
                          std::to_string(g.ncols) + " but holds " + std::to_string(data_lines.size()) +
                          " rows (" + std::to_string(g.values.size()) + " values)");
  }
  return g;
}

AsciiGrid load_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid " + path.string());
  try {
    return parse_ascii_grid(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const StructuralError& e) {
    throw StructuralError(path.string() + ": " + e.what());
  }
}

void write_ascii_grid(std::ostream& out, const AsciiGrid& g) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "ncols " << g.ncols << "\nnrows " << g.nrows << "\nxllcorner " << g.xllcorner
      << "\nyllcorner " << g.yllcorner << "\ncellsize " << g.cellsize << '\n';
  if (g.nodata) out << "NODATA_value " << *g.nodata << '\n';
  for (int r = 0; r < g.nrows; ++r) {
    for (int c = 0; c < g.ncols; ++c) {
      if (c) out << ' ';
      out << g.at(r, c);
    }
    out << '\n';
  }
}

void save_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid " + path.string());
  write_ascii_grid(out, grid);
}

// ---------------------------------------------------------------------------
// TerrainGrid

TerrainGrid::TerrainGrid(GridSpec spec, std::vector<FuelClass> fuel, std::vector<double> elevation,
                         FuelCatalog catalog)
    : spec_(spec), fuel_(std::move(fuel)), elevation_(std::move(elevation)), catalog_(std::move(catalog)) {
  if (spec_.ncols < 2 || spec_.nrows < 2) throw StructuralError("terrain grid needs at least 2x2 cells");
  if (!(spec_.cell_size > 0.0)) throw StructuralError("terrain cell size must be positive");
  const std::size_t n = static_cast<std::size_t>(spec_.ncols) * spec_.nrows;
  if (fuel_.size() != n || elevation_.size() != n) {
    throw StructuralError("fuel and elevation rasters must both hold ncols*nrows cells");
  }
  for (FuelClass f : fuel_) {
    if (!catalog_.contains(f)) throw ConfigError("fuel class " + std::to_string(f) + " missing from catalog");
  }
}

TerrainGrid TerrainGrid::from_rasters(const AsciiGrid& fuel, const AsciiGrid& elevation,
                                      FuelCatalog catalog) {
  if (fuel.ncols != elevation.ncols || fuel.nrows != elevation.nrows) {
    throw StructuralError("fuel and elevation rasters differ in dimensions");
  }
  constexpr double kGeoTol = 1e-9;
  if (std::abs(fuel.xllcorner - elevation.xllcorner) > kGeoTol ||
      std::abs(fuel.yllcorner - elevation.yllcorner) > kGeoTol ||
      std::abs(fuel.cellsize - elevation.cellsize) > kGeoTol) {
    throw StructuralError("fuel and elevation rasters differ in georeference");
  }
  GridSpec spec{fuel.ncols, fuel.nrows, fuel.cellsize, {fuel.xllcorner, fuel.yllcorner}};

  std::vector<FuelClass> classes(fuel.values.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const double v = fuel.values[i];
    if (fuel.is_nodata(v)) {
      classes[i] = kNonBurnable;
      continue;
    }
    if (v < 0.0 || v != std::floor(v)) {
      throw ParseError("fuel raster holds non-class value " + std::to_string(v));
    }
    classes[i] = static_cast<FuelClass>(v);
  }

  // Multi-source BFS from valid elevation cells fills NODATA holes.
  std::vector<double> elev = elevation.values;
  std::vector<char> known(elev.size(), 0);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < elev.size(); ++i) {
    if (!elevation.is_nodata(elev[i])) {
      known[i] = 1;
      frontier.push_back(i);
    }
  }
  if (frontier.empty()) throw StructuralError("elevation raster has no valid cells");
  const int nc = elevation.ncols;
  const int nr = elevation.nrows;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const int r = static_cast<int>(i / nc);
    const int c = static_cast<int>(i % nc);
    const int dr[] = {-1, 0, 0, 1};
    const int dc[] = {0, -1, 1, 0};
    for (int k = 0; k < 4; ++k) {
      const int rr = r + dr[k];
      const int cc = c + dc[k];
      if (rr < 0 || rr >= nr || cc < 0 || cc >= nc) continue;
      const std::size_t j = static_cast<std::size_t>(rr) * nc + cc;
      if (known[j]) continue;
      known[j] = 1;
      elev[j] = elev[i];
      frontier.push_back(j);
    }
  }
  return TerrainGrid(spec, std::move(classes), std::move(elev), std::move(catalog));
}

TerrainGrid TerrainGrid::load(const std::filesystem::path& fuel, const std::filesystem::path& elevation,
                              FuelCatalog catalog) {
  return from_rasters(load_ascii_grid(fuel), load_ascii_grid(elevation), std::move(catalog));
}

bool TerrainGrid::in_extent(Point p) const {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= spec_.width() && p.y <= spec_.height();
}

CellIndex TerrainGrid::cell_of(Point p) const {
  if (!in_extent(p)) {
    throw OutOfBounds("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") outside terrain extent");
  }
  const int col = std::min(cell_coordinate(p.x, spec_.cell_size), spec_.ncols - 1);
  const int row = std::min(cell_coordinate(spec_.height() - p.y, spec_.cell_size), spec_.nrows - 1);
  return {row, col};
}

Point TerrainGrid::cell_center(CellIndex c) const {
  return {(c.col + 0.5) * spec_.cell_size, spec_.height() - (c.row + 0.5) * spec_.cell_size};
}

CellSample TerrainGrid::sample(Point p) const {
  const CellIndex c = cell_of(p);
  const FuelClass f = fuel_at(c);
  return {f, catalog_.at(f).params, elevation_at(c)};
}

double TerrainGrid::interpolated_elevation(Point p) const {
  const double cs = spec_.cell_size;
  // Continuous column/row coordinates measured between cell centers.
  const double u = std::clamp(p.x / cs - 0.5, 0.0, spec_.ncols - 1.0);
  const double v = std::clamp((spec_.height() - p.y) / cs - 0.5, 0.0, spec_.nrows - 1.0);
  const int c0 = std::min(static_cast<int>(u), spec_.ncols - 2);
  const int r0 = std::min(static_cast<int>(v), spec_.nrows - 2);
  const double fu = u - c0;
  const double fv = v - r0;
  const double e00 = elevation_at({r0, c0});
  const double e01 = elevation_at({r0, c0 + 1});
  const double e10 = elevation_at({r0 + 1, c0});
  const double e11 = elevation_at({r0 + 1, c0 + 1});
  return (1 - fv) * ((1 - fu) * e00 + fu * e01) + fv * ((1 - fu) * e10 + fu * e11);
}

double TerrainGrid::slope_toward(Point p, double direction) const {
  const double h = spec_.cell_size;
  const Point probe = p + h * compass_unit(direction);
  if (!in_extent(p) || !in_extent(probe)) {
    spdlog::debug("slope probe leaves terrain at ({:.1f}, {:.1f}); treating as flat", probe.x, probe.y);
    return 0.0;
  }
  return (interpolated_elevation(probe) - interpolated_elevation(p)) / h;
}

AsciiGrid TerrainGrid::fuel_raster() const {
  AsciiGrid g{spec_.ncols, spec_.nrows, spec_.origin.lon, spec_.origin.lat, spec_.cell_size, -9999.0, {}};
  g.values.assign(fuel_.begin(), fuel_.end());
  return g;
}

AsciiGrid TerrainGrid::elevation_raster() const {
  AsciiGrid g{spec_.ncols, spec_.nrows, spec_.origin.lon, spec_.origin.lat, spec_.cell_size, -9999.0, {}};
  g.values = elevation_;
  return g;
}

}  // namespace wildfire
