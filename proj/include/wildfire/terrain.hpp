#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wildfire/geometry.hpp"
#include "wildfire/projection.hpp"

namespace wildfire {

using FuelClass = int;
inline constexpr FuelClass kNonBurnable = 0;

struct FuelParams {
  double r0 = 0.0;           // m/min at zero wind and slope
  double wind_coeff = 0.0;   // per m/s of effective wind
  double slope_coeff = 0.0;  // per unit tan(slope)
  double moisture_damp = 1.0;
};

struct FuelEntry {
  std::string name;
  FuelParams params;
  std::string moisture_class;
};

class FuelCatalog {
 public:
  FuelCatalog();

  /// Grass, shrub, forest, agricultural and the reserved non-burnable class.
  static FuelCatalog defaults();
  static FuelCatalog parse_csv(std::istream& in);
  static FuelCatalog load(const std::filesystem::path& path);
  void write_csv(std::ostream& out) const;

  /// Throws ConfigError on negative rates or coefficients, or a burnable class 0.
  void add(FuelClass id, FuelEntry entry);

  bool contains(FuelClass id) const { return entries_.contains(id); }
  const FuelEntry& at(FuelClass id) const;
  const std::map<FuelClass, FuelEntry>& entries() const { return entries_; }

 private:
  std::map<FuelClass, FuelEntry> entries_;
};

/// Maps relative humidity (percent) onto the spread damping multiplier.
double moisture_damp(double humidity_percent);

/// Raw ESRI ASCII grid. Values are row-major with the northern row first.
struct AsciiGrid {
  int ncols = 0;
  int nrows = 0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 0.0;
  std::optional<double> nodata;
  std::vector<double> values;

  bool is_nodata(double v) const { return nodata && v == *nodata; }
  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * ncols + col]; }
};

AsciiGrid parse_ascii_grid(std::istream& in);
AsciiGrid load_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(std::ostream& out, const AsciiGrid& grid);
void save_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid);

/// Placement of a square-celled raster. `origin` is the lower-left corner in
/// degrees; `cell_size` is in meters.
struct GridSpec {
  int ncols = 0;
  int nrows = 0;
  double cell_size = 0.0;
  GeoPoint origin{};

  double width() const { return ncols * cell_size; }
  double height() const { return nrows * cell_size; }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CellIndex {
  int row = 0;  // 0 is the northern row
  int col = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct CellSample {
  FuelClass fuel = kNonBurnable;
  FuelParams params;
  double elevation = 0.0;
};

/// Co-registered fuel and elevation rasters plus the catalog that prices them.
/// Points passed to the query methods are in the grid frame: meters east and
/// north of the lower-left corner.
class TerrainGrid {
 public:
  TerrainGrid(GridSpec spec, std::vector<FuelClass> fuel, std::vector<double> elevation,
              FuelCatalog catalog);

  /// Fuel NODATA becomes non-burnable; elevation NODATA takes the value of the
  /// nearest valid cell.
  static TerrainGrid from_rasters(const AsciiGrid& fuel, const AsciiGrid& elevation,
                                  FuelCatalog catalog);
  static TerrainGrid load(const std::filesystem::path& fuel, const std::filesystem::path& elevation,
                          FuelCatalog catalog);

  const GridSpec& spec() const { return spec_; }
  const FuelCatalog& catalog() const { return catalog_; }
  double cell_size() const { return spec_.cell_size; }

  bool in_extent(Point p) const;
  /// Boundary points go to the lower column, then the lower row. Throws OutOfBounds.
  CellIndex cell_of(Point p) const;
  Point cell_center(CellIndex c) const;

  FuelClass fuel_at(CellIndex c) const { return fuel_[index(c)]; }
  double elevation_at(CellIndex c) const { return elevation_[index(c)]; }

  CellSample sample(Point p) const;
  /// Bilinear between cell centers, clamped at the outer half-cell.
  double interpolated_elevation(Point p) const;
  /// Rise over one cell size along `direction` (compass radians). Probes that
  /// leave the extent read as flat.
  double slope_toward(Point p, double direction) const;

  AsciiGrid fuel_raster() const;
  AsciiGrid elevation_raster() const;

 private:
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * spec_.ncols + c.col;
  }

  GridSpec spec_;
  std::vector<FuelClass> fuel_;
  std::vector<double> elevation_;
  FuelCatalog catalog_;
};

}  // namespace wildfire
