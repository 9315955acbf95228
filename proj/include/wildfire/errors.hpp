#pragma once

#include <stdexcept>
#include <string>

namespace wildfire {

// Malformed input text (ASCII grid header, CSV row, JSON field).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input whose shape disagrees with itself (row counts, raster sizes).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Invalid parameter values: negative spread rates, bad horizons, unknown modes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IgnitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wildfire
