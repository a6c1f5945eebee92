#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/netcdf.hpp"
#include "rdcat/timeutil.hpp"

namespace rdcat {

struct TimeSeries {
  std::vector<Instant> times;  // strictly increasing
  std::vector<double> values;  // NaN at gap indices
  std::vector<std::size_t> gaps;

  bool is_gap(std::size_t i) const;
};

// "<unit> since <epoch>" with unit in seconds/minutes/hours/days (singular
// and abbreviated spellings accepted).
struct TimeUnits {
  double seconds_per_unit = 1.0;
  Instant epoch;
  Instant to_instant(double value) const;
};
std::optional<TimeUnits> parse_time_units(std::string_view units);

struct AsciiOptions {
  // Empty selects every record variable, or every variable when the file has
  // no record dimension.
  std::vector<std::string> variables;
  char delimiter = ',';
};

// Plain-text rendering:
//   # <global attribute>: <value>        (file order)
//   # variable <name> units=<units>      (one per selected variable)
//   <col>,<col>,...                       (one row per record)
// Variables with "X since epoch" units render as ISO 8601; fill values
// render as empty fields; floats use the shortest round-trip form. A
// variable with extra dimensions flattens to columns name[i] (or
// name[i][j]...) in row-major order. Throws Error(MixedDimensions) when the
// selected variables do not share their leading dimension.
std::string to_ascii(const SelfDescribingDataset& dataset, const AsciiOptions& options = {});

// Column headers to_ascii would use for the selection.
std::vector<std::string> ascii_columns(const SelfDescribingDataset& dataset, const AsciiOptions& options = {});

// Series of a 1-D record variable against the record-dimension coordinate.
// Throws Error with NoSuchVariable, NoTimeCoordinate, NonScalarVariable, or
// InvalidArgument when times are not strictly increasing.
TimeSeries extract_timeseries(const SelfDescribingDataset& dataset, std::string_view variable);

// True when value i of `var` equals its _FillValue attribute.
bool is_fill_value(const NcVariable& var, std::size_t i);

}  // namespace rdcat
