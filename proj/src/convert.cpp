#include "rdcat/convert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdcat/error.hpp"
#include "rdcat/text.hpp"

namespace rdcat {

namespace {

struct ColumnPlan {
  const NcVariable* var = nullptr;
  std::size_t cells_per_row = 1;  // values (or strings) per row
  std::size_t string_length = 0;  // >0 for char variables rendered as strings
  std::optional<TimeUnits> time_units;
  std::vector<std::string> names;
};

std::string attribute_value_text(const NcAttribute& attr) {
  if (attr.type == NcType::Char) return attr.text();
  std::string out;
  std::size_t n = value_count(attr.values);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    std::visit(
        [&](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, std::vector<float>>)
            out += format_float(v[i]);
          else if constexpr (std::is_same_v<V, std::vector<double>>)
            out += format_double(v[i]);
          else if constexpr (!std::is_same_v<V, std::string>)
            out += std::to_string(static_cast<long long>(v[i]));
        },
        attr.values);
  }
  return out;
}

std::string header_safe(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') out += "\\n";
    else if (c == '\r') out += "\\r";
    else out += c;
  }
  return out;
}

std::string quote_if_needed(std::string s, char delimiter) {
  if (s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::optional<TimeUnits> units_of(const NcVariable& var) {
  const auto* units = var.attribute("units");
  if (!units || units->type != NcType::Char) return std::nullopt;
  return parse_time_units(units->text());
}

std::vector<const NcVariable*> select_variables(const SelfDescribingDataset& ds, const AsciiOptions& options) {
  std::vector<const NcVariable*> out;
  if (!options.variables.empty()) {
    for (const auto& name : options.variables) {
      const auto* v = ds.variable(name);
      if (!v) throw Error(Errc::NoSuchVariable, "no variable named '" + name + "'");
      out.push_back(v);
    }
    return out;
  }
  bool has_record = std::any_of(ds.variables.begin(), ds.variables.end(),
                                [&](const NcVariable& v) { return ds.is_record_variable(v); });
  for (const auto& v : ds.variables)
    if (!has_record || ds.is_record_variable(v)) out.push_back(&v);
  return out;
}

void index_suffixes(const std::vector<std::size_t>& dims, std::size_t depth, std::string prefix,
                    std::vector<std::string>& out) {
  if (depth == dims.size()) {
    out.push_back(std::move(prefix));
    return;
  }
  for (std::size_t i = 0; i < dims[depth]; ++i)
    index_suffixes(dims, depth + 1, prefix + "[" + std::to_string(i) + "]", out);
}

struct Plan {
  std::vector<ColumnPlan> columns;
  std::size_t rows = 0;
};

Plan make_plan(const SelfDescribingDataset& ds, const AsciiOptions& options) {
  Plan plan;
  auto vars = select_variables(ds, options);
  if (vars.empty()) return plan;

  bool all_scalar = std::all_of(vars.begin(), vars.end(), [](const NcVariable* v) { return v->dimension_ids.empty(); });
  if (all_scalar) {
    plan.rows = 1;
  } else {
    std::size_t lead = vars.front()->dimension_ids.empty() ? std::numeric_limits<std::size_t>::max()
                                                           : vars.front()->dimension_ids.front();
    for (const auto* v : vars)
      if (v->dimension_ids.empty() || v->dimension_ids.front() != lead)
        throw Error(Errc::MixedDimensions, "variable '" + v->name + "' does not share the leading dimension");
    plan.rows = ds.dimensions.at(lead).length;
  }

  for (const auto* v : vars) {
    ColumnPlan col;
    col.var = v;
    auto shape = ds.shape(*v);
    std::vector<std::size_t> inner(shape.begin() + (shape.empty() ? 0 : 1), shape.end());
    if (v->type == NcType::Char && !inner.empty()) {
      col.string_length = inner.back();
      inner.pop_back();
    }
    col.cells_per_row = 1;
    for (auto d : inner) col.cells_per_row *= d;
    if (inner.empty())
      col.names.push_back(v->name);
    else
      index_suffixes(inner, 0, v->name, col.names);
    col.time_units = units_of(*v);
    plan.columns.push_back(std::move(col));
  }
  return plan;
}

std::string render_cell(const ColumnPlan& col, std::size_t index, char delimiter) {
  const auto& var = *col.var;
  if (col.string_length > 0) {
    const auto& chars = std::get<std::string>(var.data);
    std::string s = chars.substr(index * col.string_length, col.string_length);
    s.erase(std::find(s.begin(), s.end(), '\0'), s.end());
    return quote_if_needed(std::move(s), delimiter);
  }
  if (is_fill_value(var, index)) return {};
  if (col.time_units) {
    double v = value_as_double(var.data, index);
    if (std::isfinite(v) && std::abs(v * col.time_units->seconds_per_unit) < 1e14)
      return format_instant(col.time_units->to_instant(v));
  }
  return std::visit(
      [&](const auto& data) -> std::string {
        using V = std::decay_t<decltype(data)>;
        if constexpr (std::is_same_v<V, std::string>)
          return quote_if_needed(std::string(1, data[index]), delimiter);
        else if constexpr (std::is_same_v<V, std::vector<float>>)
          return format_float(data[index]);
        else if constexpr (std::is_same_v<V, std::vector<double>>)
          return format_double(data[index]);
        else
          return std::to_string(static_cast<long long>(data[index]));
      },
      var.data);
}

double unit_seconds(std::string_view unit) {
  std::string u = to_lower_ascii(unit);
  if (u == "seconds" || u == "second" || u == "secs" || u == "sec" || u == "s") return 1.0;
  if (u == "minutes" || u == "minute" || u == "mins" || u == "min") return 60.0;
  if (u == "hours" || u == "hour" || u == "hrs" || u == "hr" || u == "h") return 3600.0;
  if (u == "days" || u == "day" || u == "d") return 86400.0;
  if (u == "milliseconds" || u == "millisecond" || u == "ms") return 1e-3;
  return 0.0;
}

}  // namespace

bool TimeSeries::is_gap(std::size_t i) const { return std::binary_search(gaps.begin(), gaps.end(), i); }

Instant TimeUnits::to_instant(double value) const {
  auto us = std::llround(value * seconds_per_unit * 1e6);
  return epoch + std::chrono::microseconds{us};
}

std::optional<TimeUnits> parse_time_units(std::string_view units) {
  auto words = split_whitespace(units);
  if (words.size() < 3 || to_lower_ascii(words[1]) != "since") return std::nullopt;
  TimeUnits out;
  out.seconds_per_unit = unit_seconds(words[0]);
  if (out.seconds_per_unit == 0.0) return std::nullopt;

  // Epoch is everything after "since": "2019-01-01", "2019-01-01 00:00:00",
  // "2019-01-01T00:00:00Z", "1970-1-1 0:0:0 UTC" is normalised by padding.
  std::string date = words[2];
  std::string time = words.size() > 3 ? words[3] : "";
  std::string zone = words.size() > 4 ? words[4] : "";
  if (time == "UTC" || time == "Z") {
    zone = time;
    time.clear();
  }
  auto pad_fields = [](const std::string& s, char sep) {
    auto parts = split(s, sep);
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += sep;
      if (parts[i].size() == 1) out += '0';
      out += parts[i];
    }
    return out;
  };
  if (date.find('T') == std::string::npos) {
    date = pad_fields(date, '-');
    if (!time.empty()) {
      std::string frac;
      if (auto dot = time.find('.'); dot != std::string::npos) {
        frac = time.substr(dot);
        time = time.substr(0, dot);
      }
      date += "T" + pad_fields(time, ':') + (frac.find_first_not_of(".0") == std::string::npos ? "" : frac);
    }
  }
  if (!zone.empty() && zone != "UTC" && zone != "Z") {
    if (zone.size() == 5 && (zone[0] == '+' || zone[0] == '-')) zone.insert(3, ":");
    date += zone;
  }
  try {
    out.epoch = parse_instant(date);
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

bool is_fill_value(const NcVariable& var, std::size_t i) {
  const auto* fill = var.attribute("_FillValue");
  if (!fill || value_count(fill->values) == 0 || var.type == NcType::Char) return false;
  double f = value_as_double(fill->values, 0);
  double v = value_as_double(var.data, i);
  if (std::isnan(f)) return std::isnan(v);
  // Compare in the variable's own type so float fills match exactly.
  if (var.type == NcType::Float) return static_cast<float>(v) == static_cast<float>(f);
  return v == f;
}

std::vector<std::string> ascii_columns(const SelfDescribingDataset& dataset, const AsciiOptions& options) {
  std::vector<std::string> out;
  for (const auto& col : make_plan(dataset, options).columns) out.insert(out.end(), col.names.begin(), col.names.end());
  return out;
}

std::string to_ascii(const SelfDescribingDataset& dataset, const AsciiOptions& options) {
  Plan plan = make_plan(dataset, options);
  const char delim = options.delimiter;

  std::string out;
  for (const auto& attr : dataset.global_attributes)
    out += "# " + header_safe(attr.name) + ": " + header_safe(attribute_value_text(attr)) + "\n";
  for (const auto& col : plan.columns) {
    out += "# variable " + col.var->name;
    if (const auto* units = col.var->attribute("units"))
      out += " units=" + header_safe(attribute_value_text(*units));
    out += "\n";
  }
  if (plan.columns.empty()) return out;

  out += "# columns: ";
  bool first = true;
  for (const auto& col : plan.columns)
    for (const auto& name : col.names) {
      if (!first) out += delim;
      out += name;
      first = false;
    }
  out += "\n";

  for (std::size_t row = 0; row < plan.rows; ++row) {
    first = true;
    for (const auto& col : plan.columns) {
      for (std::size_t c = 0; c < col.cells_per_row; ++c) {
        if (!first) out += delim;
        out += render_cell(col, row * col.cells_per_row + c, delim);
        first = false;
      }
    }
    out += "\n";
  }
  return out;
}

TimeSeries extract_timeseries(const SelfDescribingDataset& dataset, std::string_view variable) {
  const auto* var = dataset.variable(variable);
  if (!var) throw Error(Errc::NoSuchVariable, "no variable named '" + std::string(variable) + "'");
  auto rec = dataset.record_dimension();
  if (!rec) throw Error(Errc::NoTimeCoordinate, "dataset has no record dimension");
  const auto* coord = dataset.variable(dataset.dimensions[*rec].name);
  if (!coord || coord->dimension_ids != std::vector<std::size_t>{*rec})
    throw Error(Errc::NoTimeCoordinate, "record dimension has no coordinate variable");
  auto units = units_of(*coord);
  if (!units) throw Error(Errc::NoTimeCoordinate, "time coordinate units lack the 'X since epoch' form");
  if (var->dimension_ids != std::vector<std::size_t>{*rec} || var->type == NcType::Char)
    throw Error(Errc::NonScalarVariable, "variable '" + var->name + "' is not a 1-D numeric record variable");

  TimeSeries series;
  std::size_t n = dataset.record_count();
  series.times.reserve(n);
  series.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_fill_value(*coord, i) || !std::isfinite(value_as_double(coord->data, i)))
      throw Error(Errc::InvalidArgument, "time coordinate has a missing value at record " + std::to_string(i));
    Instant t = units->to_instant(value_as_double(coord->data, i));
    if (!series.times.empty() && t <= series.times.back())
      throw Error(Errc::InvalidArgument, "time coordinate is not strictly increasing at record " + std::to_string(i));
    series.times.push_back(t);
    if (is_fill_value(*var, i) || std::isnan(value_as_double(var->data, i))) {
      series.values.push_back(std::numeric_limits<double>::quiet_NaN());
      series.gaps.push_back(i);
    } else {
      series.values.push_back(value_as_double(var->data, i));
    }
  }
  return series;
}

}  // namespace rdcat
