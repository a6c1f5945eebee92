#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rdcat {

enum class NcType : std::uint32_t { Byte = 1, Char = 2, Short = 3, Int = 4, Float = 5, Double = 6 };

std::string_view to_string(NcType t);
std::size_t type_size(NcType t);

// Values of one attribute or variable. NC_CHAR data is kept as raw bytes.
using NcValues = std::variant<std::string, std::vector<std::int8_t>, std::vector<std::int16_t>,
                              std::vector<std::int32_t>, std::vector<float>, std::vector<double>>;

std::size_t value_count(const NcValues& values);
// Element i as double (NC_CHAR yields the byte value).
double value_as_double(const NcValues& values, std::size_t i);

struct NcAttribute {
  std::string name;
  NcType type = NcType::Char;
  NcValues values;

  // Text of a char attribute, trailing NULs stripped; empty for numeric ones.
  std::string text() const;
  friend bool operator==(const NcAttribute&, const NcAttribute&) = default;
};

struct NcDimension {
  std::string name;
  std::size_t length = 0;  // current record count for the record dimension
  bool is_record = false;
  friend bool operator==(const NcDimension&, const NcDimension&) = default;
};

struct NcVariable {
  std::string name;
  std::vector<std::size_t> dimension_ids;
  NcType type = NcType::Double;
  std::vector<NcAttribute> attributes;
  NcValues data;

  const NcAttribute* attribute(std::string_view attr_name) const;
  friend bool operator==(const NcVariable&, const NcVariable&) = default;
};

// In-memory form of a NetCDF classic (CDF-1) or 64-bit offset (CDF-2) file.
struct SelfDescribingDataset {
  int format_version = 1;
  std::vector<NcDimension> dimensions;
  std::vector<NcAttribute> global_attributes;
  std::vector<NcVariable> variables;

  const NcVariable* variable(std::string_view name) const;
  const NcAttribute* global_attribute(std::string_view name) const;
  std::optional<std::size_t> record_dimension() const;
  bool is_record_variable(const NcVariable& v) const;
  std::vector<std::size_t> shape(const NcVariable& v) const;
  std::size_t record_count() const;
};

// Decodes a complete NetCDF classic file. Throws Error with
// UnsupportedFormat (wrong magic, CDF-5, NASA CDF, HDF5), TruncatedFile or
// MalformedHeader. Never reads outside `bytes`.
SelfDescribingDataset read_netcdf_classic(std::span<const std::byte> bytes);
SelfDescribingDataset read_netcdf_classic(std::string_view bytes);

// Format adapters are keyed by magic bytes so other self-describing formats
// can be plugged in next to NetCDF classic.
class FormatAdapter {
 public:
  virtual ~FormatAdapter() = default;
  virtual std::string_view name() const = 0;
  virtual bool accepts(std::span<const std::byte> head) const = 0;
  virtual SelfDescribingDataset read(std::span<const std::byte> bytes) const = 0;
};

class FormatRegistry {
 public:
  // Registry pre-populated with the NetCDF classic adapter.
  static FormatRegistry with_defaults();

  void add(std::unique_ptr<FormatAdapter> adapter);
  // Throws Error(UnsupportedFormat) when no adapter accepts the bytes.
  SelfDescribingDataset read(std::span<const std::byte> bytes) const;

 private:
  std::vector<std::shared_ptr<const FormatAdapter>> adapters_;
};

std::span<const std::byte> as_bytes_view(std::string_view s);

}  // namespace rdcat
