#include "rdcat/netcdf.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <set>

#include "rdcat/error.hpp"

namespace rdcat {

namespace {

constexpr std::uint32_t kTagDimension = 0x0A;
constexpr std::uint32_t kTagVariable = 0x0B;
constexpr std::uint32_t kTagAttribute = 0x0C;
constexpr std::uint32_t kStreaming = 0xFFFFFFFFu;

std::size_t checked_mul(std::size_t a, std::size_t b) {
  std::size_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw Error(Errc::MalformedHeader, "size overflow");
  return out;
}

std::size_t checked_add(std::size_t a, std::size_t b) {
  std::size_t out;
  if (__builtin_add_overflow(a, b, &out)) throw Error(Errc::MalformedHeader, "offset overflow");
  return out;
}

std::size_t pad4(std::size_t n) { return checked_add(n, 3) & ~std::size_t{3}; }

bool valid_type(std::uint32_t t) { return t >= 1 && t <= 6; }

// Big-endian cursor over the file; every read is bounds-checked.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n) const {
    if (n > remaining()) throw Error(Errc::TruncatedFile, "unexpected end of file in header");
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | std::to_integer<std::uint32_t>(bytes_[pos_++]);
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t hi = u32();
    return (hi << 32) | u32();
  }

  std::span<const std::byte> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void skip_padding(std::size_t consumed) {
    std::size_t pad = pad4(consumed) - consumed;
    need(pad);
    pos_ += pad;
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
T decode_be(const std::byte* p) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                               std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  U raw = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) raw = static_cast<U>((raw << 8) | std::to_integer<U>(p[i]));
  return std::bit_cast<T>(raw);
}

NcValues make_values(NcType type, std::size_t count) {
  switch (type) {
    case NcType::Char: return std::string(count, '\0');
    case NcType::Byte: return std::vector<std::int8_t>(count);
    case NcType::Short: return std::vector<std::int16_t>(count);
    case NcType::Int: return std::vector<std::int32_t>(count);
    case NcType::Float: return std::vector<float>(count);
    case NcType::Double: return std::vector<double>(count);
  }
  throw Error(Errc::MalformedHeader, "unknown type");
}

// Decodes `count` big-endian values from `src` into `dst` starting at `at`.
void decode_into(NcValues& dst, std::size_t at, std::span<const std::byte> src, std::size_t count) {
  std::visit(
      [&](auto& vec) {
        using V = std::decay_t<decltype(vec)>;
        if constexpr (std::is_same_v<V, std::string>) {
          std::memcpy(vec.data() + at, src.data(), count);
        } else {
          using T = typename V::value_type;
          for (std::size_t i = 0; i < count; ++i) vec[at + i] = decode_be<T>(src.data() + i * sizeof(T));
        }
      },
      dst);
}

std::string read_name(ByteReader& in) {
  std::uint32_t len = in.u32();
  if (len == 0) throw Error(Errc::MalformedHeader, "empty name");
  auto raw = in.take(len);
  in.skip_padding(len);
  return std::string(reinterpret_cast<const char*>(raw.data()), raw.size());
}

// Reads a list header: returns element count, 0 for ABSENT.
std::uint32_t read_list_header(ByteReader& in, std::uint32_t expected_tag, std::size_t min_element_size) {
  std::uint32_t tag = in.u32();
  std::uint32_t count = in.u32();
  if (tag == 0 && count == 0) return 0;
  if (tag != expected_tag) throw Error(Errc::MalformedHeader, "unexpected list tag");
  if (checked_mul(count, min_element_size) > in.remaining())
    throw Error(Errc::TruncatedFile, "list longer than the remaining header");
  return count;
}

std::vector<NcAttribute> read_attributes(ByteReader& in) {
  std::uint32_t count = read_list_header(in, kTagAttribute, 12);
  std::vector<NcAttribute> attrs;
  attrs.reserve(count);
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    NcAttribute attr;
    attr.name = read_name(in);
    std::uint32_t type = in.u32();
    if (!valid_type(type)) throw Error(Errc::MalformedHeader, "attribute '" + attr.name + "' has invalid type");
    attr.type = static_cast<NcType>(type);
    std::size_t nelems = in.u32();
    std::size_t nbytes = checked_mul(nelems, type_size(attr.type));
    in.need(pad4(nbytes));
    attr.values = make_values(attr.type, nelems);
    decode_into(attr.values, 0, in.take(nbytes), nelems);
    in.skip_padding(nbytes);
    if (!seen.insert(attr.name).second)
      throw Error(Errc::MalformedHeader, "duplicate attribute '" + attr.name + "'");
    attrs.push_back(std::move(attr));
  }
  return attrs;
}

struct VariableLayout {
  std::size_t begin = 0;
  std::size_t slab_elements = 0;  // per record for record variables
  bool is_record = false;
};

}  // namespace

std::string_view to_string(NcType t) {
  switch (t) {
    case NcType::Byte: return "byte";
    case NcType::Char: return "char";
    case NcType::Short: return "short";
    case NcType::Int: return "int";
    case NcType::Float: return "float";
    case NcType::Double: return "double";
  }
  return "?";
}

std::size_t type_size(NcType t) {
  switch (t) {
    case NcType::Byte:
    case NcType::Char: return 1;
    case NcType::Short: return 2;
    case NcType::Int:
    case NcType::Float: return 4;
    case NcType::Double: return 8;
  }
  return 0;
}

std::size_t value_count(const NcValues& values) {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

double value_as_double(const NcValues& values, std::size_t i) {
  return std::visit(
      [i](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string>)
          return static_cast<double>(static_cast<unsigned char>(v[i]));
        else
          return static_cast<double>(v[i]);
      },
      values);
}

std::string NcAttribute::text() const {
  const auto* s = std::get_if<std::string>(&values);
  if (!s) return {};
  std::string out = *s;
  while (!out.empty() && out.back() == '\0') out.pop_back();
  return out;
}

const NcAttribute* NcVariable::attribute(std::string_view attr_name) const {
  auto it = std::find_if(attributes.begin(), attributes.end(), [&](const NcAttribute& a) { return a.name == attr_name; });
  return it == attributes.end() ? nullptr : &*it;
}

const NcVariable* SelfDescribingDataset::variable(std::string_view name) const {
  auto it = std::find_if(variables.begin(), variables.end(), [&](const NcVariable& v) { return v.name == name; });
  return it == variables.end() ? nullptr : &*it;
}

const NcAttribute* SelfDescribingDataset::global_attribute(std::string_view name) const {
  auto it = std::find_if(global_attributes.begin(), global_attributes.end(),
                         [&](const NcAttribute& a) { return a.name == name; });
  return it == global_attributes.end() ? nullptr : &*it;
}

std::optional<std::size_t> SelfDescribingDataset::record_dimension() const {
  for (std::size_t i = 0; i < dimensions.size(); ++i)
    if (dimensions[i].is_record) return i;
  return std::nullopt;
}

bool SelfDescribingDataset::is_record_variable(const NcVariable& v) const {
  return !v.dimension_ids.empty() && v.dimension_ids.front() < dimensions.size() &&
         dimensions[v.dimension_ids.front()].is_record;
}

std::vector<std::size_t> SelfDescribingDataset::shape(const NcVariable& v) const {
  std::vector<std::size_t> out;
  out.reserve(v.dimension_ids.size());
  for (auto id : v.dimension_ids) out.push_back(dimensions.at(id).length);
  return out;
}

std::size_t SelfDescribingDataset::record_count() const {
  auto rec = record_dimension();
  return rec ? dimensions[*rec].length : 0;
}

std::span<const std::byte> as_bytes_view(std::string_view s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

SelfDescribingDataset read_netcdf_classic(std::string_view bytes) {
  return read_netcdf_classic(as_bytes_view(bytes));
}

SelfDescribingDataset read_netcdf_classic(std::span<const std::byte> bytes) {
  static constexpr char kMagic[3] = {'C', 'D', 'F'};
  std::size_t magic_len = std::min<std::size_t>(3, bytes.size());
  for (std::size_t i = 0; i < magic_len; ++i) {
    if (std::to_integer<char>(bytes[i]) != kMagic[i]) {
      auto b = [&](std::size_t k) { return k < bytes.size() ? std::to_integer<unsigned>(bytes[k]) : 0u; };
      if (bytes.size() >= 4 && ((b(0) == 0xCD && (b(1) == 0xF3 || b(1) == 0xF2)) ||
                                (b(0) == 0 && b(1) == 0 && b(2) == 0xFF && b(3) == 0xFF)))
        throw Error(Errc::UnsupportedFormat, "NASA CDF files are not decoded natively");
      if (bytes.size() >= 4 && b(0) == 0x89 && b(1) == 'H' && b(2) == 'D' && b(3) == 'F')
        throw Error(Errc::UnsupportedFormat, "NetCDF-4/HDF5 container is not supported");
      throw Error(Errc::UnsupportedFormat, "not a NetCDF classic file");
    }
  }
  if (bytes.size() < 4) throw Error(Errc::TruncatedFile, "file shorter than the magic number");

  ByteReader in(bytes);
  in.take(3);
  auto version = std::to_integer<unsigned>(in.take(1)[0]);
  if (version == 5) throw Error(Errc::UnsupportedFormat, "CDF-5 (64-bit data) is not supported");
  if (version != 1 && version != 2) throw Error(Errc::MalformedHeader, "unknown NetCDF version byte");

  SelfDescribingDataset ds;
  ds.format_version = static_cast<int>(version);
  std::uint32_t numrecs = in.u32();

  std::uint32_t ndims = read_list_header(in, kTagDimension, 8);
  ds.dimensions.reserve(ndims);
  for (std::uint32_t i = 0; i < ndims; ++i) {
    NcDimension dim;
    dim.name = read_name(in);
    dim.length = in.u32();
    if (dim.length == 0) {
      if (ds.record_dimension()) throw Error(Errc::MalformedHeader, "more than one record dimension");
      dim.is_record = true;
    }
    ds.dimensions.push_back(std::move(dim));
  }

  ds.global_attributes = read_attributes(in);

  std::uint32_t nvars = read_list_header(in, kTagVariable, 24);
  std::vector<VariableLayout> layouts;
  ds.variables.reserve(nvars);
  layouts.reserve(nvars);
  std::set<std::string> var_names;
  for (std::uint32_t i = 0; i < nvars; ++i) {
    NcVariable var;
    var.name = read_name(in);
    if (!var_names.insert(var.name).second)
      throw Error(Errc::MalformedHeader, "duplicate variable '" + var.name + "'");
    std::uint32_t rank = in.u32();
    if (checked_mul(rank, 4) > in.remaining()) throw Error(Errc::TruncatedFile, "dimension list truncated");
    VariableLayout layout;
    layout.slab_elements = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      std::uint32_t id = in.u32();
      if (id >= ds.dimensions.size()) throw Error(Errc::MalformedHeader, "variable '" + var.name + "' has a bad dimension id");
      if (ds.dimensions[id].is_record) {
        if (d != 0) throw Error(Errc::MalformedHeader, "record dimension must be the first dimension");
        layout.is_record = true;
      } else {
        layout.slab_elements = checked_mul(layout.slab_elements, ds.dimensions[id].length);
      }
      var.dimension_ids.push_back(id);
    }
    var.attributes = read_attributes(in);
    std::uint32_t type = in.u32();
    if (!valid_type(type)) throw Error(Errc::MalformedHeader, "variable '" + var.name + "' has invalid type");
    var.type = static_cast<NcType>(type);
    in.u32();  // vsize is recomputed below; the header value is redundant
    layout.begin = version == 1 ? in.u32() : static_cast<std::size_t>(in.u64());
    ds.variables.push_back(std::move(var));
    layouts.push_back(layout);
  }
  const std::size_t header_end = in.pos();

  // Per-record stride across all record variables.
  std::size_t record_vars = std::count_if(layouts.begin(), layouts.end(), [](const auto& l) { return l.is_record; });
  std::size_t recsize = 0;
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    if (!layouts[i].is_record) continue;
    std::size_t slab = checked_mul(layouts[i].slab_elements, type_size(ds.variables[i].type));
    recsize = checked_add(recsize, record_vars == 1 ? slab : pad4(slab));
  }

  std::size_t records = numrecs;
  if (numrecs == kStreaming) {
    records = 0;
    if (recsize > 0) {
      std::size_t first = bytes.size();
      for (std::size_t i = 0; i < layouts.size(); ++i)
        if (layouts[i].is_record) first = std::min(first, layouts[i].begin);
      if (first < bytes.size()) records = (bytes.size() - first) / recsize;
    }
  }
  if (auto rec = ds.record_dimension()) ds.dimensions[*rec].length = records;

  for (std::size_t i = 0; i < ds.variables.size(); ++i) {
    auto& var = ds.variables[i];
    const auto& layout = layouts[i];
    const std::size_t elem = type_size(var.type);
    const std::size_t slab_bytes = checked_mul(layout.slab_elements, elem);
    const std::size_t total = layout.is_record ? checked_mul(layout.slab_elements, records) : layout.slab_elements;
    if (layout.begin < header_end && total > 0)
      throw Error(Errc::MalformedHeader, "variable '" + var.name + "' data overlaps the header");

    std::size_t extent = slab_bytes;
    if (layout.is_record && records > 0)
      extent = checked_add(checked_mul(records - 1, recsize), slab_bytes);
    if (total > 0 && checked_add(layout.begin, extent) > bytes.size())
      throw Error(Errc::TruncatedFile, "data of variable '" + var.name + "' extends past end of file");

    var.data = make_values(var.type, total);
    if (total == 0) continue;
    if (!layout.is_record) {
      decode_into(var.data, 0, bytes.subspan(layout.begin, slab_bytes), layout.slab_elements);
    } else {
      for (std::size_t r = 0; r < records; ++r)
        decode_into(var.data, r * layout.slab_elements, bytes.subspan(layout.begin + r * recsize, slab_bytes),
                    layout.slab_elements);
    }
  }
  return ds;
}

namespace {

class NetcdfClassicAdapter final : public FormatAdapter {
 public:
  std::string_view name() const override { return "netcdf-classic"; }
  bool accepts(std::span<const std::byte> head) const override {
    return head.size() >= 4 && std::to_integer<char>(head[0]) == 'C' && std::to_integer<char>(head[1]) == 'D' &&
           std::to_integer<char>(head[2]) == 'F';
  }
  SelfDescribingDataset read(std::span<const std::byte> bytes) const override { return read_netcdf_classic(bytes); }
};

}  // namespace

FormatRegistry FormatRegistry::with_defaults() {
  FormatRegistry registry;
  registry.add(std::make_unique<NetcdfClassicAdapter>());
  return registry;
}

void FormatRegistry::add(std::unique_ptr<FormatAdapter> adapter) { adapters_.push_back(std::move(adapter)); }

SelfDescribingDataset FormatRegistry::read(std::span<const std::byte> bytes) const {
  for (const auto& adapter : adapters_)
    if (adapter->accepts(bytes)) return adapter->read(bytes);
  // Fall through to the classic reader for a precise diagnosis.
  return read_netcdf_classic(bytes);
}

}  // namespace rdcat
