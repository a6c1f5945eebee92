#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/timeutil.hpp"

namespace rdcat {

struct ZipMember {
  std::string name;
  std::string content;
  Timestamp timestamp{};
};

// Incremental writer for a standard (non-ZIP64) archive. Each member is
// written to the sink as soon as it is added, so at most one member's bytes
// are held in memory. Members use deflate when it shrinks them, store
// otherwise; names are flagged UTF-8 and member times carry `timestamp`.
class ZipWriter {
 public:
  using Sink = std::function<void(std::string_view)>;

  explicit ZipWriter(Sink sink);

  void add(std::string_view name, std::string_view content, Timestamp timestamp);
  // Writes the central directory; no further members may be added.
  void finish();

  std::uint64_t bytes_written() const { return offset_; }

 private:
  struct CentralEntry {
    std::string name;
    std::uint32_t crc;
    std::uint32_t compressed_size;
    std::uint32_t size;
    std::uint16_t method;
    std::uint16_t dos_time;
    std::uint16_t dos_date;
    std::uint32_t local_offset;
  };

  void emit(std::string_view bytes);

  Sink sink_;
  std::vector<CentralEntry> central_;
  std::uint64_t offset_ = 0;
  bool finished_ = false;
};

// "a.nc", "a.nc", "b" -> "a.nc", "a-2.nc", "b"
std::vector<std::string> unique_member_names(const std::vector<std::string>& names);

// Members ordered by timestamp (stable), names de-duplicated. Throws
// Error(EmptySelection) for an empty list.
std::string package_zip(std::vector<ZipMember> entries);

}  // namespace rdcat
