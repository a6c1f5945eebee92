#include "rdcat/zip.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

#include <zlib.h>

#include "rdcat/error.hpp"

namespace rdcat {

namespace {

constexpr std::uint16_t kVersionNeeded = 20;
constexpr std::uint16_t kVersionMadeBy = (3 << 8) | 20;  // unix, 2.0
constexpr std::uint16_t kFlagUtf8 = 0x0800;
constexpr std::uint16_t kMethodStore = 0;
constexpr std::uint16_t kMethodDeflate = 8;

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::pair<std::uint16_t, std::uint16_t> dos_date_time(Timestamp t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  int year = static_cast<int>(ymd.year());
  if (year < 1980) return {0, (1 << 5) | 1};  // 1980-01-01 00:00
  if (year > 2107) year = 2107;
  hh_mm_ss hms{t - day_point};
  auto time = static_cast<std::uint16_t>((hms.hours().count() << 11) | (hms.minutes().count() << 5) |
                                         (hms.seconds().count() / 2));
  auto date = static_cast<std::uint16_t>(((year - 1980) << 9) | (static_cast<unsigned>(ymd.month()) << 5) |
                                         static_cast<unsigned>(ymd.day()));
  return {time, date};
}

std::string raw_deflate(std::string_view input) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(Errc::IoError, "deflateInit2 failed");
  std::string out(deflateBound(&zs, static_cast<uLong>(input.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(input.data()));
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(Errc::IoError, "deflate failed");
  out.resize(zs.total_out);
  return out;
}

}  // namespace

ZipWriter::ZipWriter(Sink sink) : sink_(std::move(sink)) {}

void ZipWriter::emit(std::string_view bytes) {
  sink_(bytes);
  offset_ += bytes.size();
}

void ZipWriter::add(std::string_view name, std::string_view content, Timestamp timestamp) {
  if (finished_) throw Error(Errc::InvalidArgument, "zip archive already finished");
  constexpr auto kMax32 = std::numeric_limits<std::uint32_t>::max();
  if (content.size() >= kMax32 || offset_ >= kMax32 || name.size() > 0xFFFF || central_.size() >= 0xFFFF)
    throw Error(Errc::SizeLimit, "archive exceeds the non-ZIP64 limits");

  CentralEntry entry;
  entry.name = std::string(name);
  entry.crc = static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(content.data()), static_cast<uInt>(content.size())));
  entry.size = static_cast<std::uint32_t>(content.size());
  std::tie(entry.dos_time, entry.dos_date) = dos_date_time(timestamp);
  entry.local_offset = static_cast<std::uint32_t>(offset_);

  std::string compressed;
  std::string_view payload = content;
  entry.method = kMethodStore;
  if (!content.empty()) {
    compressed = raw_deflate(content);
    if (compressed.size() < content.size()) {
      entry.method = kMethodDeflate;
      payload = compressed;
    }
  }
  entry.compressed_size = static_cast<std::uint32_t>(payload.size());

  std::string header;
  put32(header, 0x04034b50);
  put16(header, kVersionNeeded);
  put16(header, kFlagUtf8);
  put16(header, entry.method);
  put16(header, entry.dos_time);
  put16(header, entry.dos_date);
  put32(header, entry.crc);
  put32(header, entry.compressed_size);
  put32(header, entry.size);
  put16(header, static_cast<std::uint16_t>(entry.name.size()));
  put16(header, 0);
  header += entry.name;
  emit(header);
  emit(payload);
  central_.push_back(std::move(entry));
}

void ZipWriter::finish() {
  if (finished_) return;
  finished_ = true;
  auto directory_offset = static_cast<std::uint32_t>(offset_);
  std::string directory;
  for (const auto& e : central_) {
    put32(directory, 0x02014b50);
    put16(directory, kVersionMadeBy);
    put16(directory, kVersionNeeded);
    put16(directory, kFlagUtf8);
    put16(directory, e.method);
    put16(directory, e.dos_time);
    put16(directory, e.dos_date);
    put32(directory, e.crc);
    put32(directory, e.compressed_size);
    put32(directory, e.size);
    put16(directory, static_cast<std::uint16_t>(e.name.size()));
    put16(directory, 0);  // extra
    put16(directory, 0);  // comment
    put16(directory, 0);  // disk
    put16(directory, 0);  // internal attributes
    put32(directory, 0100644u << 16);
    put32(directory, e.local_offset);
    directory += e.name;
  }
  emit(directory);

  std::string end;
  put32(end, 0x06054b50);
  put16(end, 0);
  put16(end, 0);
  put16(end, static_cast<std::uint16_t>(central_.size()));
  put16(end, static_cast<std::uint16_t>(central_.size()));
  put32(end, static_cast<std::uint32_t>(directory.size()));
  put32(end, directory_offset);
  put16(end, 0);
  emit(end);
}

std::vector<std::string> unique_member_names(const std::vector<std::string>& names) {
  std::set<std::string> taken(names.begin(), names.end());
  std::set<std::string> used;
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    if (used.insert(name).second) {
      out.push_back(name);
      continue;
    }
    auto dot = name.rfind('.');
    if (dot == 0 || dot == std::string::npos) dot = name.size();
    std::string stem = name.substr(0, dot), ext = name.substr(dot);
    for (int n = 2;; ++n) {
      std::string candidate = stem + "-" + std::to_string(n) + ext;
      if (!taken.contains(candidate) && used.insert(candidate).second) {
        out.push_back(std::move(candidate));
        break;
      }
    }
  }
  return out;
}

std::string package_zip(std::vector<ZipMember> entries) {
  if (entries.empty()) throw Error(Errc::EmptySelection, "no files selected");
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ZipMember& a, const ZipMember& b) { return a.timestamp < b.timestamp; });
  std::vector<std::string> names;
  names.reserve(entries.size());
  for (const auto& e : entries) names.push_back(e.name);
  names = unique_member_names(names);

  std::string archive;
  ZipWriter writer([&](std::string_view bytes) { archive.append(bytes); });
  for (std::size_t i = 0; i < entries.size(); ++i) writer.add(names[i], entries[i].content, entries[i].timestamp);
  writer.finish();
  return archive;
}

}  // namespace rdcat
