#include "rdcat/registry.hpp"

#include <algorithm>

#include "rdcat/error.hpp"
#include "rdcat/filename_template.hpp"
#include "rdcat/text.hpp"

namespace rdcat {

AvailabilityManifest parse_manifest(std::string_view text, std::string dataset_id) {
  AvailabilityManifest manifest;
  manifest.dataset_id = std::move(dataset_id);
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    Timestamp t;
    try {
      t = parse_timestamp(line);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!manifest.timestamps.empty() && t <= manifest.timestamps.back())
      throw Error(Errc::ManifestError,
                  "manifest line " + std::to_string(line_no) + " is not strictly after the previous entry");
    manifest.timestamps.push_back(t);
  }
  return manifest;
}

std::string format_manifest(const AvailabilityManifest& manifest) {
  std::string out;
  for (auto t : manifest.timestamps) out += format_timestamp(t) + "\n";
  return out;
}

Timestamp truncate_to(Timestamp t, Granularity granularity) {
  using namespace std::chrono;
  switch (granularity) {
    case Granularity::hourly: return floor<hours>(t);
    case Granularity::daily: return floor<days>(t);
    case Granularity::monthly: {
      year_month_day ymd{floor<days>(t)};
      return sys_days{ymd.year() / ymd.month() / 1};
    }
    case Granularity::static_: return t;
  }
  return t;
}

std::string display_name_for(std::string_view url) {
  auto end = url.find_first_of("?#");
  if (end != std::string_view::npos) url = url.substr(0, end);
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  auto slash = url.rfind('/');
  return std::string(slash == std::string_view::npos ? url : url.substr(slash + 1));
}

std::vector<FileEntry> resolve_range(const DatasetConfig& config, const AvailabilityManifest& manifest,
                                     Timestamp from, Timestamp to) {
  if (from > to) throw Error(Errc::InvertedRange, "range start is after its end");
  auto tmpl = FilenameTemplate::parse(config.data_url_template);
  auto first = std::lower_bound(manifest.timestamps.begin(), manifest.timestamps.end(), from);
  auto last = std::upper_bound(first, manifest.timestamps.end(), to);

  std::vector<FileEntry> out;
  out.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) {
    FileEntry entry;
    entry.timestamp = truncate_to(*it, config.granularity);
    entry.url = tmpl.expand(entry.timestamp);
    entry.display_name = display_name_for(entry.url);
    out.push_back(std::move(entry));
  }
  return out;
}

std::set<int> available_dates(const AvailabilityManifest& manifest, int year, int month) {
  using namespace std::chrono;
  if (month < 1 || month > 12) throw Error(Errc::InvalidArgument, "month must be within 1..12");
  auto first_day = sys_days{std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / 1};
  auto next_month = sys_days{(std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / 1) + months{1}};

  std::set<int> days_present;
  auto it = std::lower_bound(manifest.timestamps.begin(), manifest.timestamps.end(), Timestamp{first_day});
  for (; it != manifest.timestamps.end() && *it < Timestamp{next_month}; ++it) {
    year_month_day ymd{floor<days>(*it)};
    days_present.insert(static_cast<int>(static_cast<unsigned>(ymd.day())));
  }
  return days_present;
}

}  // namespace rdcat
