#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/model.hpp"

namespace rdcat {

struct FileEntry {
  Timestamp timestamp;
  std::string url;
  std::string display_name;
  friend bool operator==(const FileEntry&, const FileEntry&) = default;
};

// Manifest text: one ISO 8601 timestamp per line, ascending, no duplicates.
// Blank lines and lines starting with '#' are skipped. Throws
// Error(ManifestError) on unsorted/duplicate entries, ParseError on bad lines.
AvailabilityManifest parse_manifest(std::string_view text, std::string dataset_id = {});
std::string format_manifest(const AvailabilityManifest& manifest);

Timestamp truncate_to(Timestamp t, Granularity granularity);

// Last path segment of a URL, ignoring any query string or fragment.
std::string display_name_for(std::string_view url);

// One entry per manifest timestamp in [from, to] (inclusive), ascending.
// Throws Error(InvertedRange) when from > to.
std::vector<FileEntry> resolve_range(const DatasetConfig& config, const AvailabilityManifest& manifest,
                                     Timestamp from, Timestamp to);

// Days of the month having at least one granule. Throws
// Error(InvalidArgument) when month is outside 1..12.
std::set<int> available_dates(const AvailabilityManifest& manifest, int year, int month);

}  // namespace rdcat
