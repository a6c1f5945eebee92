#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rdcat/model.hpp"

namespace rdcat {

inline constexpr int kSnapshotFormatVersion = 1;

nlohmann::ordered_json record_to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const DatasetConfig& config);
DatasetConfig config_from_json(const nlohmann::json& doc);

// On-disk layout:
//
//   index.json              {"format_version", "version", "settings"}
//   records/<id>.json       one DatasetRecord each
//   configs/<id>.json       one DatasetConfig each
//   manifests/<id>.txt      availability manifest per config id
//   scores.tsv              relatedness table (see format_score_table)
//   graph.json              co-occurrence graph (see export_graph)
//
// Every file except index.json depends only on the snapshot content, so
// re-writing identical content gives identical bytes apart from the version
// stamp. The directory is replaced as a whole: content is staged next to it
// and renamed into place.
void write_snapshot(const CatalogSnapshot& snapshot, const std::filesystem::path& dir);

// Throws Error(IoError) for a missing directory or file, ParseError for bad
// documents and IntegrityError for dangling references.
CatalogSnapshot read_snapshot(const std::filesystem::path& dir);

}  // namespace rdcat
