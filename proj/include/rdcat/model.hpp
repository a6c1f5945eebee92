#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/timeutil.hpp"

namespace rdcat {

enum class Lang { en, ja };

// English is mandatory; Japanese is optional and falls back to English.
struct LocalizedText {
  std::string en;
  std::optional<std::string> ja;

  const std::string& get(Lang lang) const {
    if (lang == Lang::ja && ja && !ja->empty()) return *ja;
    return en;
  }

  friend bool operator==(const LocalizedText&, const LocalizedText&) = default;
};

enum class SourceSchema { spase_iugonet, iso19115 };
enum class DataKind { time_series, composition, specimen, other };
enum class Granularity { daily, hourly, monthly, static_ };
enum class DataFormat { netcdf, cdf, other };
enum class ScoreMethod { pearson, emd };

struct Site {
  std::string name;
  std::optional<double> latitude;
  std::optional<double> longitude;
  friend bool operator==(const Site&, const Site&) = default;
};

struct TimeSpan {
  Timestamp start;
  Timestamp end;
  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

struct Contact {
  std::string role;
  std::string name;
  std::string affiliation;
  std::optional<std::string> email;
  friend bool operator==(const Contact&, const Contact&) = default;
};

struct MetadataEntry {
  std::string key;
  std::string value;
  friend bool operator==(const MetadataEntry&, const MetadataEntry&) = default;
};

inline constexpr std::size_t kSnippetMaxChars = 120;

struct DatasetRecord {
  std::string id;
  std::string source_id;
  SourceSchema source_schema = SourceSchema::spase_iugonet;
  LocalizedText title;
  LocalizedText snippet;
  LocalizedText description;
  std::vector<std::string> discipline;
  DataKind data_kind = DataKind::other;
  std::vector<std::string> keywords;
  std::optional<Site> site;
  std::optional<TimeSpan> temporal_coverage;
  std::vector<Contact> contacts;
  std::string thumbnail;
  std::vector<MetadataEntry> metadata_display;
  std::uint64_t access_count = 0;
  std::string config_ref;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct DatasetConfig {
  std::string id;
  // Links the config to a record by the source document's identifier; when
  // empty the config id itself must equal the record slug.
  std::string source_id;
  std::string data_url_template;
  std::string visual_url_template;
  // Fixed visuals for static datasets (specimen photos and the like).
  std::vector<std::string> static_visuals;
  Granularity granularity = Granularity::daily;
  DataFormat format = DataFormat::other;
  bool show_visualized = true;
  bool download_enabled = true;
  bool conversion_enabled = false;
  std::string manifest_path;
  // Variable used by the relatedness engine (series or composition masses).
  std::string score_variable;
  std::optional<DataKind> data_kind;
  std::string thumbnail;

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

// Timestamps for which a granule exists; unique and ascending.
struct AvailabilityManifest {
  std::string dataset_id;
  std::vector<Timestamp> timestamps;
  friend bool operator==(const AvailabilityManifest&, const AvailabilityManifest&) = default;
};

// Stored once per unordered pair with dataset_a < dataset_b.
struct RelatednessScore {
  std::string dataset_a;
  std::string dataset_b;
  double score = 0.0;
  ScoreMethod method = ScoreMethod::pearson;
  double detail = 0.0;
  friend bool operator==(const RelatednessScore&, const RelatednessScore&) = default;
};

struct GraphNode {
  std::string term;
  std::size_t count = 0;
  double rate = 0.0;
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string term_a;
  std::string term_b;
  std::size_t co_count = 0;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct CooccurrenceGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::size_t total_titles = 0;
  friend bool operator==(const CooccurrenceGraph&, const CooccurrenceGraph&) = default;
};

struct SnapshotSettings {
  double related_threshold = 0.7;
  std::size_t related_top_k = 10;
  friend bool operator==(const SnapshotSettings&, const SnapshotSettings&) = default;
};

struct CatalogSnapshot {
  std::map<std::string, DatasetRecord> records;
  std::map<std::string, DatasetConfig> configs;
  // Keyed by config id.
  std::map<std::string, AvailabilityManifest> manifests;
  std::vector<RelatednessScore> scores;
  CooccurrenceGraph graph;
  SnapshotSettings settings;
  std::uint64_t version = 0;

  const DatasetConfig* config_for(const DatasetRecord& record) const;
  const AvailabilityManifest& manifest_for(const DatasetConfig& config) const;
};

enum class ValidationCode {
  MissingId,
  InvalidSlug,
  MissingTitle,
  InvertedTimeSpan,
  SnippetTooLong,
  UnresolvedConfig,
  TimeSeriesWithoutTimedConfig,
};

struct ValidationIssue {
  ValidationCode code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;

  bool ok() const { return errors.empty(); }
  bool has(ValidationCode code) const;
};

ValidationReport validate_record(const DatasetRecord& record,
                                 const std::map<std::string, DatasetConfig>& configs);

// Referential integrity of a whole snapshot; throws Error(IntegrityError).
void check_integrity(const CatalogSnapshot& snapshot);

bool is_valid_slug(std::string_view id);
std::size_t utf8_length(std::string_view text);

std::string_view to_string(Lang v);
std::string_view to_string(SourceSchema v);
std::string_view to_string(DataKind v);
std::string_view to_string(Granularity v);
std::string_view to_string(DataFormat v);
std::string_view to_string(ScoreMethod v);
std::string_view to_string(ValidationCode v);

// Inverse conversions; throw Error(ParseError) on unknown names.
Lang parse_lang(std::string_view s);
SourceSchema parse_source_schema(std::string_view s);
DataKind parse_data_kind(std::string_view s);
Granularity parse_granularity(std::string_view s);
DataFormat parse_data_format(std::string_view s);
ScoreMethod parse_score_method(std::string_view s);

}  // namespace rdcat
