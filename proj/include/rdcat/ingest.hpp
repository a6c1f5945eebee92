#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/error.hpp"
#include "rdcat/mapping.hpp"
#include "rdcat/model.hpp"

namespace rdcat {

inline constexpr std::string_view kSpaseNamespace = "http://www.spase-group.org/data/schema";
inline constexpr std::string_view kGmdNamespace = "http://www.isotc211.org/2005/gmd";

struct IngestOptions {
  // data_kind overrides keyed by source_id or slug.
  std::map<std::string, DataKind> kind_overrides;
  // nullptr selects MappingTable::builtin().
  const MappingTable* table = nullptr;
};

// Lowercase, every run of non-alphanumeric characters becomes one '-',
// leading/trailing '-' removed. "dataset" when nothing is left.
std::string slugify(std::string_view source_id);

// Schema whose root element (namespace + local name) matches.
std::optional<SourceSchema> detect_schema(const XmlElement& root, const MappingTable& table = MappingTable::builtin());

// SPASE/IUGONET resource. data_kind: NumericalData -> time_series, any other
// resource type -> other, unless overridden. Throws Error with XmlError,
// UnsupportedRoot or MissingRequired (detail = field name).
DatasetRecord parse_spase(std::string_view document, const IngestOptions& options = {});
// ISO 19115/19139 MD_Metadata. data_kind other unless overridden.
DatasetRecord parse_iso19115(std::string_view document, const IngestOptions& options = {});
// Dispatches on the root element namespace.
DatasetRecord parse_metadata(std::string_view document, const IngestOptions& options = {});

struct FileError {
  std::string file;
  Errc code = Errc::ParseError;
  std::string message;
};

struct IngestResult {
  std::vector<DatasetRecord> records;  // sorted by slug
  std::vector<FileError> errors;       // sorted by file
};

// Parses every *.xml file below `dir` (recursively). Slugs come from
// source_id; collisions get "-2", "-3", ... in file path order. Throws
// Error(IoError) only when `dir` cannot be read.
IngestResult ingest_directory(const std::filesystem::path& dir, const IngestOptions& options = {});

struct ConfigSet {
  std::map<std::string, DatasetConfig> configs;
  std::map<std::string, AvailabilityManifest> manifests;  // by config id
  std::vector<FileError> errors;
};

// Loads every *.yaml / *.yml below `dir`; manifest_path is resolved against
// the directory of the config file that names it.
ConfigSet load_config_directory(const std::filesystem::path& dir);

// Links records to configs (config source_id equal to the record source_id,
// else config id equal to the slug), applies config data_kind and thumbnail
// overrides, and validates. Records without a config or failing validation
// are left out and reported in `errors` under their slug.
CatalogSnapshot assemble_snapshot(std::vector<DatasetRecord> records, ConfigSet configs,
                                  std::vector<FileError>& errors);

}  // namespace rdcat
