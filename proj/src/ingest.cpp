#include "rdcat/ingest.hpp"

#include <algorithm>
#include <set>

#include "rdcat/config.hpp"
#include "rdcat/registry.hpp"
#include "rdcat/text.hpp"
#include "rdcat/xml.hpp"

namespace fs = std::filesystem;

namespace rdcat {

namespace {

std::string truncate_chars(const std::string& s, std::size_t max_chars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) continue;
    if (chars++ == max_chars) return s.substr(0, i);
  }
  return s;
}

LocalizedText snippet_of(const LocalizedText& title) {
  LocalizedText out{truncate_chars(title.en, kSnippetMaxChars), std::nullopt};
  if (title.ja) out.ja = truncate_chars(*title.ja, kSnippetMaxChars);
  return out;
}

const MappingTable& table_of(const IngestOptions& options) {
  return options.table ? *options.table : MappingTable::builtin();
}

const XmlElement* spase_resource(const XmlElement& root) {
  for (const auto& c : root.children)
    if (c.name != "Version") return &c;
  return nullptr;
}

DatasetRecord finish(DatasetRecord r, const IngestOptions& options) {
  r.id = slugify(r.source_id);
  r.snippet = snippet_of(r.title);
  if (auto it = options.kind_overrides.find(r.source_id); it != options.kind_overrides.end())
    r.data_kind = it->second;
  else if (auto it2 = options.kind_overrides.find(r.id); it2 != options.kind_overrides.end())
    r.data_kind = it2->second;
  return r;
}

DatasetRecord parse_as(const XmlElement& root, SourceSchema schema, const IngestOptions& options) {
  const auto& mapping = table_of(options).schema(schema);
  if (!mapping.is_root(root))
    throw Error(Errc::UnsupportedRoot, "root element '" + root.name + "' in namespace '" + root.ns + "' is not a " +
                                           std::string(to_string(schema)) + " document");
  DatasetRecord r = apply_mapping(root, mapping, schema);
  if (schema == SourceSchema::spase_iugonet) {
    const auto* resource = spase_resource(root);
    r.data_kind = resource && resource->name == "NumericalData" ? DataKind::time_series : DataKind::other;
  }
  return finish(std::move(r), options);
}

std::vector<fs::path> files_with(const fs::path& dir, std::initializer_list<std::string_view> extensions) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(Errc::IoError, "'" + dir.string() + "' is not a readable directory");
  fs::recursive_directory_iterator it(dir, ec), end;
  if (ec) throw Error(Errc::IoError, "cannot read '" + dir.string() + "': " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) throw Error(Errc::IoError, "cannot read '" + dir.string() + "': " + ec.message());
    if (!it->is_regular_file()) continue;
    auto ext = to_lower_ascii(it->path().extension().string());
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(it->path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FileError file_error(const fs::path& file, const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return {file.string(), err->code(), err->detail()};
  return {file.string(), Errc::IoError, e.what()};
}

}  // namespace

std::string slugify(std::string_view source_id) {
  std::string out;
  bool pending_dash = false;
  for (char ch : source_id) {
    unsigned char c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z')) {
      if (pending_dash && !out.empty()) out += '-';
      pending_dash = false;
      out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    } else {
      pending_dash = true;
    }
  }
  return out.empty() ? "dataset" : out;
}

std::optional<SourceSchema> detect_schema(const XmlElement& root, const MappingTable& table) {
  for (auto schema : {SourceSchema::spase_iugonet, SourceSchema::iso19115})
    if (table.schema(schema).is_root(root)) return schema;
  return std::nullopt;
}

DatasetRecord parse_spase(std::string_view document, const IngestOptions& options) {
  return parse_as(parse_xml(document), SourceSchema::spase_iugonet, options);
}

DatasetRecord parse_iso19115(std::string_view document, const IngestOptions& options) {
  return parse_as(parse_xml(document), SourceSchema::iso19115, options);
}

DatasetRecord parse_metadata(std::string_view document, const IngestOptions& options) {
  auto root = parse_xml(document);
  auto schema = detect_schema(root, table_of(options));
  if (!schema)
    throw Error(Errc::UnsupportedRoot, "root element '" + root.name + "' in namespace '" + root.ns + "' matches no schema");
  return parse_as(root, *schema, options);
}

IngestResult ingest_directory(const fs::path& dir, const IngestOptions& options) {
  IngestResult result;
  std::set<std::string> taken;
  for (const auto& file : files_with(dir, {".xml"})) {
    try {
      auto record = parse_metadata(read_file(file.string()), options);
      std::string slug = record.id;
      for (int n = 2; taken.contains(slug); ++n) slug = record.id + "-" + std::to_string(n);
      record.id = slug;
      taken.insert(slug);
      result.records.push_back(std::move(record));
    } catch (const std::exception& e) {
      result.errors.push_back(file_error(file, e));
    }
  }
  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return result;
}

ConfigSet load_config_directory(const fs::path& dir) {
  ConfigSet set;
  for (const auto& file : files_with(dir, {".yaml", ".yml"})) {
    try {
      auto config = load_dataset_config(read_file(file.string()));
      if (set.configs.contains(config.id))
        throw Error(Errc::InconsistentConfig, "duplicate config id '" + config.id + "'");
      if (!config.manifest_path.empty()) {
        fs::path manifest = config.manifest_path;
        if (manifest.is_relative()) manifest = file.parent_path() / manifest;
        set.manifests[config.id] = parse_manifest(read_file(manifest.string()), config.id);
      }
      std::string id = config.id;
      set.configs.emplace(std::move(id), std::move(config));
    } catch (const std::exception& e) {
      set.errors.push_back(file_error(file, e));
    }
  }
  return set;
}

CatalogSnapshot assemble_snapshot(std::vector<DatasetRecord> records, ConfigSet configs,
                                  std::vector<FileError>& errors) {
  CatalogSnapshot snapshot;
  snapshot.configs = std::move(configs.configs);
  snapshot.manifests = std::move(configs.manifests);

  std::map<std::string, std::string> by_source;
  for (const auto& [id, config] : snapshot.configs)
    if (!config.source_id.empty()) by_source.emplace(config.source_id, id);

  for (auto& record : records) {
    if (auto it = by_source.find(record.source_id); it != by_source.end())
      record.config_ref = it->second;
    else if (snapshot.configs.contains(record.id))
      record.config_ref = record.id;
    if (auto it = snapshot.configs.find(record.config_ref); it != snapshot.configs.end()) {
      if (it->second.data_kind) record.data_kind = *it->second.data_kind;
      if (!it->second.thumbnail.empty()) record.thumbnail = it->second.thumbnail;
    }
    auto report = validate_record(record, snapshot.configs);
    if (!report.ok()) {
      std::string message;
      for (const auto& issue : report.errors) message += (message.empty() ? "" : "; ") + issue.message;
      errors.push_back({record.id, Errc::IntegrityError, message});
      continue;
    }
    std::string id = record.id;
    snapshot.records.emplace(std::move(id), std::move(record));
  }
  return snapshot;
}

}  // namespace rdcat
