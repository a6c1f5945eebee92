#include "rdcat/snapshot_io.hpp"

#include <algorithm>

#include "rdcat/error.hpp"
#include "rdcat/registry.hpp"
#include "rdcat/scoring.hpp"
#include "rdcat/text.hpp"
#include "rdcat/textnet.hpp"

namespace fs = std::filesystem;

namespace rdcat {

namespace {

using ojson = nlohmann::ordered_json;

ojson localized_to_json(const LocalizedText& t) {
  ojson j;
  j["en"] = t.en;
  if (t.ja) j["ja"] = *t.ja;
  return j;
}

LocalizedText localized_from_json(const nlohmann::json& j) {
  LocalizedText t;
  t.en = j.at("en").get<std::string>();
  if (j.contains("ja")) t.ja = j.at("ja").get<std::string>();
  return t;
}

std::string optional_string(const nlohmann::json& j, const char* key) {
  return j.contains(key) ? j.at(key).get<std::string>() : std::string();
}

fs::path without_trailing_slash(fs::path p) {
  if (p.filename().empty()) p = p.parent_path();
  return p;
}

std::vector<fs::path> files_in(const fs::path& dir, std::string_view extension) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json parse_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

ojson record_to_json(const DatasetRecord& r) {
  ojson j;
  j["id"] = r.id;
  j["source_id"] = r.source_id;
  j["source_schema"] = to_string(r.source_schema);
  j["title"] = localized_to_json(r.title);
  j["snippet"] = localized_to_json(r.snippet);
  j["description"] = localized_to_json(r.description);
  j["discipline"] = r.discipline;
  j["data_kind"] = to_string(r.data_kind);
  j["keywords"] = r.keywords;
  if (r.site) {
    ojson site;
    site["name"] = r.site->name;
    if (r.site->latitude) site["latitude"] = *r.site->latitude;
    if (r.site->longitude) site["longitude"] = *r.site->longitude;
    j["site"] = site;
  }
  if (r.temporal_coverage)
    j["temporal_coverage"] = {{"start", format_timestamp(r.temporal_coverage->start)},
                              {"end", format_timestamp(r.temporal_coverage->end)}};
  j["contacts"] = ojson::array();
  for (const auto& c : r.contacts) {
    ojson cj;
    cj["role"] = c.role;
    cj["name"] = c.name;
    cj["affiliation"] = c.affiliation;
    if (c.email) cj["email"] = *c.email;
    j["contacts"].push_back(cj);
  }
  j["thumbnail"] = r.thumbnail;
  j["metadata_display"] = ojson::array();
  for (const auto& m : r.metadata_display) j["metadata_display"].push_back({{"key", m.key}, {"value", m.value}});
  j["access_count"] = r.access_count;
  j["config_ref"] = r.config_ref;
  return j;
}

DatasetRecord record_from_json(const nlohmann::json& j) {
  try {
    DatasetRecord r;
    r.id = j.at("id").get<std::string>();
    r.source_id = optional_string(j, "source_id");
    r.source_schema = parse_source_schema(j.at("source_schema").get<std::string>());
    r.title = localized_from_json(j.at("title"));
    r.snippet = localized_from_json(j.at("snippet"));
    r.description = localized_from_json(j.at("description"));
    r.discipline = j.value("discipline", std::vector<std::string>{});
    r.data_kind = parse_data_kind(j.at("data_kind").get<std::string>());
    r.keywords = j.value("keywords", std::vector<std::string>{});
    if (j.contains("site")) {
      const auto& s = j.at("site");
      Site site;
      site.name = s.at("name").get<std::string>();
      if (s.contains("latitude")) site.latitude = s.at("latitude").get<double>();
      if (s.contains("longitude")) site.longitude = s.at("longitude").get<double>();
      r.site = site;
    }
    if (j.contains("temporal_coverage")) {
      const auto& t = j.at("temporal_coverage");
      r.temporal_coverage = TimeSpan{parse_timestamp(t.at("start").get<std::string>()),
                                     parse_timestamp(t.at("end").get<std::string>())};
    }
    for (const auto& c : j.value("contacts", nlohmann::json::array())) {
      Contact contact{c.at("role").get<std::string>(), c.at("name").get<std::string>(),
                      optional_string(c, "affiliation"), std::nullopt};
      if (c.contains("email")) contact.email = c.at("email").get<std::string>();
      r.contacts.push_back(std::move(contact));
    }
    r.thumbnail = optional_string(j, "thumbnail");
    for (const auto& m : j.value("metadata_display", nlohmann::json::array()))
      r.metadata_display.push_back({m.at("key").get<std::string>(), m.at("value").get<std::string>()});
    r.access_count = j.value("access_count", std::uint64_t{0});
    r.config_ref = optional_string(j, "config_ref");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("record document: ") + e.what());
  }
}

ojson config_to_json(const DatasetConfig& c) {
  ojson j;
  j["id"] = c.id;
  j["source_id"] = c.source_id;
  j["data_url_template"] = c.data_url_template;
  j["visual_url_template"] = c.visual_url_template;
  j["static_visuals"] = c.static_visuals;
  j["granularity"] = to_string(c.granularity);
  j["format"] = to_string(c.format);
  j["show_visualized"] = c.show_visualized;
  j["download_enabled"] = c.download_enabled;
  j["conversion_enabled"] = c.conversion_enabled;
  j["manifest_path"] = c.manifest_path;
  j["score_variable"] = c.score_variable;
  if (c.data_kind) j["data_kind"] = to_string(*c.data_kind);
  j["thumbnail"] = c.thumbnail;
  return j;
}

DatasetConfig config_from_json(const nlohmann::json& j) {
  try {
    DatasetConfig c;
    c.id = j.at("id").get<std::string>();
    c.source_id = optional_string(j, "source_id");
    c.data_url_template = j.at("data_url_template").get<std::string>();
    c.visual_url_template = optional_string(j, "visual_url_template");
    c.static_visuals = j.value("static_visuals", std::vector<std::string>{});
    c.granularity = parse_granularity(j.at("granularity").get<std::string>());
    c.format = parse_data_format(j.at("format").get<std::string>());
    c.show_visualized = j.value("show_visualized", true);
    c.download_enabled = j.value("download_enabled", true);
    c.conversion_enabled = j.value("conversion_enabled", false);
    c.manifest_path = optional_string(j, "manifest_path");
    c.score_variable = optional_string(j, "score_variable");
    if (j.contains("data_kind")) c.data_kind = parse_data_kind(j.at("data_kind").get<std::string>());
    c.thumbnail = optional_string(j, "thumbnail");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("config document: ") + e.what());
  }
}

void write_snapshot(const CatalogSnapshot& snapshot, const fs::path& target) {
  check_integrity(snapshot);
  const fs::path dir = without_trailing_slash(target);
  const fs::path staging = dir.string() + ".staging";
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    fs::create_directories(staging / "records");
    fs::create_directories(staging / "configs");
    fs::create_directories(staging / "manifests");
  } catch (const fs::filesystem_error& e) {
    throw Error(Errc::IoError, e.what());
  }

  ojson index;
  index["format_version"] = kSnapshotFormatVersion;
  index["version"] = snapshot.version;
  index["settings"] = {{"related_threshold", snapshot.settings.related_threshold},
                       {"related_top_k", snapshot.settings.related_top_k}};
  write_file((staging / "index.json").string(), index.dump(2) + "\n");

  for (const auto& [id, record] : snapshot.records)
    write_file((staging / "records" / (id + ".json")).string(), record_to_json(record).dump(2) + "\n");
  for (const auto& [id, config] : snapshot.configs) {
    DatasetConfig stored = config;
    if (snapshot.manifests.contains(id)) stored.manifest_path = "manifests/" + id + ".txt";
    write_file((staging / "configs" / (id + ".json")).string(), config_to_json(stored).dump(2) + "\n");
  }
  for (const auto& [id, manifest] : snapshot.manifests)
    write_file((staging / "manifests" / (id + ".txt")).string(), format_manifest(manifest));
  write_file((staging / "scores.tsv").string(), format_score_table(snapshot.scores));
  write_file((staging / "graph.json").string(), export_graph(snapshot.graph));

  try {
    fs::remove_all(dir);
    fs::rename(staging, dir);
  } catch (const fs::filesystem_error& e) {
    throw Error(Errc::IoError, e.what());
  }
}

CatalogSnapshot read_snapshot(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::IoError, "snapshot directory '" + dir.string() + "' does not exist");
  const auto index = parse_json_file(dir / "index.json");
  CatalogSnapshot snapshot;
  try {
    const int format = index.at("format_version").get<int>();
    if (format != kSnapshotFormatVersion)
      throw Error(Errc::ParseError, "unsupported snapshot format_version " + std::to_string(format));
    snapshot.version = index.at("version").get<std::uint64_t>();
    if (index.contains("settings")) {
      const auto& s = index.at("settings");
      snapshot.settings.related_threshold = s.value("related_threshold", snapshot.settings.related_threshold);
      snapshot.settings.related_top_k = s.value("related_top_k", snapshot.settings.related_top_k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("index.json: ") + e.what());
  }

  for (const auto& path : files_in(dir / "records", ".json")) {
    auto record = record_from_json(parse_json_file(path));
    std::string id = record.id;
    snapshot.records.emplace(std::move(id), std::move(record));
  }
  for (const auto& path : files_in(dir / "configs", ".json")) {
    auto config = config_from_json(parse_json_file(path));
    std::string id = config.id;
    snapshot.configs.emplace(std::move(id), std::move(config));
  }
  for (const auto& path : files_in(dir / "manifests", ".txt")) {
    std::string id = path.stem().string();
    snapshot.manifests.emplace(id, parse_manifest(read_file(path.string()), id));
  }
  if (fs::exists(dir / "scores.tsv")) snapshot.scores = parse_score_table(read_file((dir / "scores.tsv").string()));
  if (fs::exists(dir / "graph.json")) snapshot.graph = parse_graph(read_file((dir / "graph.json").string()));
  check_integrity(snapshot);
  return snapshot;
}

}  // namespace rdcat
