#include "rdcat/model.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "rdcat/error.hpp"
#include "rdcat/filename_template.hpp"

namespace rdcat {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  throw Error(Errc::ParseError, "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  return "?";
}

constexpr std::array<std::pair<std::string_view, Lang>, 2> kLang{{{"en", Lang::en}, {"ja", Lang::ja}}};
constexpr std::array<std::pair<std::string_view, SourceSchema>, 2> kSchema{
    {{"spase_iugonet", SourceSchema::spase_iugonet}, {"iso19115", SourceSchema::iso19115}}};
constexpr std::array<std::pair<std::string_view, DataKind>, 4> kKind{{{"time_series", DataKind::time_series},
                                                                      {"composition", DataKind::composition},
                                                                      {"specimen", DataKind::specimen},
                                                                      {"other", DataKind::other}}};
constexpr std::array<std::pair<std::string_view, Granularity>, 4> kGranularity{{{"daily", Granularity::daily},
                                                                                {"hourly", Granularity::hourly},
                                                                                {"monthly", Granularity::monthly},
                                                                                {"static", Granularity::static_}}};
constexpr std::array<std::pair<std::string_view, DataFormat>, 3> kFormat{
    {{"netcdf", DataFormat::netcdf}, {"cdf", DataFormat::cdf}, {"other", DataFormat::other}}};
constexpr std::array<std::pair<std::string_view, ScoreMethod>, 2> kMethod{
    {{"pearson", ScoreMethod::pearson}, {"emd", ScoreMethod::emd}}};
constexpr std::array<std::pair<std::string_view, ValidationCode>, 7> kValidation{{
    {"MissingId", ValidationCode::MissingId},
    {"InvalidSlug", ValidationCode::InvalidSlug},
    {"MissingTitle", ValidationCode::MissingTitle},
    {"InvertedTimeSpan", ValidationCode::InvertedTimeSpan},
    {"SnippetTooLong", ValidationCode::SnippetTooLong},
    {"UnresolvedConfig", ValidationCode::UnresolvedConfig},
    {"TimeSeriesWithoutTimedConfig", ValidationCode::TimeSeriesWithoutTimedConfig},
}};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

}  // namespace

std::string_view to_string(Lang v) { return name_of(v, kLang); }
std::string_view to_string(SourceSchema v) { return name_of(v, kSchema); }
std::string_view to_string(DataKind v) { return name_of(v, kKind); }
std::string_view to_string(Granularity v) { return name_of(v, kGranularity); }
std::string_view to_string(DataFormat v) { return name_of(v, kFormat); }
std::string_view to_string(ScoreMethod v) { return name_of(v, kMethod); }
std::string_view to_string(ValidationCode v) { return name_of(v, kValidation); }

Lang parse_lang(std::string_view s) { return parse_enum(s, kLang, "language"); }
SourceSchema parse_source_schema(std::string_view s) { return parse_enum(s, kSchema, "source schema"); }
DataKind parse_data_kind(std::string_view s) { return parse_enum(s, kKind, "data kind"); }
Granularity parse_granularity(std::string_view s) { return parse_enum(s, kGranularity, "granularity"); }
DataFormat parse_data_format(std::string_view s) { return parse_enum(s, kFormat, "format"); }
ScoreMethod parse_score_method(std::string_view s) { return parse_enum(s, kMethod, "score method"); }

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool is_valid_slug(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

bool ValidationReport::has(ValidationCode code) const {
  return std::any_of(errors.begin(), errors.end(), [&](const ValidationIssue& i) { return i.code == code; });
}

const DatasetConfig* CatalogSnapshot::config_for(const DatasetRecord& record) const {
  auto it = configs.find(record.config_ref);
  return it == configs.end() ? nullptr : &it->second;
}

const AvailabilityManifest& CatalogSnapshot::manifest_for(const DatasetConfig& config) const {
  static const AvailabilityManifest kEmpty;
  auto it = manifests.find(config.id);
  return it == manifests.end() ? kEmpty : it->second;
}

ValidationReport validate_record(const DatasetRecord& record,
                                 const std::map<std::string, DatasetConfig>& configs) {
  ValidationReport report;
  auto add = [&](ValidationCode code, std::string message) {
    report.errors.push_back({code, std::move(message)});
  };

  if (record.id.empty())
    add(ValidationCode::MissingId, "record id is empty");
  else if (!is_valid_slug(record.id))
    add(ValidationCode::InvalidSlug, "id '" + record.id + "' is not a lowercase URL-safe slug");

  if (blank(record.title.en)) add(ValidationCode::MissingTitle, "English title is empty");

  if (record.temporal_coverage && record.temporal_coverage->end < record.temporal_coverage->start)
    add(ValidationCode::InvertedTimeSpan, "temporal coverage ends before it starts");

  if (utf8_length(record.snippet.en) > kSnippetMaxChars ||
      (record.snippet.ja && utf8_length(*record.snippet.ja) > kSnippetMaxChars))
    add(ValidationCode::SnippetTooLong, "snippet exceeds " + std::to_string(kSnippetMaxChars) + " characters");

  auto config = configs.find(record.config_ref);
  if (config == configs.end()) {
    add(ValidationCode::UnresolvedConfig, "config_ref '" + record.config_ref + "' does not resolve");
  } else if (record.data_kind == DataKind::time_series) {
    bool timed = config->second.granularity != Granularity::static_;
    if (timed) {
      try {
        timed = FilenameTemplate::parse(config->second.data_url_template).has_time_tokens();
      } catch (const Error&) {
        timed = false;
      }
    }
    if (!timed)
      add(ValidationCode::TimeSeriesWithoutTimedConfig,
          "time-series record needs a config with a time-granular template");
  }
  return report;
}

void check_integrity(const CatalogSnapshot& snapshot) {
  for (const auto& [id, record] : snapshot.records) {
    if (id != record.id) throw Error(Errc::IntegrityError, "record key '" + id + "' differs from its id");
    if (!snapshot.configs.contains(record.config_ref))
      throw Error(Errc::IntegrityError,
                  "record '" + id + "' references missing config '" + record.config_ref + "'");
  }
  for (const auto& [id, config] : snapshot.configs)
    if (id != config.id) throw Error(Errc::IntegrityError, "config key '" + id + "' differs from its id");
  for (const auto& s : snapshot.scores) {
    if (!snapshot.records.contains(s.dataset_a) || !snapshot.records.contains(s.dataset_b))
      throw Error(Errc::IntegrityError,
                  "score references unknown dataset '" + s.dataset_a + "'/'" + s.dataset_b + "'");
  }
}

}  // namespace rdcat
