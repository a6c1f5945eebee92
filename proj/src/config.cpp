#include "rdcat/config.hpp"

#include <cctype>
#include <string>

#include <yaml-cpp/yaml.h>

#include "rdcat/error.hpp"
#include "rdcat/filename_template.hpp"

namespace rdcat {

namespace {

bool is_absolute_url(std::string_view s) {
  auto sep = s.find("://");
  if (sep == std::string_view::npos || sep == 0) return false;
  for (std::size_t i = 0; i < sep; ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  return std::isalpha(static_cast<unsigned char>(s[0])) != 0;
}

void check_template(const std::string& text, const DatasetConfig& config, std::string_view field) {
  auto tmpl = FilenameTemplate::parse(text);
  if (!is_absolute_url(text))
    throw Error(Errc::InvalidTemplate, std::string(field) + " must be an absolute URL: '" + text + "'");

  auto inconsistent = [&](const std::string& why) {
    throw Error(Errc::InconsistentConfig, "config '" + config.id + "': " + std::string(field) + " " + why);
  };
  switch (config.granularity) {
    case Granularity::static_:
      if (tmpl.has_time_tokens()) inconsistent("has time tokens but granularity is static");
      break;
    case Granularity::monthly:
      if (tmpl.contains(TemplateToken::Day) || tmpl.contains(TemplateToken::Hour))
        inconsistent("uses day/hour tokens but granularity is monthly");
      break;
    case Granularity::daily:
      if (tmpl.contains(TemplateToken::Hour)) inconsistent("uses %HH but granularity is daily");
      break;
    case Granularity::hourly: break;
  }
}

template <typename T>
T scalar(const YAML::Node& doc, const char* key, T fallback) {
  const auto node = doc[key];
  if (!node || node.IsNull()) return fallback;
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    throw Error(Errc::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

void validate_config(const DatasetConfig& config) {
  if (config.id.empty()) throw Error(Errc::ParseError, "config is missing 'id'");
  if (config.data_url_template.empty())
    throw Error(Errc::ParseError, "config '" + config.id + "' is missing 'data_url_template'");
  check_template(config.data_url_template, config, "data_url_template");
  if (!config.visual_url_template.empty())
    check_template(config.visual_url_template, config, "visual_url_template");
  if (config.conversion_enabled && config.format != DataFormat::netcdf)
    throw Error(Errc::InconsistentConfig,
                "config '" + config.id + "': conversion_enabled requires format netcdf");
}

DatasetConfig load_dataset_config(std::string_view yaml_text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.IsMap()) throw Error(Errc::ParseError, "dataset config must be a YAML mapping");

  DatasetConfig config;
  config.id = scalar<std::string>(doc, "id", "");
  config.source_id = scalar<std::string>(doc, "source_id", "");
  config.data_url_template = scalar<std::string>(doc, "data_url_template", "");
  config.visual_url_template = scalar<std::string>(doc, "visual_url_template", "");
  config.granularity = parse_granularity(scalar<std::string>(doc, "granularity", "daily"));
  config.format = parse_data_format(scalar<std::string>(doc, "format", "other"));
  config.show_visualized = scalar<bool>(doc, "show_visualized", true);
  config.download_enabled = scalar<bool>(doc, "download_enabled", true);
  config.conversion_enabled = scalar<bool>(doc, "conversion_enabled", false);
  config.manifest_path = scalar<std::string>(doc, "manifest_path", "");
  config.score_variable = scalar<std::string>(doc, "score_variable", "");
  config.thumbnail = scalar<std::string>(doc, "thumbnail", "");
  if (auto kind = scalar<std::string>(doc, "data_kind", ""); !kind.empty()) config.data_kind = parse_data_kind(kind);

  if (const auto visuals = doc["static_visuals"]; visuals) {
    if (!visuals.IsSequence()) throw Error(Errc::ParseError, "static_visuals must be a list");
    for (const auto& v : visuals) config.static_visuals.push_back(v.as<std::string>());
  }

  validate_config(config);
  return config;
}

}  // namespace rdcat
