#pragma once

#include <string_view>

#include "rdcat/model.hpp"

namespace rdcat {

// Parses one per-dataset YAML document, e.g.
//
//   id: syowa-mag
//   data_url_template: https://example.org/mag/%YYYY/%YYYY-%mm-%dd.nc
//   granularity: daily
//   format: netcdf
//   conversion_enabled: true
//
// show_visualized and download_enabled default to true, conversion_enabled
// to false. Throws Error with ParseError, InvalidTemplate or
// InconsistentConfig.
DatasetConfig load_dataset_config(std::string_view yaml_text);

// Checks template tokens and cross-field rules on an already-built config.
void validate_config(const DatasetConfig& config);

}  // namespace rdcat
