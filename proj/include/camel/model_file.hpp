#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "camel/data_io.hpp"
#include "camel/optimizer.hpp"
#include "camel/types.hpp"

namespace camel {

inline constexpr int kModelFormatVersion = 1;

/// FNV-1a 64 over the ordered feature names, as 16 hex digits.
std::string schema_fingerprint(const std::vector<std::string>& feature_columns);

/// A trained metric with everything needed to score new rows: the training
/// config, the column schema, and the labelled reference instances the
/// class similarity scores average over.
struct ModelFile {
  MetricParam metric;
  TrainConfig config;
  DatasetSchema schema;
  Dataset reference;

  std::string fingerprint() const { return schema_fingerprint(schema.feature_columns); }
};

nlohmann::json to_json(const TrainConfig& cfg);
/// Missing keys keep their TrainConfig defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DatasetSchema& schema);
DatasetSchema schema_from_json(const nlohmann::json& j);

std::string serialize_model(const ModelFile& model);
/// Throws parse_error on malformed or inconsistent content.
ModelFile deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace camel
