#include "camel/model_file.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "camel/error.hpp"

namespace camel {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Eigen::Index expected_cols) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::parse_error, "matrix must be a nonempty array");
  Matrix m(static_cast<Eigen::Index>(rows.size()), expected_cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != expected_cols) {
      throw Error(ErrorCode::parse_error, "matrix row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number()) throw Error(ErrorCode::parse_error, "matrix entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string schema_fingerprint(const std::vector<std::string>& feature_columns) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](unsigned char byte) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  };
  for (const auto& name : feature_columns) {
    for (unsigned char ch : name) mix(ch);
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

json to_json(const TrainConfig& cfg) {
  json j;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  j["proj_dim"] = cfg.proj_dim ? json(*cfg.proj_dim) : json(nullptr);
  j["max_iters"] = cfg.max_iters;
  j["rel_tol"] = cfg.rel_tol;
  if (const auto* fixed = std::get_if<FixedStep>(&cfg.step)) {
    j["step"] = {{"policy", "fixed"}, {"eta", fixed->eta}};
  } else {
    const auto& bt = std::get<Backtracking>(cfg.step);
    j["step"] = {{"policy", "backtracking"}, {"eta0", bt.eta0}, {"shrink", bt.shrink}, {"growth", bt.growth}};
  }
  if (const auto* gauss = std::get_if<SeededGaussian>(&cfg.init)) {
    j["init"] = {{"policy", "seeded_gaussian"}, {"sigma", gauss->sigma}};
  } else {
    j["init"] = {{"policy", "scaled_identity"}};
  }
  j["seed"] = cfg.seed;
  j["pair_cap"] = cfg.pair_cap ? json(*cfg.pair_cap) : json(nullptr);
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "train config must be a JSON object");
  TrainConfig cfg;
  try {
    cfg.lambda1 = j.value("lambda1", cfg.lambda1);
    cfg.lambda2 = j.value("lambda2", cfg.lambda2);
    if (j.contains("proj_dim") && !j["proj_dim"].is_null()) cfg.proj_dim = j["proj_dim"].get<Eigen::Index>();
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
    if (j.contains("step")) {
      const json& s = j["step"];
      const std::string policy = s.value("policy", std::string("backtracking"));
      if (policy == "fixed") {
        cfg.step = FixedStep{s.value("eta", FixedStep{}.eta)};
      } else if (policy == "backtracking") {
        const Backtracking d;
        cfg.step = Backtracking{s.value("eta0", d.eta0), s.value("shrink", d.shrink), s.value("growth", d.growth)};
      } else {
        throw Error(ErrorCode::parse_error, "unknown step policy '" + policy + "'");
      }
    }
    if (j.contains("init")) {
      const json& s = j["init"];
      const std::string policy = s.value("policy", std::string("scaled_identity"));
      if (policy == "seeded_gaussian") {
        cfg.init = SeededGaussian{s.value("sigma", SeededGaussian{}.sigma)};
      } else if (policy == "scaled_identity") {
        cfg.init = ScaledIdentity{};
      } else {
        throw Error(ErrorCode::parse_error, "unknown init policy '" + policy + "'");
      }
    }
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("pair_cap") && !j["pair_cap"].is_null()) cfg.pair_cap = j["pair_cap"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad train config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const DatasetSchema& schema) {
  json j;
  j["feature_columns"] = schema.feature_columns;
  j["label_column"] = schema.label_column;
  j["confidence_column"] = schema.confidence_column ? json(*schema.confidence_column) : json(nullptr);
  j["id_column"] = schema.id_column ? json(*schema.id_column) : json(nullptr);
  return j;
}

DatasetSchema schema_from_json(const json& j) {
  DatasetSchema schema;
  try {
    schema.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    schema.label_column = j.value("label_column", schema.label_column);
    if (j.contains("confidence_column") && !j["confidence_column"].is_null())
      schema.confidence_column = j["confidence_column"].get<std::string>();
    if (j.contains("id_column") && !j["id_column"].is_null()) schema.id_column = j["id_column"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad schema: ") + e.what());
  }
  schema.validate();
  return schema;
}

std::string serialize_model(const ModelFile& model) {
  json j;
  j["format"] = "camel-model";
  j["version"] = kModelFormatVersion;
  j["fingerprint"] = model.fingerprint();
  j["schema"] = to_json(model.schema);
  j["train_config"] = to_json(model.config);
  j["metric"] = {{"rows", model.metric.rows()}, {"cols", model.metric.cols()},
                 {"values", matrix_to_json(model.metric.matrix())}};
  j["reference"] = {{"features", matrix_to_json(model.reference.features())},
                    {"labels", std::vector<int>(model.reference.labels().begin(), model.reference.labels().end())}};
  return j.dump() + "\n";
}

ModelFile deserialize_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != "camel-model") {
      throw Error(ErrorCode::parse_error, "not a camel model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::parse_error, "unsupported model format version " + std::to_string(version));
    }
    DatasetSchema schema = schema_from_json(j.at("schema"));
    TrainConfig config = train_config_from_json(j.at("train_config"));
    const json& m = j.at("metric");
    const auto cols = m.at("cols").get<Eigen::Index>();
    Matrix factor = matrix_from_json(m.at("values"), cols);
    if (factor.rows() != m.at("rows").get<Eigen::Index>()) {
      throw Error(ErrorCode::parse_error, "metric row count disagrees with its values");
    }
    if (static_cast<Eigen::Index>(schema.feature_columns.size()) != cols) {
      throw Error(ErrorCode::parse_error, "metric columns disagree with the schema feature count");
    }
    const json& ref = j.at("reference");
    Matrix ref_x = matrix_from_json(ref.at("features"), cols);
    std::vector<int> ref_y = ref.at("labels").get<std::vector<int>>();
    ModelFile model{MetricParam(std::move(factor)), config, std::move(schema),
                    Dataset(std::move(ref_x), std::move(ref_y))};
    if (j.at("fingerprint").get<std::string>() != model.fingerprint()) {
      throw Error(ErrorCode::parse_error, "stored fingerprint does not match the schema");
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse_error) throw;
    throw Error(ErrorCode::parse_error, std::string("inconsistent model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  out << serialize_model(model);
  if (!out) throw Error(ErrorCode::io_error, "failed writing '" + path.string() + "'");
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace camel
