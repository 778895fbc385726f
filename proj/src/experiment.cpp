#include "camel/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "camel/error.hpp"
#include "camel/evaluation.hpp"
#include "camel/metric.hpp"
#include "camel/model_file.hpp"
#include "random.hpp"

namespace camel {
namespace {

using nlohmann::json;

constexpr std::uint64_t kTrialStreamBase = 100;

std::string fmt(double v) { return format_double(v); }

struct CellOutcome {
  GridCell cell;
  std::optional<FitResult> fit;
};

CellOutcome evaluate_cell(const Dataset& train, const Dataset& validation, const TrainConfig& base, double lambda1,
                          double lambda2, std::uint64_t seed) {
  CellOutcome out;
  out.cell.lambda1 = lambda1;
  out.cell.lambda2 = lambda2;
  try {
    TrainConfig cfg = base;
    cfg.lambda1 = lambda1;
    cfg.lambda2 = lambda2;
    cfg.seed = seed;
    FitResult fitted = fit(train, cfg);
    const auto scores = class1_confidences(fitted.metric, train, validation.features());
    out.cell.validation_auroc = auroc(scores, validation.labels());
    out.fit = std::move(fitted);
  } catch (const Error& e) {
    out.cell.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return out;
}

ResultRecord run_cell(const ExperimentConfig& cfg, int trial, std::size_t train_size, Method method,
                      const Dataset& train, const Dataset& validation, const Dataset& test, std::uint64_t seed) {
  ResultRecord record;
  record.trial = trial;
  record.train_size = train_size;
  record.method = method;

  const std::vector<double> no_ranking{0.0};
  const auto& lambda2_values = method == Method::camel_cl ? cfg.lambda2_grid : no_ranking;

  std::optional<FitResult> best;
  for (double l1 : cfg.lambda1_grid) {
    for (double l2 : lambda2_values) {
      CellOutcome outcome = evaluate_cell(train, validation, cfg.train, l1, l2, seed);
      // Strictly better only: the first cell in declaration order wins ties.
      if (outcome.cell.validation_auroc &&
          (!best || *outcome.cell.validation_auroc > record.validation_auroc)) {
        record.validation_auroc = *outcome.cell.validation_auroc;
        record.lambda1 = l1;
        record.lambda2 = l2;
        best = std::move(outcome.fit);
      }
      record.grid.push_back(std::move(outcome.cell));
    }
  }
  if (!best) {
    record.error = record.grid.empty() ? "empty grid" : record.grid.front().error;
    return record;
  }
  try {
    const auto scores = class1_confidences(best->metric, train, test.features());
    record.test_auroc = auroc(scores, test.labels());
  } catch (const Error& e) {
    record.error = std::string(to_string(e.code())) + ": " + e.what();
    return record;
  }
  record.sparsity = sparsity(best->metric);
  record.row_rank = row_rank(best->metric);
  record.n_zero_rows = zero_rows(best->metric);
  record.iterations = static_cast<int>(best->trace.records.size()) - 1;
  record.status = std::string(to_string(best->trace.status));
  return record;
}

std::vector<double> number_list(const json& j, const char* key) {
  try {
    return j.at(key).get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(Method method) { return method == Method::camel ? "camel" : "camel_cl"; }

Method method_from_string(std::string_view name) {
  if (name == "camel") return Method::camel;
  if (name == "camel_cl" || name == "camel-cl") return Method::camel_cl;
  throw Error(ErrorCode::parse_error, "unknown method '" + std::string(name) + "'");
}

std::size_t ExperimentConfig::pool_size() const {
  if (train_pool) return *train_pool;
  return train_sizes.empty() ? 0 : *std::max_element(train_sizes.begin(), train_sizes.end());
}

void ExperimentConfig::validate(std::size_t available) const {
  if (trials < 1) throw Error(ErrorCode::validation, "trials must be positive");
  if (train_sizes.empty()) throw Error(ErrorCode::validation, "train_sizes must be nonempty");
  for (std::size_t i = 0; i < train_sizes.size(); ++i) {
    if (train_sizes[i] < 1) throw Error(ErrorCode::validation, "train sizes must be positive");
    if (i > 0 && train_sizes[i] <= train_sizes[i - 1]) {
      throw Error(ErrorCode::validation, "train_sizes must be strictly ascending");
    }
  }
  if (train_sizes.back() > pool_size()) throw Error(ErrorCode::validation, "train sizes exceed the train pool");
  if (pool_size() + 2 > available) {
    throw Error(ErrorCode::validation, "train pool of " + std::to_string(pool_size()) + " leaves fewer than 2 of " +
                                           std::to_string(available) + " rows for validation and test");
  }
  if (methods.empty()) throw Error(ErrorCode::validation, "methods must be nonempty");
  if (lambda1_grid.empty()) throw Error(ErrorCode::validation, "lambda1 grid must be nonempty");
  const bool needs_lambda2 = std::find(methods.begin(), methods.end(), Method::camel_cl) != methods.end();
  if (needs_lambda2 && lambda2_grid.empty()) throw Error(ErrorCode::validation, "lambda2 grid must be nonempty");
  for (double v : lambda1_grid)
    if (!(v >= 0.0)) throw Error(ErrorCode::validation, "lambda1 grid values must be >= 0");
  for (double v : lambda2_grid)
    if (!(v >= 0.0)) throw Error(ErrorCode::validation, "lambda2 grid values must be >= 0");
  train.validate();
}

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.trials = j.value("trials", cfg.trials);
    if (j.contains("train_sizes")) cfg.train_sizes = j["train_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("train_pool") && !j["train_pool"].is_null()) cfg.train_pool = j["train_pool"].get<std::size_t>();
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& name : j["methods"]) cfg.methods.push_back(method_from_string(name.get<std::string>()));
    }
    if (j.contains("grid")) {
      const json& grid = j["grid"];
      if (grid.contains("lambda1")) cfg.lambda1_grid = number_list(grid, "lambda1");
      if (grid.contains("lambda2")) cfg.lambda2_grid = number_list(grid, "lambda2");
    }
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("train")) cfg.train = train_config_from_json(j["train"]);
    if (j.contains("data")) {
      const json& data = j["data"];
      if (data.contains("synthetic")) {
        const json& s = data["synthetic"];
        SynthConfig synth;
        synth.n = s.value("n", synth.n);
        synth.m = s.value("m", synth.m);
        synth.m_informative = s.value("m_informative", synth.m_informative);
        synth.class_balance = s.value("class_balance", synth.class_balance);
        synth.cluster_separation = s.value("cluster_separation", synth.cluster_separation);
        synth.confidence_noise = s.value("confidence_noise", synth.confidence_noise);
        synth.seed = s.value("seed", synth.seed);
        synth.validate();
        cfg.data = synth;
      } else if (data.contains("csv")) {
        const json& c = data["csv"];
        CsvSource source;
        source.path = c.at("path").get<std::string>();
        if (source.path.is_relative() && !base_dir.empty()) source.path = base_dir / source.path;
        source.schema.label_column = c.value("label", std::string("y"));
        if (c.contains("confidence") && !c["confidence"].is_null())
          source.schema.confidence_column = c["confidence"].get<std::string>();
        if (c.contains("id") && !c["id"].is_null()) source.schema.id_column = c["id"].get<std::string>();
        if (c.contains("features")) source.schema.feature_columns = c["features"].get<std::vector<std::string>>();
        cfg.data = source;
      } else {
        throw Error(ErrorCode::parse_error, "data must contain 'synthetic' or 'csv'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad experiment config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

Dataset load_source(const DataSource& source) {
  if (const auto* synth = std::get_if<SynthConfig>(&source)) return synth_generate(*synth).data;
  const auto& csv = std::get<CsvSource>(source);
  const CsvTable table = read_csv(csv.path);
  DatasetSchema schema = csv.schema;
  if (schema.feature_columns.empty()) {
    schema.feature_columns =
        default_feature_columns(table.header, schema.label_column, schema.confidence_column, schema.id_column);
  }
  return to_dataset(table, schema).data;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
  cfg.validate(data.size());
  std::vector<ResultRecord> records;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t trial_seed = detail::derive_seed(cfg.seed, kTrialStreamBase + static_cast<std::uint64_t>(trial));
    const Split parts = split(data, cfg.pool_size(), trial_seed);
    for (std::size_t size : cfg.train_sizes) {
      const std::span<const std::size_t> prefix(parts.indices.train.data(), size);
      const Dataset train = data.subset(prefix);
      for (Method method : cfg.methods) {
        records.push_back(run_cell(cfg, trial, size, method, train, parts.validation, parts.test, trial_seed));
      }
    }
  }
  return records;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, load_source(cfg.data));
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
  std::map<std::pair<std::size_t, int>, std::vector<const ResultRecord*>> groups;
  for (const auto& r : records) {
    auto& group = groups[{r.train_size, static_cast<int>(r.method)}];
    if (r.ok()) group.push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.train_size = key.first;
    row.method = static_cast<Method>(key.second);
    row.count = group.size();
    if (!group.empty()) {
      const double k = static_cast<double>(group.size());
      double auc_sum = 0.0, sparsity_sum = 0.0, rank_sum = 0.0;
      for (const auto* r : group) {
        auc_sum += r->test_auroc;
        sparsity_sum += r->sparsity;
        rank_sum += r->row_rank;
      }
      row.mean_auroc = auc_sum / k;
      row.mean_sparsity = sparsity_sum / k;
      row.mean_row_rank = rank_sum / k;
      double se = 0.0;
      if (group.size() > 1) {
        double ss = 0.0;
        for (const auto* r : group) ss += (r->test_auroc - row.mean_auroc) * (r->test_auroc - row.mean_auroc);
        se = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
      }
      row.ci_low = row.mean_auroc - 1.96 * se;
      row.ci_high = row.mean_auroc + 1.96 * se;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRecord>& records) {
  CsvTable table;
  table.header = {"trial",    "train_size", "method",   "lambda1",     "lambda2",    "validation_auroc", "test_auroc",
                  "sparsity", "row_rank",   "n_zero_rows", "iterations", "status",     "error"};
  for (const auto& r : records) {
    // Commas would break the unquoted CSV.
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    if (r.ok()) {
      table.rows.push_back({std::to_string(r.trial), std::to_string(r.train_size), std::string(to_string(r.method)),
                            fmt(r.lambda1), fmt(r.lambda2), fmt(r.validation_auroc), fmt(r.test_auroc),
                            fmt(r.sparsity), std::to_string(r.row_rank), std::to_string(r.n_zero_rows),
                            std::to_string(r.iterations), r.status, ""});
    } else {
      table.rows.push_back({std::to_string(r.trial), std::to_string(r.train_size), std::string(to_string(r.method)),
                            "", "", "", "", "", "", "", "", "", error});
    }
  }
  write_csv(path, table);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  CsvTable table;
  table.header = {"train_size", "method",        "count",         "mean_test_auroc",
                  "ci95_low",   "ci95_high",     "mean_sparsity", "mean_row_rank"};
  for (const auto& r : rows) {
    table.rows.push_back({std::to_string(r.train_size), std::string(to_string(r.method)), std::to_string(r.count),
                          fmt(r.mean_auroc), fmt(r.ci_low), fmt(r.ci_high), fmt(r.mean_sparsity),
                          fmt(r.mean_row_rank)});
  }
  write_csv(path, table);
}

void write_grid_csv(const std::filesystem::path& path, const std::vector<ResultRecord>& records) {
  CsvTable table;
  table.header = {"trial", "train_size", "method", "lambda1", "lambda2", "validation_auroc", "selected", "error"};
  for (const auto& r : records) {
    bool selected_seen = false;
    for (const auto& cell : r.grid) {
      const bool selected = r.ok() && !selected_seen && cell.validation_auroc && cell.lambda1 == r.lambda1 &&
                            cell.lambda2 == r.lambda2;
      selected_seen = selected_seen || selected;
      std::string error = cell.error;
      std::replace(error.begin(), error.end(), ',', ';');
      table.rows.push_back({std::to_string(r.trial), std::to_string(r.train_size), std::string(to_string(r.method)),
                            fmt(cell.lambda1), fmt(cell.lambda2),
                            cell.validation_auroc ? fmt(*cell.validation_auroc) : "", selected ? "1" : "0", error});
    }
  }
  write_csv(path, table);
}

}  // namespace camel
