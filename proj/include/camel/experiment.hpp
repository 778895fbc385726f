#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "camel/data_io.hpp"
#include "camel/optimizer.hpp"
#include "camel/types.hpp"

namespace camel {

enum class Method { camel, camel_cl };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct CsvSource {
  std::filesystem::path path;
  DatasetSchema schema;
};

using DataSource = std::variant<SynthConfig, CsvSource>;

/// Learning-curve protocol: per trial, a seeded train/validation/test split;
/// for each nested training prefix and method, pick the grid cell with the
/// best validation AUROC and report its test metrics.
struct ExperimentConfig {
  int trials = 20;
  std::vector<std::size_t> train_sizes{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  /// Rows drawn for training in each trial; defaults to the largest train size.
  std::optional<std::size_t> train_pool;
  std::vector<double> lambda1_grid{0.1, 0.3, 1.0, 3.0, 10.0, 30.0};
  std::vector<double> lambda2_grid{0.1, 0.3, 1.0, 3.0};
  std::vector<Method> methods{Method::camel, Method::camel_cl};
  std::uint64_t seed = 0;
  DataSource data = SynthConfig{};
  /// Optimizer settings shared by every fit; lambdas and seed are overridden.
  TrainConfig train;

  std::size_t pool_size() const;
  void validate(std::size_t available) const;
};

/// Relative CSV paths resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct GridCell {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::optional<double> validation_auroc;
  std::string error;
};

struct ResultRecord {
  int trial = 0;
  std::size_t train_size = 0;
  Method method = Method::camel;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double validation_auroc = 0.0;
  double test_auroc = 0.0;
  double sparsity = 0.0;
  int row_rank = 0;
  int n_zero_rows = 0;
  int iterations = 0;
  std::string status;
  /// Nonempty when the record failed; metric fields are then meaningless.
  std::string error;
  std::vector<GridCell> grid;

  bool ok() const { return error.empty(); }
};

struct SummaryRow {
  std::size_t train_size = 0;
  Method method = Method::camel;
  std::size_t count = 0;
  double mean_auroc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_sparsity = 0.0;
  double mean_row_rank = 0.0;
};

/// Records in canonical (trial, train size, method) order.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, const Dataset& data);
/// Materializes the configured data source first.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

Dataset load_source(const DataSource& source);

/// Mean test AUROC with a normal-approximation 95% interval (mean +/- 1.96 SE)
/// per (train size, method), over the successful records.
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRecord>& records);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);
/// Every evaluated grid cell, for auditing the hyperparameter choice.
void write_grid_csv(const std::filesystem::path& path, const std::vector<ResultRecord>& records);

}  // namespace camel
