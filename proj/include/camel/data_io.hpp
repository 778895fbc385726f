#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camel/types.hpp"

namespace camel {

/// Which CSV columns feed a Dataset.
struct DatasetSchema {
  std::vector<std::string> feature_columns;
  std::string label_column = "y";
  std::optional<std::string> confidence_column;
  std::optional<std::string> id_column;

  /// Throws validation on empty feature list or repeated names.
  void validate() const;
  friend bool operator==(const DatasetSchema&, const DatasetSchema&) = default;
};

/// Raw header plus string cells. Comma separated, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws schema_mismatch if absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
/// Parses a whole cell as a finite double; nullopt otherwise.
std::optional<double> parse_double(std::string_view text);

/// Every column not claimed as label, confidence or id, in header order.
std::vector<std::string> default_feature_columns(const std::vector<std::string>& header,
                                                 std::optional<std::string_view> label_column,
                                                 std::optional<std::string_view> confidence_column,
                                                 std::optional<std::string_view> id_column);

/// Dense feature block for `columns` (no label needed). Errors name the line,
/// column and offending text.
Matrix feature_matrix(const CsvTable& table, const std::vector<std::string>& columns);

struct LoadedDataset {
  Dataset data;
  /// Values of the id column, or the 0-based row index when there is none.
  std::vector<std::string> ids;
};

LoadedDataset to_dataset(const CsvTable& table, const DatasetSchema& schema);
LoadedDataset load_csv_with_ids(const std::filesystem::path& path, const DatasetSchema& schema);
Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

/// Writes `data` under `schema` column names. Feature values round-trip exactly.
void save_csv(const std::filesystem::path& path, const Dataset& data, const DatasetSchema& schema,
              const std::vector<std::string>& ids = {});

struct SynthConfig {
  std::size_t n = 400;
  Eigen::Index m = 10;
  Eigen::Index m_informative = 2;
  /// Fraction of instances labelled 1.
  double class_balance = 0.5;
  /// Distance between class means, in within-class standard deviations.
  double cluster_separation = 4.0;
  /// Std of Gaussian noise added to the own-label posterior before clamping.
  double confidence_noise = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthData {
  Dataset data;
  /// Exact P(y = 1 | x) under the generating mixture.
  std::vector<double> posteriors;
};

/// Two unit-covariance Gaussian classes whose means differ only along the
/// first m_informative coordinates. Confidence labels are noisy versions of
/// each instance's posterior for its own label.
SynthData synth_generate(const SynthConfig& cfg);

/// Column names used for generated data: id, f0..f{m-1}, y, c.
DatasetSchema synth_schema(Eigen::Index m);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded uniform choice of train_n training rows; the remainder is halved
/// with the extra row going to validation. Train indices keep their random
/// order, so prefixes of `train` are nested random subsets.
SplitIndices split_indices(std::size_t n, std::size_t train_n, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset validation;
  Dataset test;
  SplitIndices indices;
};

Split split(const Dataset& data, std::size_t train_n, std::uint64_t seed);

}  // namespace camel
