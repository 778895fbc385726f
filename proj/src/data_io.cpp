#include "camel/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "camel/error.hpp"
#include "random.hpp"

namespace camel {
namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      return cells;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Data rows start on line 2 of the file.
std::string location(std::size_t row, std::string_view column) {
  return "line " + std::to_string(row + 2) + ", column '" + std::string(column) + "'";
}

double parse_cell(const CsvTable& table, std::size_t row, std::size_t col) {
  const std::string& text = table.rows[row][col];
  const auto value = parse_double(text);
  if (!value) {
    throw Error(ErrorCode::parse_error,
                location(row, table.header[col]) + ": cannot parse '" + text + "' as a finite number");
  }
  return *value;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void DatasetSchema::validate() const {
  if (feature_columns.empty()) throw Error(ErrorCode::validation, "schema needs at least one feature column");
  std::set<std::string> seen;
  auto claim = [&](const std::string& name) {
    if (name.empty()) throw Error(ErrorCode::validation, "schema column names must be nonempty");
    if (!seen.insert(name).second) throw Error(ErrorCode::validation, "schema repeats column '" + name + "'");
  };
  for (const auto& f : feature_columns) claim(f);
  claim(label_column);
  if (confidence_column) claim(*confidence_column);
  if (id_column) claim(*id_column);
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::schema_mismatch, "CSV has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(table.header.size()) + " cells, found " +
                                              std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw Error(ErrorCode::parse_error, "'" + path.string() + "' has no header row");
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  if (!out) throw Error(ErrorCode::io_error, "failed writing '" + path.string() + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string> default_feature_columns(const std::vector<std::string>& header,
                                                 std::optional<std::string_view> label_column,
                                                 std::optional<std::string_view> confidence_column,
                                                 std::optional<std::string_view> id_column) {
  std::vector<std::string> features;
  for (const auto& name : header) {
    if (name == label_column || name == confidence_column || name == id_column) continue;
    features.push_back(name);
  }
  return features;
}

Matrix feature_matrix(const CsvTable& table, const std::vector<std::string>& columns) {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(table.column(c));
  Matrix x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t k = 0; k < idx.size(); ++k)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = parse_cell(table, r, idx[k]);
  return x;
}

LoadedDataset to_dataset(const CsvTable& table, const DatasetSchema& schema) {
  schema.validate();
  if (table.rows.empty()) throw Error(ErrorCode::validation, "CSV has no data rows");
  Matrix x = feature_matrix(table, schema.feature_columns);

  const std::size_t label_col = table.column(schema.label_column);
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double v = parse_cell(table, r, label_col);
    if (v != 0.0 && v != 1.0) {
      throw Error(ErrorCode::validation,
                  location(r, schema.label_column) + ": label '" + table.rows[r][label_col] + "' is not 0 or 1");
    }
    labels.push_back(static_cast<int>(v));
  }

  std::optional<std::vector<double>> confidences;
  if (schema.confidence_column) {
    const std::size_t col = table.column(*schema.confidence_column);
    std::vector<double> values;
    std::size_t missing = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string& text = table.rows[r][col];
      if (text.empty()) {
        ++missing;
        continue;
      }
      const double v = parse_cell(table, r, col);
      if (v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::validation,
                    location(r, *schema.confidence_column) + ": confidence '" + text + "' is outside [0, 1]");
      }
      values.push_back(v);
    }
    if (missing != 0 && missing != table.rows.size()) {
      throw Error(ErrorCode::validation, "column '" + *schema.confidence_column + "' has " +
                                             std::to_string(missing) + " empty cells out of " +
                                             std::to_string(table.rows.size()) +
                                             "; confidences must be all present or all absent");
    }
    if (missing == 0) confidences = std::move(values);
  }

  std::vector<std::string> ids;
  ids.reserve(table.rows.size());
  if (schema.id_column) {
    const std::size_t col = table.column(*schema.id_column);
    for (const auto& row : table.rows) ids.push_back(row[col]);
  } else {
    for (std::size_t r = 0; r < table.rows.size(); ++r) ids.push_back(std::to_string(r));
  }
  return {Dataset(std::move(x), std::move(labels), std::move(confidences)), std::move(ids)};
}

LoadedDataset load_csv_with_ids(const std::filesystem::path& path, const DatasetSchema& schema) {
  return to_dataset(read_csv(path), schema);
}

Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
  return load_csv_with_ids(path, schema).data;
}

void save_csv(const std::filesystem::path& path, const Dataset& data, const DatasetSchema& schema,
              const std::vector<std::string>& ids) {
  schema.validate();
  if (static_cast<Eigen::Index>(schema.feature_columns.size()) != data.dim()) {
    throw Error(ErrorCode::invalid_argument, "schema feature count does not match data dimension");
  }
  if (!ids.empty() && ids.size() != data.size()) {
    throw Error(ErrorCode::invalid_argument, "id count does not match data size");
  }
  CsvTable table;
  if (schema.id_column) table.header.push_back(*schema.id_column);
  table.header.insert(table.header.end(), schema.feature_columns.begin(), schema.feature_columns.end());
  table.header.push_back(schema.label_column);
  const bool write_conf = schema.confidence_column.has_value();
  if (write_conf) table.header.push_back(*schema.confidence_column);

  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> row;
    if (schema.id_column) row.push_back(ids.empty() ? std::to_string(i) : ids[i]);
    for (Eigen::Index c = 0; c < data.dim(); ++c) {
      row.push_back(format_double(data.features()(static_cast<Eigen::Index>(i), c)));
    }
    row.push_back(std::to_string(data.label(i)));
    if (write_conf) row.push_back(data.has_confidences() ? format_double((*data.confidences())[i]) : "");
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

void SynthConfig::validate() const {
  if (n < 4) throw Error(ErrorCode::validation, "synthetic n must be at least 4");
  if (m < 1 || m_informative < 1 || m_informative > m) {
    throw Error(ErrorCode::validation, "need 1 <= m_informative <= m");
  }
  if (!(class_balance > 0.0 && class_balance < 1.0)) {
    throw Error(ErrorCode::validation, "class_balance must lie in (0, 1)");
  }
  if (!(cluster_separation >= 0.0) || !std::isfinite(cluster_separation)) {
    throw Error(ErrorCode::validation, "cluster_separation must be finite and nonnegative");
  }
  if (!(confidence_noise >= 0.0) || !std::isfinite(confidence_noise)) {
    throw Error(ErrorCode::validation, "confidence_noise must be finite and nonnegative");
  }
}

SynthData synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto positives = static_cast<std::size_t>(std::llround(cfg.class_balance * static_cast<double>(cfg.n)));
  const std::size_t negatives = cfg.n - std::min(positives, cfg.n);
  if (positives < 2 || negatives < 2) {
    throw Error(ErrorCode::validation, "n = " + std::to_string(cfg.n) + " at class_balance " +
                                           format_double(cfg.class_balance) +
                                           " leaves fewer than 2 instances in a class");
  }

  detail::Rng rng(cfg.seed);
  std::vector<int> labels(cfg.n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(positives), 1);
  detail::shuffle(std::span<int>(labels), rng);

  // Means are +/- (s/2) u with u the unit diagonal of the informative block,
  // so the log posterior odds are logit(balance) + s * u.x.
  const double coord_offset = 0.5 * cfg.cluster_separation / std::sqrt(static_cast<double>(cfg.m_informative));
  const double prior_logit = std::log(cfg.class_balance / (1.0 - cfg.class_balance));
  const double projection_weight = cfg.cluster_separation / std::sqrt(static_cast<double>(cfg.m_informative));

  Matrix x(static_cast<Eigen::Index>(cfg.n), cfg.m);
  std::vector<double> posteriors(cfg.n);
  std::vector<double> confidences(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double sign = labels[i] == 1 ? 1.0 : -1.0;
    double informative_sum = 0.0;
    for (Eigen::Index c = 0; c < cfg.m; ++c) {
      double v = detail::standard_normal(rng);
      if (c < cfg.m_informative) {
        v += sign * coord_offset;
        informative_sum += v;
      }
      x(row, c) = v;
    }
    posteriors[i] = sigmoid(prior_logit + projection_weight * informative_sum);
    const double own = labels[i] == 1 ? posteriors[i] : 1.0 - posteriors[i];
    const double noisy = own + cfg.confidence_noise * detail::standard_normal(rng);
    confidences[i] = std::clamp(noisy, 0.0, 1.0);
  }
  return {Dataset(std::move(x), std::move(labels), std::move(confidences)), std::move(posteriors)};
}

DatasetSchema synth_schema(Eigen::Index m) {
  DatasetSchema schema;
  for (Eigen::Index c = 0; c < m; ++c) schema.feature_columns.push_back("f" + std::to_string(c));
  schema.label_column = "y";
  schema.confidence_column = "c";
  schema.id_column = "id";
  return schema;
}

SplitIndices split_indices(std::size_t n, std::size_t train_n, std::uint64_t seed) {
  if (train_n < 1 || train_n + 2 > n) {
    throw Error(ErrorCode::validation, "train size " + std::to_string(train_n) + " must be in [1, " +
                                           std::to_string(n < 2 ? 0 : n - 2) + "] for " + std::to_string(n) +
                                           " instances");
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  detail::Rng rng(detail::derive_seed(seed, detail::kSplitStream));
  detail::shuffle(std::span<std::size_t>(perm), rng);

  const std::size_t remainder = n - train_n;
  const std::size_t validation_n = remainder - remainder / 2;
  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_n));
  out.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_n),
                        perm.begin() + static_cast<std::ptrdiff_t>(train_n + validation_n));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_n + validation_n), perm.end());
  return out;
}

Split split(const Dataset& data, std::size_t train_n, std::uint64_t seed) {
  SplitIndices idx = split_indices(data.size(), train_n, seed);
  Dataset train = data.subset(idx.train);
  Dataset validation = data.subset(idx.validation);
  Dataset test = data.subset(idx.test);
  return {std::move(train), std::move(validation), std::move(test), std::move(idx)};
}

}  // namespace camel
