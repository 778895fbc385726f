// camel: train, apply and inspect sparse confidence-based metric models.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "camel/data_io.hpp"
#include "camel/error.hpp"
#include "camel/evaluation.hpp"
#include "camel/experiment.hpp"
#include "camel/metric.hpp"
#include "camel/model_file.hpp"
#include "camel/objective.hpp"
#include "camel/optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return names;
}

std::optional<std::string> opt_string(const std::string& value) {
  if (value.empty()) return std::nullopt;
  return value;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw camel::Error(camel::ErrorCode::io_error, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw camel::Error(camel::ErrorCode::parse_error, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void print_json(const json& j) { std::cout << j.dump() << '\n'; }

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string label = "y";
  std::string confidence;
  std::string id;
  std::string features;
  std::string config;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  long proj_dim = 0;
  int max_iters = 500;
  double rel_tol = 1e-6;
  std::string step = "backtracking";
  double eta = 1.0;
  std::string init = "identity";
  double sigma = 1.0;
  std::size_t pair_cap = 0;
  std::uint64_t seed = 0;
  std::string out = "model.json";
  std::string trace;
};

void write_trace(const fs::path& path, const camel::TrainTrace& trace) {
  camel::CsvTable table;
  table.header = {"iteration", "total", "pushpull", "l1", "ranking", "step", "sparsity"};
  for (const auto& r : trace.records) {
    table.rows.push_back({std::to_string(r.iteration), camel::format_double(r.total),
                          camel::format_double(r.pushpull), camel::format_double(r.l1),
                          camel::format_double(r.ranking), camel::format_double(r.step),
                          camel::format_double(r.sparsity)});
  }
  camel::write_csv(path, table);
}

int run_train(const TrainArgs& args, const CLI::App& cmd) {
  camel::TrainConfig cfg;
  if (!args.config.empty()) cfg = camel::train_config_from_json(read_json_file(args.config));
  if (cmd.count("--lambda1")) cfg.lambda1 = args.lambda1;
  if (cmd.count("--lambda2")) cfg.lambda2 = args.lambda2;
  if (cmd.count("--proj-dim")) cfg.proj_dim = args.proj_dim;
  if (cmd.count("--max-iters")) cfg.max_iters = args.max_iters;
  if (cmd.count("--rel-tol")) cfg.rel_tol = args.rel_tol;
  if (cmd.count("--step") || cmd.count("--eta")) {
    if (args.step == "fixed") {
      cfg.step = camel::FixedStep{args.eta};
    } else {
      camel::Backtracking bt;
      bt.eta0 = args.eta;
      cfg.step = bt;
    }
  }
  if (cmd.count("--init") || cmd.count("--sigma")) {
    if (args.init == "gaussian") {
      cfg.init = camel::SeededGaussian{args.sigma};
    } else {
      cfg.init = camel::ScaledIdentity{};
    }
  }
  if (cmd.count("--pair-cap")) cfg.pair_cap = args.pair_cap;
  if (cmd.count("--seed")) cfg.seed = args.seed;
  cfg.validate();

  const camel::CsvTable table = camel::read_csv(args.data);
  camel::DatasetSchema schema;
  schema.label_column = args.label;
  schema.confidence_column = opt_string(args.confidence);
  schema.id_column = opt_string(args.id);
  schema.feature_columns = args.features.empty()
                               ? camel::default_feature_columns(table.header, schema.label_column,
                                                                schema.confidence_column, schema.id_column)
                               : split_names(args.features);
  const camel::LoadedDataset loaded = camel::to_dataset(table, schema);

  camel::FitResult result = camel::fit(loaded.data, cfg);

  const camel::ModelFile model{result.metric, cfg, schema, loaded.data.without_confidences()};
  camel::save_model(args.out, model);
  const std::string trace_path = args.trace.empty() ? args.out + ".trace.csv" : args.trace;
  write_trace(trace_path, result.trace);

  const auto& last = result.trace.records.back();
  print_json({{"model", args.out},
              {"trace", trace_path},
              {"total", last.total},
              {"pushpull", last.pushpull},
              {"l1", last.l1},
              {"ranking", last.ranking},
              {"sparsity", camel::sparsity(result.metric)},
              {"row_rank", camel::row_rank(result.metric)},
              {"iterations", result.trace.records.size() - 1},
              {"status", camel::to_string(result.trace.status)},
              {"fingerprint", model.fingerprint()}});
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string data;
  double threshold = camel::kDefaultThreshold;
  std::string id;
  std::string label;
  std::string confidence;
  std::string features;
  std::string out = "predictions.csv";
};

int run_predict(const PredictArgs& args) {
  const camel::ModelFile model = camel::load_model(args.model);
  const camel::CsvTable table = camel::read_csv(args.data);

  // Columns the model itself treats as non-features stay excluded even when
  // the flags do not repeat them.
  std::vector<std::string> excluded = {model.schema.label_column};
  if (model.schema.confidence_column) excluded.push_back(*model.schema.confidence_column);
  if (model.schema.id_column) excluded.push_back(*model.schema.id_column);
  for (const auto* flag : {&args.id, &args.label, &args.confidence})
    if (!flag->empty()) excluded.push_back(*flag);

  std::vector<std::string> features;
  if (!args.features.empty()) {
    features = split_names(args.features);
  } else {
    for (const auto& name : table.header)
      if (std::find(excluded.begin(), excluded.end(), name) == excluded.end()) features.push_back(name);
  }
  const std::string data_fp = camel::schema_fingerprint(features);
  if (data_fp != model.fingerprint()) {
    throw camel::Error(camel::ErrorCode::schema_mismatch,
                       "model fingerprint " + model.fingerprint() + " does not match data fingerprint " + data_fp);
  }

  const camel::Matrix x = camel::feature_matrix(table, features);
  const auto scores = camel::class1_confidences(model.metric, model.reference, x);
  if (!(args.threshold > 0.0 && args.threshold < 1.0)) {
    throw camel::Error(camel::ErrorCode::invalid_argument, "threshold must lie in (0, 1)");
  }

  std::optional<std::size_t> id_col;
  if (!args.id.empty()) {
    id_col = table.column(args.id);
  } else if (model.schema.id_column && table.has_column(*model.schema.id_column)) {
    id_col = table.column(*model.schema.id_column);
  }

  camel::CsvTable out;
  out.header = {"id", "confidence", "predicted"};
  std::size_t positives = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int label = scores[r] > args.threshold ? 1 : 0;
    positives += static_cast<std::size_t>(label);
    out.rows.push_back({id_col ? table.rows[r][*id_col] : std::to_string(r), camel::format_double(scores[r]),
                        std::to_string(label)});
  }
  camel::write_csv(args.out, out);
  print_json({{"predictions", args.out},
              {"rows", table.rows.size()},
              {"predicted_positive", positives},
              {"threshold", args.threshold}});
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string predictions;
  std::string data;
  std::string label = "y";
  std::string id;
};

int run_evaluate(const EvaluateArgs& args) {
  const camel::CsvTable preds = camel::read_csv(args.predictions);
  const camel::CsvTable data = camel::read_csv(args.data);
  const std::size_t score_col = preds.column("confidence");
  const std::size_t pred_col = preds.column("predicted");
  const std::size_t label_col = data.column(args.label);

  // Rows pair up by id when an id column is named, otherwise by position.
  std::vector<std::size_t> data_row(preds.rows.size());
  if (!args.id.empty()) {
    const std::size_t data_id = data.column(args.id);
    const std::size_t pred_id = preds.column("id");
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < data.rows.size(); ++r) index.emplace(data.rows[r][data_id], r);
    for (std::size_t r = 0; r < preds.rows.size(); ++r) {
      const auto it = index.find(preds.rows[r][pred_id]);
      if (it == index.end()) {
        throw camel::Error(camel::ErrorCode::validation, "prediction id '" + preds.rows[r][pred_id] +
                                                             "' not found in the data file");
      }
      data_row[r] = it->second;
    }
  } else {
    if (preds.rows.size() != data.rows.size()) {
      throw camel::Error(camel::ErrorCode::validation, "predictions and data differ in row count");
    }
    std::iota(data_row.begin(), data_row.end(), std::size_t{0});
  }

  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < preds.rows.size(); ++r) {
    const auto score = camel::parse_double(preds.rows[r][score_col]);
    const auto predicted = camel::parse_double(preds.rows[r][pred_col]);
    const auto label = camel::parse_double(data.rows[data_row[r]][label_col]);
    if (!score || !predicted || !label || (*label != 0.0 && *label != 1.0)) {
      throw camel::Error(camel::ErrorCode::parse_error, "bad score or label at prediction line " +
                                                            std::to_string(r + 2));
    }
    scores.push_back(*score);
    labels.push_back(static_cast<int>(*label));
    correct += static_cast<std::size_t>(*predicted == *label);
  }
  print_json({{"auroc", camel::auroc(scores, labels)},
              {"accuracy", static_cast<double>(correct) / static_cast<double>(scores.size())},
              {"n", scores.size()}});
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  camel::SynthConfig cfg;
  std::string out = "synth.csv";
  std::string posteriors;
};

int run_synth(const SynthArgs& args) {
  const camel::SynthData synth = camel::synth_generate(args.cfg);
  const camel::DatasetSchema schema = camel::synth_schema(args.cfg.m);
  camel::save_csv(args.out, synth.data, schema);
  if (!args.posteriors.empty()) {
    camel::CsvTable table;
    table.header = {"id", "posterior"};
    for (std::size_t i = 0; i < synth.posteriors.size(); ++i)
      table.rows.push_back({std::to_string(i), camel::format_double(synth.posteriors[i])});
    camel::write_csv(args.posteriors, table);
  }
  print_json({{"data", args.out},
              {"n", synth.data.size()},
              {"m", synth.data.dim()},
              {"positives", synth.data.count(1)},
              {"label_column", schema.label_column},
              {"confidence_column", *schema.confidence_column},
              {"id_column", *schema.id_column}});
  return 0;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::string out = "results.csv";
  std::string summary;
  std::string grid_log;
  std::uint64_t seed = 0;
};

int run_experiment_cmd(const ExperimentArgs& args, const CLI::App& cmd) {
  camel::ExperimentConfig cfg = camel::load_experiment_config(args.config);
  if (cmd.count("--seed")) cfg.seed = args.seed;
  const auto records = camel::run_experiment(cfg);
  camel::write_results_csv(args.out, records);
  const std::string summary_path = args.summary.empty() ? args.out + ".summary.csv" : args.summary;
  camel::write_summary_csv(summary_path, camel::summarize(records));
  if (!args.grid_log.empty()) camel::write_grid_csv(args.grid_log, records);
  const auto errors = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok(); });
  print_json({{"results", args.out}, {"summary", summary_path}, {"records", records.size()}, {"errors", errors}});
  return 0;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string model;
  std::string out = ".";
};

int run_inspect(const InspectArgs& args) {
  const camel::ModelFile model = camel::load_model(args.model);
  const fs::path dir(args.out);
  fs::create_directories(dir);
  const auto& names = model.schema.feature_columns;

  const camel::Matrix heat = camel::heatmap_matrix(model.metric);
  camel::CsvTable heat_csv;
  heat_csv.header = names;
  for (Eigen::Index r = 0; r < heat.rows(); ++r) {
    std::vector<std::string> row;
    for (Eigen::Index c = 0; c < heat.cols(); ++c) row.push_back(camel::format_double(heat(r, c)));
    heat_csv.rows.push_back(std::move(row));
  }
  camel::write_csv(dir / "heatmap.csv", heat_csv);

  const auto stats = camel::feature_weight_stats(model.metric);
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stats.max_abs[a] > stats.max_abs[b]; });
  camel::CsvTable weights;
  weights.header = {"feature", "mean_abs", "max_abs"};
  for (std::size_t c : order) {
    weights.rows.push_back({names[c], camel::format_double(stats.mean_abs[c]), camel::format_double(stats.max_abs[c])});
  }
  camel::write_csv(dir / "feature_weights.csv", weights);

  const json report = {{"sparsity", camel::sparsity(model.metric)},
                       {"row_rank", camel::row_rank(model.metric)},
                       {"n_zero_rows", camel::zero_rows(model.metric)},
                       {"rows", model.metric.rows()},
                       {"cols", model.metric.cols()}};
  std::ofstream(dir / "report.json") << report.dump() << '\n';
  print_json(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse confidence-based metric learning"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a metric on a labelled CSV");
  train_cmd->add_option("--data", train.data, "Training CSV")->required();
  train_cmd->add_option("--label", train.label, "Label column (0/1)");
  train_cmd->add_option("--confidence", train.confidence, "Confidence column in [0,1]");
  train_cmd->add_option("--id", train.id, "Row id column");
  train_cmd->add_option("--features", train.features, "Comma-separated feature columns (default: all others)");
  train_cmd->add_option("--config", train.config, "JSON train config; flags override it");
  train_cmd->add_option("--lambda1", train.lambda1, "L1 weight");
  train_cmd->add_option("--lambda2", train.lambda2, "Ranking weight (needs --confidence)");
  train_cmd->add_option("--proj-dim", train.proj_dim, "Rows of L (default: feature count)");
  train_cmd->add_option("--max-iters", train.max_iters);
  train_cmd->add_option("--rel-tol", train.rel_tol);
  train_cmd->add_option("--step", train.step)->check(CLI::IsMember({"backtracking", "fixed"}));
  train_cmd->add_option("--eta", train.eta, "Fixed step, or initial backtracking step");
  train_cmd->add_option("--init", train.init)->check(CLI::IsMember({"identity", "gaussian"}));
  train_cmd->add_option("--sigma", train.sigma, "Std of gaussian init entries");
  train_cmd->add_option("--pair-cap", train.pair_cap, "Max ranking pairs kept");
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--out", train.out, "Model file");
  train_cmd->add_option("--trace", train.trace, "Trace CSV (default: <out>.trace.csv)");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Score a CSV with a trained model");
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--data", predict.data)->required();
  predict_cmd->add_option("--threshold", predict.threshold, "Predict 1 iff confidence > threshold");
  predict_cmd->add_option("--id", predict.id);
  predict_cmd->add_option("--label", predict.label, "Extra column to exclude from features");
  predict_cmd->add_option("--confidence", predict.confidence, "Extra column to exclude from features");
  predict_cmd->add_option("--features", predict.features);
  predict_cmd->add_option("--out", predict.out);

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "AUROC of a predictions file against labels");
  evaluate_cmd->add_option("--predictions", evaluate.predictions)->required();
  evaluate_cmd->add_option("--data", evaluate.data)->required();
  evaluate_cmd->add_option("--label", evaluate.label);
  evaluate_cmd->add_option("--id", evaluate.id, "Join rows on this column instead of by position");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic two-class dataset");
  synth_cmd->add_option("--n", synth.cfg.n);
  synth_cmd->add_option("--m", synth.cfg.m);
  synth_cmd->add_option("--informative", synth.cfg.m_informative);
  synth_cmd->add_option("--balance", synth.cfg.class_balance);
  synth_cmd->add_option("--separation", synth.cfg.cluster_separation);
  synth_cmd->add_option("--noise", synth.cfg.confidence_noise);
  synth_cmd->add_option("--seed", synth.cfg.seed);
  synth_cmd->add_option("--out", synth.out);
  synth_cmd->add_option("--posteriors", synth.posteriors, "Also write true posteriors here");

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run the learning-curve experiment");
  experiment_cmd->add_option("--config", experiment.config)->required();
  experiment_cmd->add_option("--out", experiment.out, "Results CSV");
  experiment_cmd->add_option("--summary", experiment.summary, "Summary CSV (default: <out>.summary.csv)");
  experiment_cmd->add_option("--grid-log", experiment.grid_log, "CSV of every grid cell");
  experiment_cmd->add_option("--seed", experiment.seed, "Override the config seed");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Heatmap, feature weights and sparsity of a model");
  inspect_cmd->add_option("--model", inspect.model)->required();
  inspect_cmd->add_option("--out", inspect.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) return run_train(train, *train_cmd);
    if (*predict_cmd) return run_predict(predict);
    if (*evaluate_cmd) return run_evaluate(evaluate);
    if (*synth_cmd) return run_synth(synth);
    if (*experiment_cmd) return run_experiment_cmd(experiment, *experiment_cmd);
    if (*inspect_cmd) return run_inspect(inspect);
  } catch (const camel::Error& e) {
    std::cerr << json{{"error", camel::to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 1;
}
