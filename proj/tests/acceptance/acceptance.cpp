// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [path-to-camel-cli]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "camel/data_io.hpp"
#include "camel/error.hpp"
#include "camel/evaluation.hpp"
#include "camel/experiment.hpp"
#include "camel/metric.hpp"
#include "camel/objective.hpp"
#include "camel/optimizer.hpp"
#include "oracles.hpp"

namespace {

using namespace camel;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

SynthConfig fixture_config(std::uint64_t seed = 1) {
  SynthConfig cfg;
  cfg.n = 400;
  cfg.m = 10;
  cfg.m_informative = 2;
  cfg.cluster_separation = 4.0;
  cfg.class_balance = 0.5;
  cfg.confidence_noise = 0.05;
  cfg.seed = seed;
  return cfg;
}

// Regularization grids used wherever hyperparameters are validation-selected.
// Both loss terms are sums (over instances and over pairs), so useful weights
// grow with the training size; the grids span that range.
const std::vector<double> kLambda1Grid{0.1, 0.3, 1.0, 3.0, 10.0, 30.0};
const std::vector<double> kLambda2Grid{0.1, 0.3, 1.0, 3.0};

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

Outcome gradient_check() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> n_dist(4, 10), m_dist(1, 4);
  int checked = 0, skipped = 0;
  double worst = 0.0;
  for (int draw = 0; checked < 24 && draw < 200; ++draw) {
    const auto inst = oracle::random_instance(rng, n_dist(rng), m_dist(rng), m_dist(rng));
    const double lambda2 = draw % 2 == 0 ? 0.0 : 1.0;
    const RankingPairs pairs = lambda2 > 0.0 ? oracle::brute_force_pairs(inst.y, inst.c) : RankingPairs{};
    if (lambda2 > 0.0 && oracle::min_abs_hinge_argument(inst.L, inst.x, inst.y, pairs) < 1e-4) {
      ++skipped;
      continue;
    }
    const Dataset data(inst.x, inst.y, inst.c);
    const Matrix analytic = smooth_gradient(MetricParam(inst.L), data, {0.0, lambda2, std::nullopt}, pairs);
    const Matrix numeric = oracle::central_differences(
        [&](const Matrix& l) { return oracle::smooth_objective(l, inst.x, inst.y, lambda2, pairs); }, inst.L, 1e-5);
    worst = std::max(worst, oracle::relative_error(analytic, numeric));
    ++checked;
  }
  const double elapsed = seconds_since(start);
  return {checked >= 20 && worst < 1e-5 && elapsed < 10.0,
          std::to_string(checked) + " instances (" + std::to_string(skipped) + " kink draws skipped), worst rel err " +
              fmt(worst, 3) + ", " + fmt(elapsed, 3) + " s"};
}

Outcome reduction_identity() {
  std::mt19937_64 rng(77);
  int loss_matches = 0, fit_matches = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = oracle::random_instance(rng, 10, 4, 3);
    const Dataset data(inst.x, inst.y, inst.c);
    const MetricParam l(inst.L);
    const LossBreakdown cl = camel_cl_loss(l, data, {0.3, 0.0, std::nullopt}, build_ranking_pairs(data));
    const LossBreakdown plain = camel_loss(l, data, 0.3);
    if (cl.total == plain.total && cl.pushpull == plain.pushpull) ++loss_matches;

    SynthConfig synth = fixture_config(seed);
    synth.n = 80;
    const Dataset fixture = synth_generate(synth).data;
    TrainConfig cfg;
    cfg.lambda1 = 0.01;
    cfg.seed = seed;
    cfg.max_iters = 100;
    const FitResult with = fit(fixture, cfg);
    const FitResult without = fit(fixture.without_confidences(), cfg);
    if (with.metric == without.metric && with.trace == without.trace) ++fit_matches;
  }
  return {loss_matches == 10 && fit_matches == 10,
          "loss identical " + std::to_string(loss_matches) + "/10, fit identical " + std::to_string(fit_matches) + "/10"};
}

Outcome complementarity() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  int evaluations = 0;
  while (evaluations < 10000) {
    const auto inst = oracle::random_instance(rng, 12, 3, 3, 0.7);
    const Dataset data(inst.x, inst.y);
    const MetricParam l(inst.L);
    for (int q = 0; q < 100; ++q, ++evaluations) {
      Vector query(3);
      for (int c = 0; c < 3; ++c) query(c) = 2.0 * normal(rng);
      const double s1 = class_similarity_query(l, data, query, 1);
      const double s0 = class_similarity_query(l, data, query, 0);
      const double sum = confidence_score(s1, s0).value + confidence_score(s0, s1).value;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return {worst <= 1e-12, std::to_string(evaluations) + " evaluations, max |C1 + C0 - 1| = " + fmt(worst, 3)};
}

Outcome sparsity_shutoff() {
  TrainConfig cfg;
  cfg.lambda1 = 1e3;
  const FitResult r = fit(synth_generate(fixture_config()).data, cfg);
  const bool zero = r.metric.matrix() == Matrix::Zero(r.metric.rows(), r.metric.cols());
  return {zero && sparsity(r.metric) == 1.0 && row_rank(r.metric) == 0,
          "sparsity " + fmt(sparsity(r.metric)) + ", row rank " + std::to_string(row_rank(r.metric))};
}

Outcome monotone_descent() {
  int violations = 0;
  std::size_t steps = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig synth = fixture_config(seed);
    synth.n = 100;
    TrainConfig cfg;
    cfg.lambda1 = 0.01 * static_cast<double>(seed);
    cfg.lambda2 = seed % 2 == 0 ? 0.001 : 0.0;
    cfg.init = seed % 3 == 0 ? InitPolicy{SeededGaussian{}} : InitPolicy{ScaledIdentity{}};
    cfg.seed = seed;
    cfg.max_iters = 200;
    const FitResult r = fit(synth_generate(synth).data, cfg);
    for (std::size_t k = 1; k < r.trace.records.size(); ++k, ++steps) {
      if (r.trace.records[k].total > r.trace.records[k - 1].total + 1e-12) ++violations;
    }
  }
  return {violations == 0, std::to_string(steps) + " steps over 10 runs, " + std::to_string(violations) + " increases"};
}

Outcome auroc_oracle() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> size(2, 50);
  int exact = 0, with_ties = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = size(rng);
    const bool coarse = trial % 2 == 0;
    std::uniform_int_distribution<int> level(0, coarse ? 4 : 1000000);
    std::vector<double> s(static_cast<std::size_t>(k));
    std::vector<int> y(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      s[static_cast<std::size_t>(i)] = level(rng) / 7.0;
      y[static_cast<std::size_t>(i)] = i < 2 ? i : static_cast<int>(rng() % 2);
    }
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++with_ties;
    if (auroc(s, y) == oracle::auroc_pairs(s, y)) ++exact;
  }
  return {exact == 200, std::to_string(exact) + "/200 exact (" + std::to_string(with_ties) + " with ties)"};
}

Outcome synthetic_recovery() {
  const auto start = Clock::now();
  const Dataset data = synth_generate(fixture_config()).data;
  const Split parts = split(data, 200, 1);
  double best_val = -1.0, best_l1 = 0.0;
  MetricParam best = MetricParam::zeros(1, 1);
  for (double l1 : kLambda1Grid) {
    TrainConfig cfg;
    cfg.lambda1 = l1;
    const FitResult r = fit(parts.train, cfg);
    const double val = auroc(class1_confidences(r.metric, parts.train, parts.validation.features()),
                             parts.validation.labels());
    if (val > best_val) {
      best_val = val;
      best_l1 = l1;
      best = r.metric;
    }
  }
  const double test = auroc(class1_confidences(best, parts.train, parts.test.features()), parts.test.labels());
  const Matrix abs_l = best.matrix().cwiseAbs();
  const double total = abs_l.sum();
  const double informative = abs_l.leftCols(2).sum();
  const double share = total > 0.0 ? informative / total : 0.0;
  const double elapsed = seconds_since(start);
  return {test >= 0.95 && share >= 0.8 && elapsed < 120.0,
          "lambda1 " + fmt(best_l1) + ", val AUROC " + fmt(best_val) + ", test AUROC " + fmt(test) +
              ", informative L1 share " + fmt(share) + ", " + fmt(elapsed, 3) + " s"};
}

ExperimentConfig curve_config() {
  ExperimentConfig cfg;
  cfg.trials = 10;
  cfg.train_sizes = {10, 20, 40, 60, 100};
  cfg.lambda1_grid = kLambda1Grid;
  cfg.lambda2_grid = kLambda2Grid;
  cfg.seed = 1;
  cfg.data = fixture_config();
  return cfg;
}

Outcome confidence_benefit(const std::vector<SummaryRow>& summary) {
  std::map<std::pair<std::size_t, Method>, const SummaryRow*> by;
  for (const auto& row : summary) by[{row.train_size, row.method}] = &row;
  std::ostringstream curves;
  for (Method m : {Method::camel, Method::camel_cl}) {
    curves << "\n    " << to_string(m) << ":";
    for (const auto& row : summary)
      if (row.method == m) curves << " n=" << row.train_size << " " << fmt(row.mean_auroc) << " [" << fmt(row.ci_low)
                                  << ", " << fmt(row.ci_high) << "]";
  }
  const auto* plain = by.at({20, Method::camel});
  const auto* cl = by.at({20, Method::camel_cl});
  const bool ok = plain->count == 10 && cl->count == 10 && cl->mean_auroc >= plain->mean_auroc;
  return {ok, "size 20 mean test AUROC: camel_cl " + fmt(cl->mean_auroc, 6) + " vs camel " +
                  fmt(plain->mean_auroc, 6) + " (margin " + fmt(cl->mean_auroc - plain->mean_auroc, 3) + ")" +
                  curves.str()};
}

Outcome sparsity_direction(const std::vector<SummaryRow>& fixture_runs, const std::vector<SummaryRow>& curves) {
  double plain = 0.0, cl = 0.0, plain_rank = 0.0, cl_rank = 0.0;
  std::size_t rows = 0;
  for (const auto& row : fixture_runs) {
    (row.method == Method::camel ? plain : cl) = row.mean_sparsity;
    (row.method == Method::camel ? plain_rank : cl_rank) = row.mean_row_rank;
    rows += row.count == 10 ? 1 : 0;
  }
  std::ostringstream by_size;
  for (const auto& row : curves) {
    by_size << (row.method == Method::camel ? " n=" + std::to_string(row.train_size) + " " : "/") << fmt(row.mean_sparsity, 3);
  }
  return {rows == 2 && cl >= plain, "train 200, 10 seeds: mean sparsity camel_cl " + fmt(cl) + " vs camel " +
                                        fmt(plain) + "; mean row rank " + fmt(cl_rank) + " vs " + fmt(plain_rank) +
                                        "\n    sparsity camel/camel_cl by size:" + by_size.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::absolute("acceptance_determinism");
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({
  "trials": 3,
  "train_sizes": [10, 20, 40],
  "grid": {"lambda1": [0.3, 3], "lambda2": [0.3, 3]},
  "seed": 2,
  "data": {"synthetic": {"n": 200, "m": 10, "m_informative": 2, "seed": 3}}
})";
  if (cli.empty()) {
    const ExperimentConfig cfg = load_experiment_config(dir / "config.json");
    write_results_csv(dir / "a.csv", run_experiment(cfg));
    write_results_csv(dir / "b.csv", run_experiment(cfg));
  } else {
    for (const char* name : {"a.csv", "b.csv"}) {
      const std::string cmd = "\"" + cli + "\" experiment --config \"" + (dir / "config.json").string() + "\" --out \"" +
                              (dir / name).string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "experiment command failed: " + cmd};
    }
  }
  const std::string a = slurp(dir / "a.csv");
  const std::string b = slurp(dir / "b.csv");
  bool same = !a.empty() && a == b;
  if (!cli.empty()) same = same && slurp(dir / "a.csv.summary.csv") == slurp(dir / "b.csv.summary.csv");
  return {same, std::string(cli.empty() ? "library" : "CLI") + " runs, " + std::to_string(a.size()) +
                    " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << out.detail << std::endl;
  };

  report(1, "gradient matches finite differences", gradient_check);
  report(2, "ranking-free reduction", reduction_identity);
  report(3, "confidence complementarity", complementarity);
  report(4, "exact sparsity shutoff", sparsity_shutoff);
  report(5, "monotone descent", monotone_descent);
  report(6, "AUROC oracle", auroc_oracle);
  report(7, "synthetic recovery", synthetic_recovery);

  std::vector<SummaryRow> curves;
  report(8, "confidence labels help at size 20", [&] {
    const auto start = Clock::now();
    curves = summarize(run_experiment(curve_config()));
    Outcome out = confidence_benefit(curves);
    out.detail += "\n    " + fmt(seconds_since(start), 3) + " s";
    return out;
  });
  report(9, "confidence labels give sparser metrics", [&] {
    ExperimentConfig cfg = curve_config();
    cfg.train_sizes = {200};
    return sparsity_direction(summarize(run_experiment(cfg)), curves);
  });
  report(10, "experiment determinism", [&] { return determinism(cli); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
