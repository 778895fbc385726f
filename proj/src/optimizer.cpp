#include "camel/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camel/error.hpp"
#include "camel/evaluation.hpp"
#include "random.hpp"

namespace camel {
namespace {

constexpr std::size_t kMaxScalePairs = 1000;
constexpr int kMaxBacktracks = 60;

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, detail::Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t all = n * (n - 1) / 2;
  if (all <= kMaxScalePairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
  }
  pairs.reserve(kMaxScalePairs);
  while (pairs.size() < kMaxScalePairs) {
    const std::size_t i = detail::uniform_index(rng, n);
    const std::size_t j = detail::uniform_index(rng, n);
    if (i != j) pairs.emplace_back(i, j);
  }
  return pairs;
}

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double total_of(const LossBreakdown& loss) { return loss.total; }

TraceRecord make_record(int iteration, const LossBreakdown& loss, double step, const Matrix& factor) {
  return {iteration, loss.total, loss.pushpull, loss.l1, loss.ranking, step, sparsity(MetricParam(factor))};
}

void check_finite(const LossBreakdown& loss, int iteration) {
  if (!std::isfinite(loss.total)) {
    throw Error(ErrorCode::numerical_failure, "non-finite objective at iteration " + std::to_string(iteration));
  }
}

bool relative_change_below(double previous, double current, double tol) {
  const double change = std::abs(previous - current);
  if (change == 0.0) return true;
  return change < tol * std::abs(previous);
}

}  // namespace

Matrix soft_threshold(const Matrix& values, double threshold) {
  if (!(threshold >= 0.0)) throw Error(ErrorCode::invalid_argument, "soft threshold must be nonnegative");
  if (threshold == 0.0) return values;
  return values.unaryExpr([threshold](double v) {
    const double shrunk = std::abs(v) - threshold;
    if (shrunk <= 0.0) return 0.0;
    return v > 0.0 ? shrunk : -shrunk;
  });
}

std::string_view to_string(TrainStatus status) {
  return status == TrainStatus::converged ? "converged" : "max_iters";
}

void TrainConfig::validate() const {
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) throw Error(ErrorCode::invalid_argument, "lambda1 must be >= 0");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw Error(ErrorCode::invalid_argument, "lambda2 must be >= 0");
  if (proj_dim && *proj_dim < 1) throw Error(ErrorCode::invalid_argument, "proj_dim must be positive");
  if (max_iters < 1) throw Error(ErrorCode::invalid_argument, "max_iters must be positive");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "rel_tol must be positive");
  if (pair_cap && *pair_cap == 0) throw Error(ErrorCode::invalid_argument, "pair_cap must be positive");
  if (const auto* fixed = std::get_if<FixedStep>(&step)) {
    if (!(fixed->eta > 0.0)) throw Error(ErrorCode::invalid_argument, "fixed step size must be positive");
  } else {
    const auto& bt = std::get<Backtracking>(step);
    if (!(bt.eta0 > 0.0) || !(bt.shrink > 0.0 && bt.shrink < 1.0) || !(bt.growth >= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "backtracking needs eta0 > 0, shrink in (0,1), growth >= 1");
    }
  }
  if (const auto* gauss = std::get_if<SeededGaussian>(&init)) {
    if (!(gauss->sigma > 0.0)) throw Error(ErrorCode::invalid_argument, "gaussian init sigma must be positive");
  }
}

Initialization init_metric(Eigen::Index dim, Eigen::Index proj_dim, const Dataset& data, const InitPolicy& policy,
                           std::uint64_t seed) {
  if (dim < 1 || proj_dim < 1) throw Error(ErrorCode::invalid_argument, "metric dimensions must be positive");
  if (data.dim() != dim) throw Error(ErrorCode::invalid_argument, "data dimension does not match metric columns");

  detail::Rng rng(detail::derive_seed(seed, detail::kInitStream));
  Matrix base;
  if (const auto* gauss = std::get_if<SeededGaussian>(&policy)) {
    base.resize(proj_dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
      for (Eigen::Index r = 0; r < proj_dim; ++r) base(r, c) = gauss->sigma * detail::standard_normal(rng);
  } else {
    base = Matrix::Identity(proj_dim, dim);
  }

  Initialization out{MetricParam(base), 1.0, false};
  if (data.size() < 2) {
    out.scale_fallback = true;
    return out;
  }
  std::vector<double> distances;
  for (const auto& [i, j] : sample_pairs(data.size(), rng)) {
    const auto delta = data.features().row(static_cast<Eigen::Index>(i)) -
                       data.features().row(static_cast<Eigen::Index>(j));
    distances.push_back((base * delta.transpose()).squaredNorm());
  }
  const double med = median(std::move(distances));
  if (med == 0.0) {
    out.scale_fallback = true;
    return out;
  }
  if (med < 0.5 || med > 2.0) {
    out.scale = 1.0 / std::sqrt(med);
    out.metric = MetricParam(out.scale * base);
  }
  return out;
}

FitResult fit(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  for (int label : {0, 1}) {
    if (data.count(label) < 2) {
      throw Error(ErrorCode::degenerate_class, "class " + std::to_string(label) + " has " +
                                                   std::to_string(data.count(label)) +
                                                   " training instances; at least 2 are required");
    }
  }
  if (cfg.lambda2 > 0.0 && !data.has_confidences()) {
    throw Error(ErrorCode::missing_supervision, "lambda2 > 0 requires confidence labels");
  }

  const ObjectiveConfig objective{cfg.lambda1, cfg.lambda2, cfg.pair_cap};
  const RankingPairs pairs =
      cfg.lambda2 > 0.0 ? build_ranking_pairs(data, cfg.pair_cap, cfg.seed) : RankingPairs{};

  Initialization init = init_metric(data.dim(), cfg.proj_dim.value_or(data.dim()), data, cfg.init, cfg.seed);
  Matrix factor = init.metric.matrix();

  TrainTrace trace;
  trace.init_scale_fallback = init.scale_fallback;

  SmoothEvaluation current = evaluate_objective(MetricParam(factor), data, objective, pairs);
  check_finite(current.loss, 0);
  trace.records.push_back(make_record(0, current.loss, 0.0, factor));

  const auto* backtracking = std::get_if<Backtracking>(&cfg.step);
  double eta = backtracking ? backtracking->eta0 : std::get<FixedStep>(cfg.step).eta;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    Matrix candidate;
    SmoothEvaluation next;
    bool accepted = false;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt) {
      candidate = soft_threshold(factor - eta * current.gradient, eta * cfg.lambda1);
      if (!candidate.allFinite()) {
        throw Error(ErrorCode::numerical_failure, "non-finite iterate at iteration " + std::to_string(iter));
      }
      next = evaluate_objective(MetricParam(candidate), data, objective, pairs);
      if (!backtracking) {
        check_finite(next.loss, iter);
        accepted = true;
        break;
      }
      if (std::isfinite(next.loss.total) && total_of(next.loss) <= total_of(current.loss)) {
        accepted = true;
        break;
      }
      eta *= backtracking->shrink;
    }
    if (!accepted) {
      // No step, however small, decreases the objective: stationary to
      // working precision.
      trace.status = TrainStatus::converged;
      break;
    }

    const double previous_total = current.loss.total;
    factor = std::move(candidate);
    current = std::move(next);
    trace.records.push_back(make_record(iter, current.loss, eta, factor));

    if (relative_change_below(previous_total, current.loss.total, cfg.rel_tol)) {
      trace.status = TrainStatus::converged;
      break;
    }
    if (backtracking) eta *= backtracking->growth;
  }

  return {MetricParam(std::move(factor)), std::move(trace)};
}

}  // namespace camel
