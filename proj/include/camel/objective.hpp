#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "camel/types.hpp"

namespace camel {

/// Ordered same-class pair (a, b): the labeller was strictly more confident in
/// a's label than in b's.
struct RankingPair {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const RankingPair&, const RankingPair&) = default;
};

using RankingPairs = std::vector<RankingPair>;

struct ObjectiveConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// Upper bound on retained ranking pairs; unset keeps all of them.
  std::optional<std::size_t> pair_cap;
};

struct LossBreakdown {
  /// sum_i S^{not y_i}(x_i) - S^{y_i}(x_i)
  double pushpull = 0.0;
  /// lambda1 * element-wise L1 norm of L
  double l1 = 0.0;
  /// lambda2 * sum of ranking hinge terms
  double ranking = 0.0;
  double total = 0.0;
};

/// All (a, b) with equal labels and c_a > c_b, in ascending (a, b) order. When
/// `pair_cap` is exceeded a seeded uniform subset of that size is kept (still
/// in ascending order). Throws missing_supervision without confidences.
RankingPairs build_ranking_pairs(std::span<const int> labels,
                                 const std::optional<std::vector<double>>& confidences,
                                 std::optional<std::size_t> pair_cap = std::nullopt, std::uint64_t seed = 0);
RankingPairs build_ranking_pairs(const Dataset& data, std::optional<std::size_t> pair_cap = std::nullopt,
                                 std::uint64_t seed = 0);

/// S^{y_i}(x_i) - S^{not y_i}(x_i), the approximate confidence the metric
/// assigns to instance i's own label.
double margin(const MetricParam& metric, const Dataset& data, std::size_t i);

/// Push/pull objective with element-wise L1 penalty (class labels only).
LossBreakdown camel_loss(const MetricParam& metric, const Dataset& data, double lambda1);

/// camel_loss plus lambda2 * sum over pairs of [margin(b) - margin(a)]_+.
LossBreakdown camel_cl_loss(const MetricParam& metric, const Dataset& data, const ObjectiveConfig& cfg,
                            const RankingPairs& pairs);

/// Gradient of pushpull + ranking with respect to L (the L1 term is left to
/// the proximal step). Hinge terms at exactly zero contribute nothing.
Matrix smooth_gradient(const MetricParam& metric, const Dataset& data, const ObjectiveConfig& cfg,
                       const RankingPairs& pairs);

struct SmoothEvaluation {
  LossBreakdown loss;
  Matrix gradient;
};

/// Loss and smooth gradient from one kernel evaluation.
SmoothEvaluation evaluate_objective(const MetricParam& metric, const Dataset& data, const ObjectiveConfig& cfg,
                                    const RankingPairs& pairs);

/// Element-wise L1 norm.
double l1_norm(const Matrix& m);

}  // namespace camel
