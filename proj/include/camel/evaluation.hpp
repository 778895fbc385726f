#pragma once

#include <span>
#include <vector>

#include "camel/types.hpp"

namespace camel {

/// Area under the ROC curve: P(s+ > s-) + P(s+ = s-)/2 over all
/// positive/negative pairs. Throws undefined_metric unless both classes occur.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Fraction of entries of L that are exactly 0.0.
double sparsity(const MetricParam& metric);

inline constexpr double kDefaultRankTolerance = 1e-8;

/// Number of singular values above `rel_tol` times the largest one.
int row_rank(const MetricParam& metric, double rel_tol = kDefaultRankTolerance);

/// Rows of L whose entries are all exactly 0.0.
int zero_rows(const MetricParam& metric);

struct EvalReport {
  double auroc = 0.0;
  double sparsity = 0.0;
  int row_rank = 0;
  int n_zero_rows = 0;
};

struct FeatureWeightStats {
  /// Per feature (column of L): mean and max of |L| over the rows.
  std::vector<double> mean_abs;
  std::vector<double> max_abs;
};

FeatureWeightStats feature_weight_stats(const MetricParam& metric);

/// |L| / max |L|, or all zeros for the zero matrix.
Matrix heatmap_matrix(const MetricParam& metric);

}  // namespace camel
