#include "camel/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "camel/error.hpp"

namespace camel {

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::invalid_argument, "scores and labels differ in length");
  }
  const std::size_t k = scores.size();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::invalid_argument, "labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw Error(ErrorCode::invalid_argument, "scores must be finite");
    positives += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t negatives = k - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::undefined_metric, "AUROC needs at least one positive and one negative label");
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U with midranks; ranks are counted in half units so the
  // sum stays an exact integer.
  long long twice_rank_sum = 0;
  std::size_t start = 0;
  while (start < k) {
    std::size_t end = start + 1;
    while (end < k && scores[order[end]] == scores[order[start]]) ++end;
    const long long twice_midrank = static_cast<long long>(start + 1 + end);
    for (std::size_t t = start; t < end; ++t) {
      if (labels[order[t]] == 1) twice_rank_sum += twice_midrank;
    }
    start = end;
  }
  const auto p = static_cast<long long>(positives);
  const long long twice_u = twice_rank_sum - p * (p + 1);
  return 0.5 * static_cast<double>(twice_u) / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double sparsity(const MetricParam& metric) {
  const Matrix& m = metric.matrix();
  const auto zeros = (m.array() == 0.0).count();
  return static_cast<double>(zeros) / static_cast<double>(m.size());
}

int row_rank(const MetricParam& metric, double rel_tol) {
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "rank tolerance must be positive");
  const Eigen::JacobiSVD<Matrix> svd(metric.matrix());
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = rel_tol * sv(0);
  return static_cast<int>((sv.array() > cutoff).count());
}

int zero_rows(const MetricParam& metric) {
  const Matrix& m = metric.matrix();
  int count = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if ((m.row(r).array() == 0.0).all()) ++count;
  }
  return count;
}

FeatureWeightStats feature_weight_stats(const MetricParam& metric) {
  const Matrix magnitude = metric.matrix().cwiseAbs();
  FeatureWeightStats stats;
  stats.mean_abs.reserve(static_cast<std::size_t>(magnitude.cols()));
  stats.max_abs.reserve(static_cast<std::size_t>(magnitude.cols()));
  for (Eigen::Index c = 0; c < magnitude.cols(); ++c) {
    const double peak = magnitude.col(c).maxCoeff();
    stats.mean_abs.push_back(std::min(magnitude.col(c).mean(), peak));
    stats.max_abs.push_back(peak);
  }
  return stats;
}

Matrix heatmap_matrix(const MetricParam& metric) {
  const Matrix magnitude = metric.matrix().cwiseAbs();
  const double peak = magnitude.maxCoeff();
  if (peak == 0.0) return magnitude;
  return magnitude / peak;
}

}  // namespace camel
