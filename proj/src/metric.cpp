#include "camel/metric.hpp"

#include <cmath>
#include <string>

#include "camel/error.hpp"

namespace camel {
namespace {

void check_dims(const MetricParam& metric, const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != metric.cols() || b.size() != metric.cols()) {
    throw Error(ErrorCode::invalid_argument,
                "dimension mismatch: metric has " + std::to_string(metric.cols()) + " columns, vectors have " +
                    std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
}

void check_label(int label) {
  if (label != 0 && label != 1) throw Error(ErrorCode::invalid_argument, "label must be 0 or 1");
}

double unchecked_kernel(const MetricParam& metric, const FeatureVector& a, const FeatureVector& b) {
  return std::exp(-(metric.matrix() * (a - b)).squaredNorm());
}

}  // namespace

double squared_distance(const MetricParam& metric, const FeatureVector& a, const FeatureVector& b) {
  check_dims(metric, a, b);
  return (metric.matrix() * (a - b)).squaredNorm();
}

double kernel_similarity(const MetricParam& metric, const FeatureVector& a, const FeatureVector& b) {
  return std::exp(-squared_distance(metric, a, b));
}

double class_similarity(const MetricParam& metric, const Dataset& data, std::size_t i, int label) {
  check_label(label);
  if (i >= data.size()) throw Error(ErrorCode::invalid_argument, "instance index out of range");
  const Vector xi = data.instance(i);
  check_dims(metric, xi, xi);
  double sum = 0.0;
  std::size_t members = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (j == i || data.label(j) != label) continue;
    sum += unchecked_kernel(metric, xi, data.instance(j));
    ++members;
  }
  if (members == 0) {
    throw Error(ErrorCode::degenerate_class,
                "no instances labelled " + std::to_string(label) + " besides instance " + std::to_string(i));
  }
  return sum / static_cast<double>(members);
}

double class_similarity_query(const MetricParam& metric, const Dataset& train, const FeatureVector& query,
                              int label) {
  check_label(label);
  check_dims(metric, query, query);
  if (train.dim() != metric.cols()) {
    throw Error(ErrorCode::invalid_argument, "training data dimension does not match metric");
  }
  double sum = 0.0;
  std::size_t members = 0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    if (train.label(j) != label) continue;
    sum += unchecked_kernel(metric, query, train.instance(j));
    ++members;
  }
  if (members == 0) {
    throw Error(ErrorCode::degenerate_class, "training data has no instances labelled " + std::to_string(label));
  }
  return sum / static_cast<double>(members);
}

ConfidenceScore confidence_score(double s_y, double s_not_y) {
  if (!(s_y >= 0.0) || !(s_not_y >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "similarity scores must be nonnegative");
  }
  const double denom = s_y + s_not_y;
  if (denom == 0.0) return {0.5, true};
  return {s_y / denom, false};
}

Prediction predict(const MetricParam& metric, const Dataset& train, const FeatureVector& query, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "threshold must lie in (0, 1)");
  }
  const double s1 = class_similarity_query(metric, train, query, 1);
  const double s0 = class_similarity_query(metric, train, query, 0);
  const ConfidenceScore c1 = confidence_score(s1, s0);
  return {c1.value > threshold ? 1 : 0, c1.value, c1.degenerate};
}

std::vector<double> class1_confidences(const MetricParam& metric, const Dataset& train, const Matrix& queries) {
  if (train.dim() != metric.cols() || queries.cols() != metric.cols()) {
    throw Error(ErrorCode::invalid_argument, "query or training dimension does not match metric");
  }
  const std::size_t n1 = train.count(1);
  const std::size_t n0 = train.count(0);
  if (n1 == 0 || n0 == 0) {
    throw Error(ErrorCode::degenerate_class, "training data must contain both classes");
  }
  const Matrix train_proj = train.features() * metric.matrix().transpose();
  const Matrix query_proj = queries * metric.matrix().transpose();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    double sums[2] = {0.0, 0.0};
    for (Eigen::Index j = 0; j < train_proj.rows(); ++j) {
      sums[train.label(static_cast<std::size_t>(j))] +=
          std::exp(-(query_proj.row(q) - train_proj.row(j)).squaredNorm());
    }
    const double s1 = sums[1] / static_cast<double>(n1);
    const double s0 = sums[0] / static_cast<double>(n0);
    out.push_back(confidence_score(s1, s0).value);
  }
  return out;
}

}  // namespace camel
