#pragma once

#include <cstddef>
#include <vector>

#include "camel/types.hpp"

namespace camel {

/// Squared generalized Mahalanobis distance ||L a - L b||^2.
double squared_distance(const MetricParam& metric, const FeatureVector& a, const FeatureVector& b);

/// Gaussian kernel exp(-squared_distance). The bandwidth lives in the scale of L.
double kernel_similarity(const MetricParam& metric, const FeatureVector& a, const FeatureVector& b);

/// Mean kernel similarity of observed instance i to every other instance
/// labelled `label` (i itself is excluded). Throws degenerate_class when that
/// reference set is empty.
double class_similarity(const MetricParam& metric, const Dataset& data, std::size_t i, int label);

/// Mean kernel similarity of an unobserved query to all instances labelled
/// `label`. No self-exclusion applies.
double class_similarity_query(const MetricParam& metric, const Dataset& train, const FeatureVector& query,
                              int label);

struct ConfidenceScore {
  double value = 0.5;
  /// Both similarity scores underflowed to zero; value is the neutral 0.5.
  bool degenerate = false;
};

/// s_y / (s_y + s_not_y), or 0.5 flagged degenerate when both are zero.
ConfidenceScore confidence_score(double s_y, double s_not_y);

inline constexpr double kDefaultThreshold = 0.5;

struct Prediction {
  int label = 0;
  /// Confidence score for class 1.
  double confidence = 0.5;
  bool degenerate = false;
};

/// Label 1 iff the class-1 confidence score is strictly above `threshold`.
Prediction predict(const MetricParam& metric, const Dataset& train, const FeatureVector& query,
                   double threshold = kDefaultThreshold);

/// Class-1 confidence scores for every row of `queries` against `train`
/// (query scoring, no self-exclusion). Degenerate rows score 0.5.
std::vector<double> class1_confidences(const MetricParam& metric, const Dataset& train, const Matrix& queries);

}  // namespace camel
