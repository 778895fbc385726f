#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace camel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// A single instance; rows of the dataset matrix bind here without copying.
using FeatureVector = Eigen::Ref<const Eigen::VectorXd>;

/// The learned factor L (m' x m) of the Mahalanobis matrix M = L^T L.
///
/// M is never materialized as a parameter, so positive semidefiniteness
/// holds by construction. All entries are finite.
class MetricParam {
 public:
  explicit MetricParam(Matrix factor);

  static MetricParam identity(Eigen::Index dim);
  static MetricParam zeros(Eigen::Index rows, Eigen::Index cols);

  const Matrix& matrix() const noexcept { return factor_; }
  Eigen::Index rows() const noexcept { return factor_.rows(); }
  Eigen::Index cols() const noexcept { return factor_.cols(); }

  friend bool operator==(const MetricParam& a, const MetricParam& b) {
    return a.factor_.rows() == b.factor_.rows() &&
           a.factor_.cols() == b.factor_.cols() && a.factor_ == b.factor_;
  }

 private:
  Matrix factor_;
};

/// n labelled instances (one per row of `features`) with optional confidence
/// labels in [0, 1]. Labels are 0 or 1.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<int> labels,
          std::optional<std::vector<double>> confidences = std::nullopt);

  std::size_t size() const noexcept { return labels_.size(); }
  Eigen::Index dim() const noexcept { return features_.cols(); }

  const Matrix& features() const noexcept { return features_; }
  Vector instance(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)).transpose(); }
  std::span<const int> labels() const noexcept { return labels_; }
  int label(std::size_t i) const { return labels_.at(i); }
  bool has_confidences() const noexcept { return confidences_.has_value(); }
  const std::optional<std::vector<double>>& confidences() const noexcept { return confidences_; }

  std::size_t count(int label) const;

  /// Rows `indices` in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Same instances and labels with the confidence column dropped.
  Dataset without_confidences() const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::optional<std::vector<double>> confidences_;
};

}  // namespace camel
