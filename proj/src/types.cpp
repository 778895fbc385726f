#include "camel/types.hpp"

#include <algorithm>
#include <string>

#include "camel/error.hpp"

namespace camel {

MetricParam::MetricParam(Matrix factor) : factor_(std::move(factor)) {
  if (factor_.rows() < 1 || factor_.cols() < 1) {
    throw Error(ErrorCode::invalid_argument, "metric factor must have at least one row and one column");
  }
  if (!factor_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "metric factor contains non-finite entries");
  }
}

MetricParam MetricParam::identity(Eigen::Index dim) {
  return MetricParam(Matrix::Identity(dim, dim));
}

MetricParam MetricParam::zeros(Eigen::Index rows, Eigen::Index cols) {
  return MetricParam(Matrix::Zero(rows, cols));
}

Dataset::Dataset(Matrix features, std::vector<int> labels,
                 std::optional<std::vector<double>> confidences)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      confidences_(std::move(confidences)) {
  if (labels_.empty()) {
    throw Error(ErrorCode::validation, "dataset must contain at least one instance");
  }
  if (features_.rows() != static_cast<Eigen::Index>(labels_.size())) {
    throw Error(ErrorCode::validation,
                "feature rows (" + std::to_string(features_.rows()) + ") do not match label count (" +
                    std::to_string(labels_.size()) + ")");
  }
  if (features_.cols() < 1) {
    throw Error(ErrorCode::validation, "dataset must have at least one feature");
  }
  if (!features_.allFinite()) {
    throw Error(ErrorCode::validation, "dataset features must be finite");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0 && labels_[i] != 1) {
      throw Error(ErrorCode::validation, "label at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
  if (confidences_) {
    if (confidences_->size() != labels_.size()) {
      throw Error(ErrorCode::validation, "confidence count does not match label count");
    }
    for (std::size_t i = 0; i < confidences_->size(); ++i) {
      const double c = (*confidences_)[i];
      if (!(c >= 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::validation, "confidence at row " + std::to_string(i) + " is outside [0, 1]");
      }
    }
  }
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix x(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<int> y;
  y.reserve(indices.size());
  std::optional<std::vector<double>> c;
  if (confidences_) c.emplace().reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= size()) throw Error(ErrorCode::invalid_argument, "subset index out of range");
    x.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(i));
    y.push_back(labels_[i]);
    if (c) c->push_back((*confidences_)[i]);
  }
  return Dataset(std::move(x), std::move(y), std::move(c));
}

Dataset Dataset::without_confidences() const {
  return Dataset(features_, labels_, std::nullopt);
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         a.features_ == b.features_ && a.labels_ == b.labels_ && a.confidences_ == b.confidences_;
}

}  // namespace camel
