#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "camel/objective.hpp"
#include "camel/types.hpp"

namespace camel {

/// Entry-wise proximal operator of t * ||.||_1: v -> sign(v) max(|v| - t, 0).
/// Entries with |v| <= t come out as exactly 0.
Matrix soft_threshold(const Matrix& values, double threshold);

struct FixedStep {
  double eta = 0.1;
};

/// Shrink the step by `shrink` until the post-prox objective does not
/// increase; grow it by `growth` after every accepted step.
struct Backtracking {
  double eta0 = 1.0;
  double shrink = 0.5;
  double growth = 1.1;
};

using StepPolicy = std::variant<Backtracking, FixedStep>;

struct ScaledIdentity {};
struct SeededGaussian {
  double sigma = 1.0;
};

using InitPolicy = std::variant<ScaledIdentity, SeededGaussian>;

struct TrainConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// Output dimension m' of L; defaults to the feature dimension.
  std::optional<Eigen::Index> proj_dim;
  int max_iters = 500;
  double rel_tol = 1e-6;
  StepPolicy step = Backtracking{};
  InitPolicy init = ScaledIdentity{};
  std::uint64_t seed = 0;
  std::optional<std::size_t> pair_cap;

  void validate() const;
};

struct Initialization {
  MetricParam metric;
  double scale = 1.0;
  /// Median sampled pair distance was zero, so the scale fell back to 1.
  bool scale_fallback = false;
};

/// Starting metric. The base matrix (padded/truncated identity, or seeded
/// Gaussian entries) is rescaled so the median squared distance over up to
/// 1000 seeded training pairs lies in [0.5, 2].
Initialization init_metric(Eigen::Index dim, Eigen::Index proj_dim, const Dataset& data, const InitPolicy& policy,
                           std::uint64_t seed);

struct TraceRecord {
  int iteration = 0;
  double total = 0.0;
  double pushpull = 0.0;
  double l1 = 0.0;
  double ranking = 0.0;
  double step = 0.0;
  double sparsity = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class TrainStatus { converged, max_iters };

std::string_view to_string(TrainStatus status);

struct TrainTrace {
  /// Record 0 is the initial iterate; record k the iterate after k steps.
  std::vector<TraceRecord> records;
  TrainStatus status = TrainStatus::max_iters;
  bool init_scale_fallback = false;

  friend bool operator==(const TrainTrace&, const TrainTrace&) = default;
};

struct FitResult {
  MetricParam metric;
  TrainTrace trace;
};

/// Proximal gradient descent on the push/pull (+ ranking) objective with an
/// element-wise L1 prox. Deterministic given the config seed. The objective
/// is non-convex, so the result depends on the seed and initial policy.
FitResult fit(const Dataset& data, const TrainConfig& cfg);

}  // namespace camel
