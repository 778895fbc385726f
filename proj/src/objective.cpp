#include "camel/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "camel/error.hpp"
#include "camel/metric.hpp"
#include "random.hpp"

namespace camel {
namespace {

void require_trainable(const Dataset& data) {
  for (int label : {0, 1}) {
    if (data.count(label) < 2) {
      throw Error(ErrorCode::degenerate_class, "class " + std::to_string(label) + " has " +
                                                   std::to_string(data.count(label)) +
                                                   " instances; at least 2 are required");
    }
  }
}

void require_dims(const MetricParam& metric, const Dataset& data) {
  if (metric.cols() != data.dim()) {
    throw Error(ErrorCode::invalid_argument, "metric has " + std::to_string(metric.cols()) +
                                                 " columns but data has " + std::to_string(data.dim()) +
                                                 " features");
  }
}

void require_pairs_in_range(const RankingPairs& pairs, std::size_t n) {
  for (const auto& p : pairs) {
    if (p.a >= n || p.b >= n) {
      throw Error(ErrorCode::invalid_argument, "ranking pair (" + std::to_string(p.a) + ", " +
                                                   std::to_string(p.b) + ") out of range for " +
                                                   std::to_string(n) + " instances");
    }
  }
}

// Pairwise kernel matrix and per-instance class similarity scores under L.
struct KernelState {
  Matrix kernel;    // n x n, symmetric, diagonal unused
  Vector same;      // S^{y_i}(x_i)
  Vector opposite;  // S^{not y_i}(x_i)
  Vector same_count;
  Vector opposite_count;
};

KernelState compute_kernels(const MetricParam& metric, const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const Matrix projected = data.features() * metric.matrix().transpose();
  const auto labels = data.labels();

  KernelState state;
  state.kernel = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = std::exp(-(projected.row(i) - projected.row(j)).squaredNorm());
      state.kernel(i, j) = k;
      state.kernel(j, i) = k;
    }
  }

  const auto n1 = static_cast<double>(data.count(1));
  const auto n0 = static_cast<double>(data.count(0));
  state.same = Vector::Zero(n);
  state.opposite = Vector::Zero(n);
  state.same_count.resize(n);
  state.opposite_count.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int yi = labels[static_cast<std::size_t>(i)];
    double same_sum = 0.0;
    double opposite_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (labels[static_cast<std::size_t>(j)] == yi) {
        same_sum += state.kernel(i, j);
      } else {
        opposite_sum += state.kernel(i, j);
      }
    }
    state.same_count(i) = (yi == 1 ? n1 : n0) - 1.0;
    state.opposite_count(i) = yi == 1 ? n0 : n1;
    state.same(i) = same_sum / state.same_count(i);
    state.opposite(i) = opposite_sum / state.opposite_count(i);
  }
  return state;
}

double pushpull_term(const KernelState& state) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < state.same.size(); ++i) sum += state.opposite(i) - state.same(i);
  return sum;
}

double hinge_argument(const KernelState& state, const RankingPair& p) {
  const auto a = static_cast<Eigen::Index>(p.a);
  const auto b = static_cast<Eigen::Index>(p.b);
  return state.opposite(a) - state.same(a) - state.opposite(b) + state.same(b);
}

double ranking_term(const KernelState& state, const ObjectiveConfig& cfg, const RankingPairs& pairs) {
  if (cfg.lambda2 == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) sum += std::max(0.0, hinge_argument(state, p));
  return cfg.lambda2 * sum;
}

LossBreakdown assemble(double pushpull, double l1, double ranking) {
  return {pushpull, l1, ranking, pushpull + l1 + ranking};
}

void validate_config(const ObjectiveConfig& cfg) {
  if (!(cfg.lambda1 >= 0.0) || !(cfg.lambda2 >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "lambda1 and lambda2 must be nonnegative");
  }
}

Matrix gradient_from_state(const MetricParam& metric, const Dataset& data, const KernelState& state,
                           const ObjectiveConfig& cfg, const RankingPairs& pairs) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto labels = data.labels();

  // Every smooth term is a weighted sum over i of S^{not y_i} - S^{y_i}; the
  // push/pull term has weight 1 and each active hinge moves lambda2 of weight
  // from b to a.
  Vector weight = Vector::Ones(n);
  if (cfg.lambda2 != 0.0) {
    for (const auto& p : pairs) {
      if (hinge_argument(state, p) > 0.0) {
        weight(static_cast<Eigen::Index>(p.a)) += cfg.lambda2;
        weight(static_cast<Eigen::Index>(p.b)) -= cfg.lambda2;
      }
    }
  }

  // d k_ij / dL = -2 k_ij L d_ij d_ij^T, so the gradient is -2 L X^T (D - B) X
  // with B the symmetrized coefficient matrix and D its row sums on the diagonal.
  Matrix coeff = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int yi = labels[static_cast<std::size_t>(i)];
    const double same_w = -weight(i) / state.same_count(i);
    const double opposite_w = weight(i) / state.opposite_count(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = labels[static_cast<std::size_t>(j)] == yi ? same_w : opposite_w;
      coeff(i, j) = w * state.kernel(i, j);
    }
  }
  Matrix laplacian = -(coeff + coeff.transpose());
  const Vector degree = -laplacian.rowwise().sum();
  laplacian.diagonal() = degree;
  const Matrix scatter = data.features().transpose() * laplacian * data.features();
  return -2.0 * metric.matrix() * scatter;
}

}  // namespace

double l1_norm(const Matrix& m) { return m.cwiseAbs().sum(); }

RankingPairs build_ranking_pairs(std::span<const int> labels, const std::optional<std::vector<double>>& confidences,
                                 std::optional<std::size_t> pair_cap, std::uint64_t seed) {
  if (!confidences) {
    throw Error(ErrorCode::missing_supervision, "ranking pairs require confidence labels");
  }
  const auto& c = *confidences;
  if (c.size() != labels.size()) {
    throw Error(ErrorCode::invalid_argument, "confidence count does not match label count");
  }
  if (pair_cap && *pair_cap == 0) {
    throw Error(ErrorCode::invalid_argument, "pair cap must be positive");
  }
  RankingPairs pairs;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = 0; b < labels.size(); ++b) {
      if (labels[a] == labels[b] && c[a] > c[b]) pairs.push_back({a, b});
    }
  }
  if (pair_cap && pairs.size() > *pair_cap) {
    detail::Rng rng(detail::derive_seed(seed, detail::kPairStream));
    // Partial Fisher-Yates: the first pair_cap slots become a uniform subset.
    for (std::size_t i = 0; i < *pair_cap; ++i) {
      const std::size_t j = i + detail::uniform_index(rng, pairs.size() - i);
      std::swap(pairs[i], pairs[j]);
    }
    pairs.resize(*pair_cap);
    std::sort(pairs.begin(), pairs.end(),
              [](const RankingPair& x, const RankingPair& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
  }
  return pairs;
}

RankingPairs build_ranking_pairs(const Dataset& data, std::optional<std::size_t> pair_cap, std::uint64_t seed) {
  return build_ranking_pairs(data.labels(), data.confidences(), pair_cap, seed);
}

double margin(const MetricParam& metric, const Dataset& data, std::size_t i) {
  const int y = data.label(i);
  return class_similarity(metric, data, i, y) - class_similarity(metric, data, i, 1 - y);
}

LossBreakdown camel_loss(const MetricParam& metric, const Dataset& data, double lambda1) {
  return camel_cl_loss(metric, data, ObjectiveConfig{lambda1, 0.0, std::nullopt}, {});
}

LossBreakdown camel_cl_loss(const MetricParam& metric, const Dataset& data, const ObjectiveConfig& cfg,
                            const RankingPairs& pairs) {
  validate_config(cfg);
  require_dims(metric, data);
  require_trainable(data);
  require_pairs_in_range(pairs, data.size());
  const KernelState state = compute_kernels(metric, data);
  return assemble(pushpull_term(state), cfg.lambda1 * l1_norm(metric.matrix()), ranking_term(state, cfg, pairs));
}

Matrix smooth_gradient(const MetricParam& metric, const Dataset& data, const ObjectiveConfig& cfg,
                       const RankingPairs& pairs) {
  return evaluate_objective(metric, data, cfg, pairs).gradient;
}

SmoothEvaluation evaluate_objective(const MetricParam& metric, const Dataset& data, const ObjectiveConfig& cfg,
                                    const RankingPairs& pairs) {
  validate_config(cfg);
  require_dims(metric, data);
  require_trainable(data);
  require_pairs_in_range(pairs, data.size());
  const KernelState state = compute_kernels(metric, data);
  SmoothEvaluation out;
  out.loss = assemble(pushpull_term(state), cfg.lambda1 * l1_norm(metric.matrix()), ranking_term(state, cfg, pairs));
  out.gradient = gradient_from_state(metric, data, state, cfg, pairs);
  return out;
}

}  // namespace camel
