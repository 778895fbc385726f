#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "camel/error.hpp"
#include "camel/metric.hpp"

namespace camel {
namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// One-dimensional dataset with L = 1, so kernel values are exp(-x^2).
Dataset line_data(std::vector<double> coords, std::vector<int> labels) {
  Matrix x(static_cast<Eigen::Index>(coords.size()), 1);
  for (std::size_t i = 0; i < coords.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = coords[i];
  return Dataset(std::move(x), std::move(labels));
}

double coord_for_kernel(double k) { return std::sqrt(-std::log(k)); }

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected error " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(SquaredDistance, IdentityIsSquaredEuclidean) {
  EXPECT_EQ(squared_distance(MetricParam::identity(2), vec({1, 0}), vec({0, 0})), 1.0);
}

TEST(SquaredDistance, ZeroForEqualPoints) {
  Matrix l(2, 3);
  l << 1.5, -2, 0.3, 4, 0, -1;
  const Vector a = vec({0.2, -7, 3});
  EXPECT_EQ(squared_distance(MetricParam(l), a, a), 0.0);
}

TEST(SquaredDistance, HandEvaluatedProjection) {
  Matrix l(2, 2);
  l << 2, 0, 0, 0;
  EXPECT_DOUBLE_EQ(squared_distance(MetricParam(l), vec({1, 1}), vec({0, 0})), 4.0);
}

TEST(SquaredDistance, DimensionMismatch) {
  expect_code(ErrorCode::invalid_argument,
              [] { squared_distance(MetricParam::identity(2), vec({1, 0, 0}), vec({0, 0})); });
  expect_code(ErrorCode::invalid_argument,
              [] { kernel_similarity(MetricParam::identity(3), vec({1, 0}), vec({0, 0})); });
}

TEST(MetricParam, RejectsNonFinite) {
  Matrix l = Matrix::Identity(2, 2);
  l(0, 1) = std::nan("");
  expect_code(ErrorCode::invalid_argument, [&] { MetricParam{l}; });
}

TEST(KernelSimilarity, Examples) {
  EXPECT_EQ(kernel_similarity(MetricParam::identity(2), vec({3, 4}), vec({3, 4})), 1.0);

  Matrix l(1, 1);
  l << std::sqrt(std::log(2.0));
  EXPECT_NEAR(kernel_similarity(MetricParam(l), vec({1}), vec({0})), 0.5, 1e-15);

  l << 1000.0;  // squared distance 1e6
  EXPECT_EQ(kernel_similarity(MetricParam(l), vec({1}), vec({0})), 0.0);
}

TEST(ClassSimilarity, IdenticalReference) {
  const Dataset d = line_data({0.0, 0.0, 5.0}, {1, 1, 0});
  EXPECT_EQ(class_similarity(MetricParam::identity(1), d, 0, 1), 1.0);
}

TEST(ClassSimilarity, MeanOfKernels) {
  const Dataset d = line_data({0.0, coord_for_kernel(0.2), coord_for_kernel(0.4), 9.0}, {0, 1, 1, 0});
  EXPECT_NEAR(class_similarity(MetricParam::identity(1), d, 0, 1), 0.3, 1e-15);
}

TEST(ClassSimilarity, ExcludesSelf) {
  // Instance 0 is the only member of class 1, so its own-class set is empty.
  const Dataset d = line_data({0.0, 1.0, 2.0}, {1, 0, 0});
  expect_code(ErrorCode::degenerate_class, [&] { class_similarity(MetricParam::identity(1), d, 0, 1); });
  EXPECT_NO_THROW(class_similarity(MetricParam::identity(1), d, 0, 0));
}

TEST(ClassSimilarityQuery, Examples) {
  const Dataset single = line_data({2.0, 7.0}, {1, 0});
  EXPECT_EQ(class_similarity_query(MetricParam::identity(1), single, vec({2.0}), 1), 1.0);

  const Dataset far = line_data({1000.0, -1000.0, 0.0}, {1, 1, 0});
  EXPECT_EQ(class_similarity_query(MetricParam::identity(1), far, vec({0.0}), 1), 0.0);

  const Dataset three =
      line_data({coord_for_kernel(0.5), coord_for_kernel(0.1), coord_for_kernel(0.3), 0.0}, {1, 1, 1, 0});
  EXPECT_NEAR(class_similarity_query(MetricParam::identity(1), three, vec({0.0}), 1), 0.3, 1e-15);
}

TEST(ClassSimilarityQuery, NoSelfExclusion) {
  // Scoring an observed point as a query counts its own kernel value of 1.
  const Dataset d = line_data({0.0, 1.0, 3.0}, {1, 1, 0});
  const double with_self = class_similarity_query(MetricParam::identity(1), d, vec({0.0}), 1);
  EXPECT_NEAR(with_self, 0.5 * (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(class_similarity(MetricParam::identity(1), d, 0, 1), std::exp(-1.0), 1e-15);
}

TEST(ClassSimilarityQuery, MissingLabel) {
  const Dataset d = line_data({0.0, 1.0}, {0, 0});
  expect_code(ErrorCode::degenerate_class,
              [&] { class_similarity_query(MetricParam::identity(1), d, vec({0.0}), 1); });
}

TEST(ConfidenceScore, Examples) {
  EXPECT_EQ(confidence_score(0.3, 0.3).value, 0.5);
  EXPECT_NEAR(confidence_score(0.6, 0.2).value, 0.75, 1e-15);
  EXPECT_EQ(confidence_score(0.0, 0.4).value, 0.0);
  EXPECT_FALSE(confidence_score(0.0, 0.4).degenerate);
}

TEST(ConfidenceScore, UnderflowIsNeutralAndFlagged) {
  const ConfidenceScore s = confidence_score(0.0, 0.0);
  EXPECT_EQ(s.value, 0.5);
  EXPECT_TRUE(s.degenerate);
}

TEST(Predict, ThresholdExample) {
  // q sits on the class-0 point (kernel 1) and the class-1 kernel k1 gives
  // C1 = k1 / (k1 + 1) = 0.41.
  const double k1 = 0.41 / 0.59;
  const Dataset d = line_data({coord_for_kernel(k1), 0.0}, {1, 0});
  const Prediction p = predict(MetricParam::identity(1), d, vec({0.0}), 0.4);
  EXPECT_NEAR(p.confidence, 0.41, 1e-12);
  EXPECT_EQ(p.label, 1);
}

TEST(Predict, StrictInequality) {
  const Dataset d = line_data({0.7, 0.0}, {1, 0});
  const double c1 = predict(MetricParam::identity(1), d, vec({0.0})).confidence;
  EXPECT_EQ(predict(MetricParam::identity(1), d, vec({0.0}), c1).label, 0);
  EXPECT_EQ(predict(MetricParam::identity(1), d, vec({0.0}), std::nextafter(c1, 0.0)).label, 1);
}

TEST(Predict, FarFromPositives) {
  const Dataset d = line_data({0.0, 0.5, 50.0, 51.0}, {0, 0, 1, 1});
  const Prediction p = predict(MetricParam::identity(1), d, vec({0.0}));
  EXPECT_EQ(p.label, 0);
  EXPECT_LT(p.confidence, 1e-300);
}

TEST(Predict, DefaultThresholdIsHalf) {
  EXPECT_EQ(kDefaultThreshold, 0.5);
  const Dataset d = line_data({-1.0, 1.0}, {0, 1});
  // Equidistant query: C1 = 0.5, not above the default threshold.
  EXPECT_EQ(predict(MetricParam::identity(1), d, vec({0.0})).label, 0);
}

TEST(Predict, MissingClass) {
  const Dataset d = line_data({0.0, 1.0}, {1, 1});
  expect_code(ErrorCode::degenerate_class, [&] { predict(MetricParam::identity(1), d, vec({0.0})); });
  expect_code(ErrorCode::invalid_argument, [&] { predict(MetricParam::identity(1), d, vec({0.0}), 1.0); });
}

TEST(Class1Confidences, MatchesPerQueryPrediction) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  Matrix x(12, 3), q(5, 3), l(2, 3);
  for (auto* m : {&x, &q, &l})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = normal(rng);
  std::vector<int> y{0, 1, 0, 1, 0, 1, 0, 1, 1, 1, 0, 0};
  const Dataset train(x, y);
  const auto batch = class1_confidences(MetricParam(l), train, q);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    EXPECT_NEAR(batch[static_cast<std::size_t>(i)], predict(MetricParam(l), train, q.row(i).transpose()).confidence,
                1e-12);
  }
}

// ---- properties

class MetricProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{2024};
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_int_distribution<int> dim{1, 6};

  Matrix random_matrix(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * normal(rng);
    return m;
  }
};

TEST_F(MetricProperties, SymmetricAndNonnegative) {
  for (int t = 0; t < 10000; ++t) {
    const int m = dim(rng), mp = dim(rng);
    const MetricParam l(random_matrix(mp, m));
    const Vector a = random_matrix(m, 1), b = random_matrix(m, 1);
    const double ab = squared_distance(l, a, b);
    ASSERT_EQ(ab, squared_distance(l, b, a));
    ASSERT_GE(ab, 0.0);
    const double k = kernel_similarity(l, a, b);
    ASSERT_GE(k, 0.0);
    ASSERT_LE(k, 1.0);
    ASSERT_EQ(kernel_similarity(l, a, a), 1.0);
  }
}

TEST_F(MetricProperties, FactorMetricIsPositiveSemidefinite) {
  for (int t = 0; t < 500; ++t) {
    const int m = dim(rng), mp = dim(rng);
    const Matrix l = random_matrix(mp, m);
    const Matrix mahal = l.transpose() * l;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(mahal);
    ASSERT_GE(eig.eigenvalues().minCoeff(), -1e-9 * mahal.norm());
  }
}

TEST_F(MetricProperties, FactoredAndQuadraticFormsAgree) {
  for (int t = 0; t < 2000; ++t) {
    const int m = dim(rng), mp = dim(rng);
    const Matrix l = random_matrix(mp, m);
    const Vector a = random_matrix(m, 1), b = random_matrix(m, 1);
    const Vector delta = a - b;
    const double quadratic = delta.dot((l.transpose() * l) * delta);
    const double factored = squared_distance(MetricParam(l), a, b);
    ASSERT_NEAR(factored, quadratic, 1e-9 * std::max(1.0, std::abs(quadratic)));
  }
}

TEST_F(MetricProperties, ConfidenceScoresAreComplementary) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const double a = unit(rng), b = unit(rng);
    if (a + b == 0.0) continue;
    ASSERT_NEAR(confidence_score(a, b).value + confidence_score(b, a).value, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace camel
