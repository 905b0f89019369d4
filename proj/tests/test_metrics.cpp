#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "topolidar/assignment.hpp"
#include "topolidar/metrics.hpp"

using namespace topolidar;

TEST(Assignment, SmallKnownCase) {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  EXPECT_EQ(solve_assignment(c), (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Assignment, RectangularPicksDistinctColumns) {
  Eigen::MatrixXd c(2, 4);
  c << 5, 5, 1, 5, 5, 5, 0, 2;
  EXPECT_EQ(solve_assignment(c), (std::vector<std::size_t>{2, 3}));
  EXPECT_THROW(solve_assignment(c.transpose()), std::invalid_argument);
}

TEST(Emd, MatchesPermutationSearch) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const PointCloud s = oracle::random_cloud(rng, n);
    const PointCloud t = oracle::random_cloud(rng, n);
    EXPECT_NEAR(emd_exact(s, t), oracle::permutation_emd(s.coordinates(), t.coordinates()),
                1e-9);
  }
  EXPECT_THROW(emd_exact(oracle::random_cloud(rng, 3), oracle::random_cloud(rng, 4)),
               std::invalid_argument);
}

TEST(Chamfer, MatchesNestedLoops) {
  std::mt19937_64 rng(14);
  const PointCloud s = oracle::random_cloud(rng, 150);
  const PointCloud t = oracle::random_cloud(rng, 90);
  auto directed = [](const PointCloud& a, const PointCloud& b) {
    double sum = 0.0;
    for (const auto& p : a.points()) {
      double best = 1e300;
      for (const auto& q : b.points()) best = std::min(best, (p - q).squaredNorm());
      sum += best;
    }
    return sum;
  };
  EXPECT_NEAR(chamfer(s, t), directed(s, t) + directed(t, s), 1e-12);
}

TEST(Mmd, MatchesNestedLoops) {
  std::mt19937_64 rng(15);
  const PointCloud s = oracle::random_cloud(rng, 20);
  const PointCloud t = oracle::random_cloud(rng, 25, 0.3, 1.3);
  const double sigma = 0.4;
  auto k = [&](const PointCloud& a, const PointCloud& b) {
    double sum = 0.0;
    for (const auto& p : a.points())
      for (const auto& q : b.points()) sum += std::exp(-(p - q).squaredNorm() / (2 * sigma * sigma));
    return sum / static_cast<double>(a.size() * b.size());
  };
  const double want = std::sqrt(k(s, s) + k(t, t) - 2 * k(s, t));
  EXPECT_NEAR(mmd(s, t, {sigma}), want, 1e-12);
}

TEST(Jsd, BoundsAndDisjointSupport) {
  PointCloud a({{-10, -10, 0}, {-11, -10, 0}});
  PointCloud b({{10, 10, 0}});
  const double d = jsd(a, b);
  EXPECT_NEAR(d, std::numbers::ln2, 1e-6);
  EXPECT_LE(d, std::numbers::ln2);
  EXPECT_EQ(jsd(a, a), 0.0);
  EXPECT_THROW(jsd(PointCloud({{100, 0, 0}}), a), std::invalid_argument);
}

TEST(Histogram, ClosedUpperEdgeAndNormalised) {
  HistogramConfig cfg{2, 2, 0, 1, 0, 1, 0.0};
  const auto h = bev_histogram(PointCloud({{1, 1, 0}, {0, 0, 0}, {2, 0, 0}}), cfg);
  EXPECT_DOUBLE_EQ(h[3], 0.5);
  EXPECT_DOUBLE_EQ(h[0], 0.5);
  cfg.bins_x = 0;
  EXPECT_THROW(bev_histogram(PointCloud({{0, 0, 0}}), cfg), std::invalid_argument);
}

TEST(Metrics, SelfComparisonAndSymmetry) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud s = oracle::random_cloud(rng, 30, -20, 20);
    const PointCloud t = oracle::random_cloud(rng, 30, -20, 20);
    EXPECT_EQ(chamfer(s, s), 0.0);
    EXPECT_LE(emd_exact(s, s), 1e-12);
    EXPECT_LE(mmd(s, s), 1e-12);
    EXPECT_LE(jsd(s, s), 1e-12);
    EXPECT_NEAR(chamfer(s, t), chamfer(t, s), 1e-12);
    EXPECT_NEAR(emd_exact(s, t), emd_exact(t, s), 1e-12);
    EXPECT_NEAR(mmd(s, t), mmd(t, s), 1e-12);
    EXPECT_NEAR(jsd(s, t), jsd(t, s), 1e-12);
  }
}

TEST(Rmse, RangesOfCoValidCells) {
  RangeImage a(1, 3), b(1, 3);
  a.set_point(0, 0, {3, 0, 0});
  b.set_point(0, 0, {0, 4, 0});
  a.set_point(0, 1, {1, 0, 0});
  b.set_point(0, 1, {0, 0, 4});
  a.set_point(0, 2, {9, 0, 0});
  EXPECT_DOUBLE_EQ(rmse(a, b), std::sqrt((1.0 + 9.0) / 2.0));
  EXPECT_THROW(rmse(RangeImage(1, 3), b), std::invalid_argument);
}

TEST(MedianBandwidth, PooledPairs) {
  PointCloud a({{0, 0, 0}, {1, 0, 0}});
  PointCloud b({{3, 0, 0}});
  // distances 1, 2, 3
  EXPECT_DOUBLE_EQ(median_bandwidth(a, b), 2.0);
  EXPECT_DOUBLE_EQ(median_bandwidth(PointCloud({{1, 1, 1}}), PointCloud({{1, 1, 1}})), 1.0);
}
