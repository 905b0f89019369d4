#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "topolidar/graph_layer.hpp"

using namespace topolidar;

namespace {

// Nested-loop evaluation of max_j W [h_i ; h_j - h_i].
FeatureMatrix reference_layer(const FeatureMatrix& h, const KnnGraph& g,
                              const FeatureMatrix& w) {
  const Eigen::Index d = h.cols();
  FeatureMatrix out(h.rows(), w.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index o = 0; o < w.rows(); ++o) {
      double best = -1e300;
      for (std::size_t j : g.neighbors[static_cast<std::size_t>(i)]) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) acc += w(o, c) * h(i, c);
        for (Eigen::Index c = 0; c < d; ++c)
          acc += w(o, d + c) * (h(static_cast<Eigen::Index>(j), c) - h(i, c));
        best = std::max(best, acc);
      }
      out(i, o) = best;
    }
  }
  return out;
}

}  // namespace

TEST(GraphLayer, MatchesNestedLoops) {
  std::mt19937_64 rng(12);
  const FeatureMatrix h = oracle::random_points(rng, 40, 5, -1, 1);
  const KnnGraph g = knn_graph(h, 7);
  const LayerWeights w = seeded_weights(5, 9, 77);
  const FeatureMatrix got = graph_layer_forward(h, g, w);
  const FeatureMatrix want = reference_layer(h, g, w.matrix);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GraphLayer, IdentityBlockReproducesInput) {
  std::mt19937_64 rng(4);
  const FeatureMatrix h = oracle::random_points(rng, 30, 3, -5, 5);
  const auto out = stack_encoder(h, {identity_block_weights(3), identity_block_weights(3)}, 5);
  EXPECT_EQ(out[0], h);
  EXPECT_EQ(out[1], h);
}

TEST(GraphLayer, PermutationEquivariant) {
  std::mt19937_64 rng(6);
  const PointCloud cloud = oracle::random_cloud(rng, 30);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Point3> shuffled;
  for (std::size_t i : perm) shuffled.push_back(cloud[i]);
  const auto a = stack_encoder(cloud, {8, 16}, 6, 99);
  const auto b = stack_encoder(PointCloud(shuffled), {8, 16}, 6, 99);
  for (std::size_t l = 0; l < a.size(); ++l) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
      EXPECT_EQ(b[l].row(static_cast<Eigen::Index>(i)),
                a[l].row(static_cast<Eigen::Index>(perm[i])));
    }
  }
}

TEST(GraphLayer, SeedsAreReproducibleAndDistinct) {
  const LayerWeights a = seeded_weights(3, 4, 5);
  EXPECT_EQ(a.matrix, seeded_weights(3, 4, 5).matrix);
  EXPECT_NE(a.matrix, seeded_weights(3, 4, 6).matrix);
  EXPECT_LE(a.matrix.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(6.0));
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(GraphLayer, ShapeChecks) {
  const FeatureMatrix h = FeatureMatrix::Random(10, 3);
  const KnnGraph g = knn_graph(h, 3);
  EXPECT_THROW(graph_layer_forward(h, g, seeded_weights(4, 2, 1)), std::invalid_argument);
  EXPECT_THROW(graph_layer_forward(h.topRows(9), g, seeded_weights(3, 2, 1)),
               std::invalid_argument);
  EXPECT_THROW(stack_encoder(h, {}, 3), std::invalid_argument);
  const auto out = stack_encoder(PointCloud::from_matrix(h), {4, 2}, 3, 1);
  EXPECT_EQ(out[0].cols(), 4);
  EXPECT_EQ(out[1].cols(), 2);
}
