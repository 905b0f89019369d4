#include "topolidar/graph_layer.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "topolidar/parallel.hpp"

namespace topolidar {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LayerWeights seeded_weights(std::size_t d_in, std::size_t d_out,
                            std::uint64_t seed) {
  if (d_in < 1 || d_out < 1) {
    throw std::invalid_argument("layer dimensions must be positive");
  }
  const double bound = 1.0 / std::sqrt(2.0 * static_cast<double>(d_in));
  // mt19937_64 output is fully specified; std::uniform_real_distribution is
  // not, so map the raw bits ourselves.
  std::mt19937_64 rng(seed);
  LayerWeights w;
  w.seed = seed;
  w.matrix.resize(static_cast<Eigen::Index>(d_out),
                  static_cast<Eigen::Index>(2 * d_in));
  for (Eigen::Index r = 0; r < w.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.matrix.cols(); ++c) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w.matrix(r, c) = (2.0 * u - 1.0) * bound;
    }
  }
  return w;
}

LayerWeights identity_block_weights(std::size_t dim) {
  LayerWeights w;
  const auto d = static_cast<Eigen::Index>(dim);
  w.matrix = FeatureMatrix::Zero(d, 2 * d);
  w.matrix.leftCols(d).setIdentity();
  return w;
}

FeatureMatrix graph_layer_forward(const FeatureMatrix& features,
                                  const KnnGraph& graph,
                                  const LayerWeights& weights) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d_in = features.cols();
  if (static_cast<std::size_t>(n) != graph.n || graph.neighbors.size() != graph.n) {
    throw std::invalid_argument("graph size does not match feature rows");
  }
  if (weights.matrix.cols() != 2 * d_in) {
    throw std::invalid_argument("weight shape does not match input dimension");
  }
  if (!weights.matrix.allFinite()) {
    throw std::invalid_argument("non-finite layer weight");
  }
  const Eigen::Index d_out = weights.matrix.rows();
  const FeatureMatrix& w = weights.matrix;

  FeatureMatrix out(n, d_out);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t node) {
    const auto i = static_cast<Eigen::Index>(node);
    std::vector<double> edge(static_cast<std::size_t>(2 * d_in));
    for (Eigen::Index o = 0; o < d_out; ++o) {
      out(i, o) = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t nb : graph.neighbors[node]) {
      const auto j = static_cast<Eigen::Index>(nb);
      for (Eigen::Index d = 0; d < d_in; ++d) {
        edge[static_cast<std::size_t>(d)] = features(i, d);
        edge[static_cast<std::size_t>(d_in + d)] = features(j, d) - features(i, d);
      }
      for (Eigen::Index o = 0; o < d_out; ++o) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < 2 * d_in; ++c) {
          acc += w(o, c) * edge[static_cast<std::size_t>(c)];
        }
        if (acc > out(i, o)) out(i, o) = acc;
      }
    }
  });
  return out;
}

std::vector<FeatureMatrix> stack_encoder(const FeatureMatrix& input,
                                         const std::vector<LayerWeights>& layers,
                                         std::size_t k) {
  if (layers.empty()) throw std::invalid_argument("encoder needs at least one layer");
  std::vector<FeatureMatrix> outputs;
  outputs.reserve(layers.size());
  const FeatureMatrix* current = &input;
  for (const auto& layer : layers) {
    const KnnGraph graph = knn_graph(*current, k);
    outputs.push_back(graph_layer_forward(*current, graph, layer));
    current = &outputs.back();
  }
  return outputs;
}

std::vector<FeatureMatrix> stack_encoder(const PointCloud& cloud,
                                         const std::vector<std::size_t>& widths,
                                         std::size_t k, std::uint64_t seed) {
  if (widths.empty()) throw std::invalid_argument("encoder needs at least one layer");
  std::vector<LayerWeights> layers;
  layers.reserve(widths.size());
  std::size_t d_in = 3;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    layers.push_back(seeded_weights(d_in, widths[l], derive_seed(seed, l)));
    d_in = widths[l];
  }
  return stack_encoder(cloud.coordinates(), layers, k);
}

}  // namespace topolidar
