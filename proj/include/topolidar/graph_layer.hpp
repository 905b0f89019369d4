#ifndef TOPOLIDAR_GRAPH_LAYER_HPP
#define TOPOLIDAR_GRAPH_LAYER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "topolidar/geometry.hpp"

namespace topolidar {

/// Linear edge map of shape D_out x (2 * D_in), applied to [h_i ; h_j - h_i].
struct LayerWeights {
  FeatureMatrix matrix;
  std::uint64_t seed = 0;

  std::size_t input_dim() const {
    return static_cast<std::size_t>(matrix.cols() / 2);
  }
  std::size_t output_dim() const {
    return static_cast<std::size_t>(matrix.rows());
  }
};

/// Uniform in [-1/sqrt(2 D_in), 1/sqrt(2 D_in)], reproducible across
/// platforms for a given seed.
LayerWeights seeded_weights(std::size_t d_in, std::size_t d_out,
                            std::uint64_t seed);

/// [I | 0]: passes each node's own features through unchanged.
LayerWeights identity_block_weights(std::size_t dim);

/**
 * One LiDAR graph layer: out_i = max over neighbors j of
 * W * [h_i ; h_j - h_i], elementwise. Dot products accumulate in column order
 * so results are bit-reproducible.
 */
FeatureMatrix graph_layer_forward(const FeatureMatrix& features,
                                  const KnnGraph& graph,
                                  const LayerWeights& weights);

/// Stacks layers, rebuilding the k-NN graph in each layer's input space.
/// Returns every layer's output.
std::vector<FeatureMatrix> stack_encoder(const FeatureMatrix& input,
                                         const std::vector<LayerWeights>& layers,
                                         std::size_t k);

/// Seeded variant: layer l uses seeded_weights(..., derive_seed(seed, l)).
std::vector<FeatureMatrix> stack_encoder(const PointCloud& cloud,
                                         const std::vector<std::size_t>& widths,
                                         std::size_t k, std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace topolidar

#endif  // TOPOLIDAR_GRAPH_LAYER_HPP
