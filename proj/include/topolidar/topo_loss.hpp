#ifndef TOPOLIDAR_TOPO_LOSS_HPP
#define TOPOLIDAR_TOPO_LOSS_HPP

#include <vector>

#include "topolidar/geometry.hpp"
#include "topolidar/persistence.hpp"

namespace topolidar {

/// Sum of (death - birth) over finite pairs; essential bars are excluded.
double topo_loss(const PersistenceDiagram& diagram);

struct TopoLossReport {
  double loss = 0.0;
  /// n x D, same shape as the input coordinates.
  FeatureMatrix per_point_grad;
  /// Minimum spanning tree edges in filtration order.
  std::vector<FiltrationEdge> contributing_edges;
  /// Set when an MST edge joins two coincident points; that edge contributes
  /// a zero subgradient.
  bool degenerate = false;
};

/**
 * Flag-filtration topological loss and its gradient with respect to the input
 * coordinates. Each MST edge (u, v) of length w adds (x_u - x_v) / w to row u
 * and subtracts it from row v. Works in any dimension, so it applies equally
 * to 3-D points and to encoder embeddings.
 */
TopoLossReport topo_loss_grad(const FeatureMatrix& points);
TopoLossReport topo_loss_grad(const PointCloud& cloud);

/// Mean over co-valid cells of |dx| + |dy| + |dz|; zero when no cell is
/// valid in both images.
double absolute_error(const RangeImage& a, const RangeImage& b);

/**
 * Training objective: topological loss of the augmented scan, plus the
 * topological loss of each embedding (Euclidean in feature space), plus the
 * absolute error against the target.
 */
double total_loss(const RangeImage& augmented, const RangeImage& target,
                  const std::vector<FeatureMatrix>& embeddings);

}  // namespace topolidar

#endif  // TOPOLIDAR_TOPO_LOSS_HPP
