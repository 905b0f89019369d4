#ifndef TOPOLIDAR_BACKBONE_HPP
#define TOPOLIDAR_BACKBONE_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "topolidar/geometry.hpp"

namespace topolidar {

struct OptimizerConfig {
  std::size_t steps = 200;
  double step_size = 0.05;
  /// Weight of the mean per-point L1 pull toward the target.
  double anchor_weight = 0.0;
  bool backtracking = true;
  std::size_t record_every = 10;
  double armijo_c = 1e-4;
  std::size_t max_halvings = 40;
  /// Let points joined by an MST edge that a step would close move as one
  /// group. Only used together with backtracking.
  bool merge_collapsed = true;

  void validate() const;
};

struct LossRecord {
  std::size_t step = 0;
  double topo = 0.0;
  /// Weighted anchor term, so total = topo + anchor.
  double anchor = 0.0;
  double total = 0.0;
};

struct Snapshot {
  std::size_t step = 0;
  PointCloud cloud;
  double topo = 0.0;
  double anchor = 0.0;
};

struct OptimizationTrace {
  std::vector<Snapshot> snapshots;
  /// One record per step, including step 0.
  std::vector<LossRecord> history;
  PointCloud final;
};

/**
 * @brief Gradient descent on point coordinates under the topological loss.
 *
 * Minimizes topo_loss(flag_ph0(X)) + anchor_weight * mean_i |x_i - t_i|_1.
 * The MST, and with it the active gradient, is recomputed at every
 * evaluation. With backtracking, a step is halved until the sufficient
 * decrease condition f(x') <= f(x) - c |x' - x|^2 / eta holds (plain Armijo for
 * an ordinary gradient step); if no step qualifies the iterate stays put, so
 * the recorded loss never increases.
 *
 * The loss is a sum of distances and is not differentiable where an MST edge
 * has length zero, so plain steps stall once an edge is shorter than the step.
 * With merge_collapsed, the endpoints of every MST edge that a step of size
 * eta would close (length <= eta * |g_u - g_v|) are grouped; each group snaps
 * to its centroid and follows its mean gradient. Points that have merged
 * stay merged.
 *
 * Snapshots are taken at step 0, every record_every steps, and at the final
 * step. Throws std::runtime_error naming the step if the loss or gradient
 * becomes non-finite.
 */
OptimizationTrace optimize_backbone(const PointCloud& cloud,
                                    const std::optional<PointCloud>& target,
                                    const OptimizerConfig& cfg);

}  // namespace topolidar

#endif  // TOPOLIDAR_BACKBONE_HPP
