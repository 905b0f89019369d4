#ifndef TOPOLIDAR_KDTREE_HPP
#define TOPOLIDAR_KDTREE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "topolidar/geometry.hpp"

namespace topolidar {

struct Neighbor {
  std::size_t index = 0;
  double sq_distance = 0.0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    if (a.sq_distance != b.sq_distance) return a.sq_distance < b.sq_distance;
    return a.index < b.index;
  }
};

/**
 * @brief Exact kd-tree over the rows of a feature matrix.
 *
 * Queries return the same neighbors, in the same (distance, index) order, as
 * an exhaustive scan using squared_distance(). Pruning only discards a
 * subtree when its splitting plane is strictly farther than the current
 * k-th candidate, so equal-distance candidates with smaller indices are never
 * lost.
 */
class KdTree {
 public:
  explicit KdTree(FeatureMatrix points, std::size_t leaf_size = 16);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }

  /// k nearest rows to `query`, optionally skipping one index (self).
  std::vector<Neighbor> knn(std::span<const double> query, std::size_t k,
                            std::optional<std::size_t> exclude = {}) const;

  Neighbor nearest(std::span<const double> query) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t split_dim = 0;
    double split_value = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, std::span<const double> query, std::size_t k,
              std::optional<std::size_t> exclude,
              std::vector<Neighbor>& heap) const;
  double row_sq_distance(std::span<const double> query, std::size_t row) const;

  FeatureMatrix points_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace topolidar

#endif  // TOPOLIDAR_KDTREE_HPP
