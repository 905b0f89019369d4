#include "topolidar/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace topolidar {

KdTree::KdTree(FeatureMatrix points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  order_.resize(size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) {
    nodes_.reserve(2 * (size() / leaf_size_ + 1));
    build(0, size());
  }
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end, 0, 0.0, -1, -1});
  if (end - begin <= leaf_size_ || dim() == 0) return id;

  // split on the dimension of largest spread
  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim(); ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = points_(static_cast<Eigen::Index>(order_[i]),
                               static_cast<Eigen::Index>(d));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all coincident

  const std::size_t mid = begin + (end - begin) / 2;
  const auto col = static_cast<Eigen::Index>(best_dim);
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return points_(static_cast<Eigen::Index>(a), col) <
                            points_(static_cast<Eigen::Index>(b), col);
                   });
  const double split = points_(static_cast<Eigen::Index>(order_[mid]), col);

  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.split_dim = best_dim;
  node.split_value = split;
  node.left = left;
  node.right = right;
  return id;
}

double KdTree::row_sq_distance(std::span<const double> query,
                               std::size_t row) const {
  double s = 0.0;
  const auto r = static_cast<Eigen::Index>(row);
  for (std::size_t d = 0; d < query.size(); ++d) {
    const double diff = query[d] - points_(r, static_cast<Eigen::Index>(d));
    s += diff * diff;
  }
  return s;
}

void KdTree::search(int node_id, std::span<const double> query, std::size_t k,
                    std::optional<std::size_t> exclude,
                    std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      if (exclude && *exclude == idx) continue;
      const Neighbor cand{idx, row_sq_distance(query, idx)};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }

  const double diff = query[node.split_dim] - node.split_value;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, query, k, exclude, heap);
  const double plane = diff * diff;
  if (heap.size() < k || !(plane > heap.front().sq_distance)) {
    search(far, query, k, exclude, heap);
  }
}

std::vector<Neighbor> KdTree::knn(std::span<const double> query, std::size_t k,
                                  std::optional<std::size_t> exclude) const {
  if (query.size() != dim()) {
    throw std::invalid_argument("kd-tree query dimension mismatch");
  }
  std::vector<Neighbor> heap;
  if (k == 0 || nodes_.empty()) return heap;
  heap.reserve(k + 1);
  search(0, query, k, exclude, heap);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

Neighbor KdTree::nearest(std::span<const double> query) const {
  auto result = knn(query, 1);
  if (result.empty()) throw std::invalid_argument("empty input");
  return result.front();
}

}  // namespace topolidar
