#include "topolidar/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace topolidar {

ComponentForest::ComponentForest(std::vector<double> births)
    : parent_(births.size()), birth_(std::move(births)) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t ComponentForest::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

std::optional<std::size_t> ComponentForest::merge(std::size_t a, std::size_t b) {
  std::size_t ra = find(a);
  std::size_t rb = find(b);
  if (ra == rb) return std::nullopt;
  // ra survives
  if (birth_[rb] < birth_[ra] || (birth_[rb] == birth_[ra] && rb < ra)) {
    std::swap(ra, rb);
  }
  parent_[rb] = ra;
  return rb;
}

std::vector<FiltrationEdge> euclidean_msf(const FeatureMatrix& points,
                                          std::optional<double> alpha_max) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<FiltrationEdge> forest;
  if (n < 2) return forest;
  forest.reserve(n - 1);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[v]: lightest known edge from the current tree to v
  std::vector<FiltrationEdge> best(n, FiltrationEdge{0, 0, kInf});
  std::vector<char> reached(n, 0);
  std::vector<char> in_tree(n, 0);
  std::size_t next_root = 0;
  std::size_t added = 0;

  auto relax_from = [&](std::size_t u) {
    const auto ui = static_cast<Eigen::Index>(u);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = std::sqrt(
          squared_distance(points, ui, points, static_cast<Eigen::Index>(v)));
      if (alpha_max && w > *alpha_max) continue;
      const FiltrationEdge e{std::min(u, v), std::max(u, v), w};
      if (!reached[v] || edge_less(e, best[v])) {
        best[v] = e;
        reached[v] = 1;
      }
    }
  };

  while (added < n) {
    // start a new component at the smallest vertex not yet reached
    while (in_tree[next_root]) ++next_root;
    in_tree[next_root] = 1;
    ++added;
    relax_from(next_root);

    for (;;) {
      std::size_t pick = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (in_tree[v] || !reached[v]) continue;
        if (pick == n || edge_less(best[v], best[pick])) pick = v;
      }
      if (pick == n) break;
      in_tree[pick] = 1;
      ++added;
      forest.push_back(best[pick]);
      relax_from(pick);
    }
  }

  std::sort(forest.begin(), forest.end(), edge_less);
  return forest;
}

PersistenceDiagram flag_ph0(const FeatureMatrix& points,
                            std::optional<double> alpha_max) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 1) throw std::invalid_argument("empty input");
  if (!points.allFinite()) throw std::invalid_argument("non-finite coordinate");
  if (alpha_max && !(*alpha_max >= 0.0)) {
    throw std::invalid_argument("alpha_max must be non-negative");
  }

  PersistenceDiagram pd;
  ComponentForest forest(std::vector<double>(n, 0.0));
  for (const auto& e : euclidean_msf(points, alpha_max)) {
    const auto dying = forest.merge(e.u, e.v);
    if (!dying) continue;
    pd.finite_pairs.push_back({forest.birth(*dying), e.value, e});
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (forest.find(v) == v) pd.essential_births.push_back(forest.birth(v));
  }
  return pd;
}

PersistenceDiagram flag_ph0(const PointCloud& cloud,
                            std::optional<double> alpha_max) {
  return flag_ph0(cloud.coordinates(), alpha_max);
}

std::vector<FiltrationEdge> grid_edges(const ScalarGrid& grid,
                                       GridConnectivity connectivity) {
  std::vector<FiltrationEdge> edges;
  const std::size_t rows = grid.rows;
  const std::size_t cols = grid.cols;
  edges.reserve(rows * cols * 3);
  auto add = [&](std::size_t a, std::size_t b) {
    edges.push_back({a, b, std::max(grid.values[a], grid.values[b])});
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t id = r * cols + c;
      if (c + 1 < cols) add(id, id + 1);
      if (r + 1 < rows) add(id, id + cols);
      if (connectivity == GridConnectivity::Triangulated && r + 1 < rows &&
          c + 1 < cols) {
        add(id, id + cols + 1);
      }
    }
  }
  std::sort(edges.begin(), edges.end(), edge_less);
  return edges;
}

PersistenceDiagram sublevel_ph0(const ScalarGrid& grid,
                                const SublevelOptions& options) {
  if (grid.rows == 0 || grid.cols == 0) {
    throw std::invalid_argument("empty input");
  }
  if (grid.values.size() != grid.rows * grid.cols) {
    throw std::invalid_argument("grid size does not match its dimensions");
  }
  for (double v : grid.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite grid value");
  }

  PersistenceDiagram pd;
  ComponentForest forest(grid.values);
  for (const auto& e : grid_edges(grid, options.connectivity)) {
    const auto dying = forest.merge(e.u, e.v);
    if (!dying) continue;
    const double birth = forest.birth(*dying);
    if (birth == e.value && !options.keep_zero_persistence) continue;
    pd.finite_pairs.push_back({birth, e.value, e});
  }
  for (std::size_t v = 0; v < grid.values.size(); ++v) {
    if (forest.find(v) == v) pd.essential_births.push_back(forest.birth(v));
  }
  return pd;
}

std::size_t betti0_at(const PersistenceDiagram& diagram, double alpha) {
  std::size_t count = 0;
  for (const auto& p : diagram.finite_pairs) {
    if (p.birth <= alpha && alpha < p.death) ++count;
  }
  for (double b : diagram.essential_births) {
    if (b <= alpha) ++count;
  }
  return count;
}

}  // namespace topolidar
