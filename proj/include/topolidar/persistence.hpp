#ifndef TOPOLIDAR_PERSISTENCE_HPP
#define TOPOLIDAR_PERSISTENCE_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "topolidar/geometry.hpp"

namespace topolidar {

/// Edge of a filtration; u < v always.
struct FiltrationEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double value = 0.0;

  bool operator==(const FiltrationEdge&) const = default;
};

/// Strict total order used for every filtration: (value, u, v).
inline bool edge_less(const FiltrationEdge& a, const FiltrationEdge& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  /// Edge whose insertion merged the dying component away.
  FiltrationEdge generator;

  double persistence() const { return death - birth; }
};

/// 0-dimensional persistence diagram. Finite pairs appear in the order the
/// killing edges enter the filtration.
struct PersistenceDiagram {
  std::vector<PersistencePair> finite_pairs;
  std::vector<double> essential_births;
};

/// Disjoint-set forest with path halving and union by birth (elder rule).
class ComponentForest {
 public:
  explicit ComponentForest(std::vector<double> births);

  std::size_t find(std::size_t x);
  double birth(std::size_t root) const { return birth_[root]; }

  /// Merges the components of a and b. Returns the root that dies: the one
  /// with the later birth, or on equal births the larger root index.
  /// Returns nullopt if a and b were already connected.
  std::optional<std::size_t> merge(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<double> birth_;
};

/// Minimum spanning forest of the complete Euclidean graph on the rows of
/// `points`, restricted to edges of length <= alpha_max when given. Edges are
/// returned sorted by (value, u, v); with that strict order the forest is
/// unique, so it coincides with Kruskal's output.
std::vector<FiltrationEdge> euclidean_msf(const FeatureMatrix& points,
                                          std::optional<double> alpha_max = {});

/**
 * @brief 0-dim persistence of the flag (Vietoris-Rips) filtration.
 *
 * All vertices are born at 0; each finite death is a minimum spanning forest
 * edge length. Pairs with zero persistence (coincident points) are kept, so an
 * uncapped n-point input always yields n - 1 finite pairs and one essential
 * bar.
 */
PersistenceDiagram flag_ph0(const FeatureMatrix& points,
                            std::optional<double> alpha_max = {});
PersistenceDiagram flag_ph0(const PointCloud& cloud,
                            std::optional<double> alpha_max = {});

/// Row-major scalar field for sub-level filtrations.
struct ScalarGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

enum class GridConnectivity {
  Four,
  /// 4-neighborhood plus the (r,c)-(r+1,c+1) diagonal of every cell.
  Triangulated,
};

struct SublevelOptions {
  GridConnectivity connectivity = GridConnectivity::Four;
  bool keep_zero_persistence = false;
};

/// Edges of the grid complex valued by the max of their endpoints, sorted.
std::vector<FiltrationEdge> grid_edges(const ScalarGrid& grid,
                                       GridConnectivity connectivity);

/// 0-dim persistence of the sub-level filtration of a scalar grid.
PersistenceDiagram sublevel_ph0(const ScalarGrid& grid,
                                const SublevelOptions& options = {});

/// Number of bars alive at alpha: birth <= alpha < death.
std::size_t betti0_at(const PersistenceDiagram& diagram, double alpha);

}  // namespace topolidar

#endif  // TOPOLIDAR_PERSISTENCE_HPP
