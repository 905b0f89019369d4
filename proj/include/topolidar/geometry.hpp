#ifndef TOPOLIDAR_GEOMETRY_HPP
#define TOPOLIDAR_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace topolidar {

using Point3 = Eigen::Vector3d;

/// Row-major n x D matrix; one row per node (coordinates or embedding).
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * @brief Ordered set of 3-D points with optional per-point features.
 *
 * Construction rejects non-finite coordinates and feature matrices whose row
 * count does not match the point count. An empty feature matrix means "no
 * features".
 */
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points, FeatureMatrix features = {});

  static PointCloud from_matrix(const FeatureMatrix& xyz);

  const std::vector<Point3>& points() const { return points_; }
  const FeatureMatrix& features() const { return features_; }
  bool has_features() const { return features_.size() > 0; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

  /// n x 3 coordinate matrix.
  FeatureMatrix coordinates() const;

 private:
  std::vector<Point3> points_;
  FeatureMatrix features_;
};

struct RangeCell {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double range = 0.0;
  bool valid = false;

  bool operator==(const RangeCell&) const = default;
};

/// H x W grid of projected returns, row-major. Invalid cells hold zeros.
class RangeImage {
 public:
  RangeImage() = default;
  RangeImage(std::size_t height, std::size_t width);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t cell_count() const { return cells_.size(); }

  RangeCell& at(std::size_t row, std::size_t col) {
    return cells_[row * width_ + col];
  }
  const RangeCell& at(std::size_t row, std::size_t col) const {
    return cells_[row * width_ + col];
  }
  const std::vector<RangeCell>& cells() const { return cells_; }

  /// Marks a cell valid with the given coordinates; range is derived.
  void set_point(std::size_t row, std::size_t col, const Point3& p);
  void invalidate(std::size_t row, std::size_t col);

  std::size_t valid_count() const;
  bool same_shape(const RangeImage& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const RangeImage&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<RangeCell> cells_;
};

struct ProjectionConfig {
  std::size_t height = 64;
  std::size_t width = 1024;
  double fov_up_deg = 3.0;
  double fov_down_deg = -25.0;

  void validate() const;
};

struct PixelCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const PixelCoord&) const = default;
};

/// Spherical projection of a single point; the point must have range > 0.
PixelCoord project_point(const Point3& p, const ProjectionConfig& cfg);

/// Projects a cloud into a range image; on collision the nearer return wins.
/// Points at the origin are skipped.
RangeImage to_range_image(const PointCloud& cloud, const ProjectionConfig& cfg);

/// One point per valid cell, row-major.
PointCloud to_point_cloud(const RangeImage& img);

/// Keeps every row_stride-th row and every col_stride-th column.
RangeImage sparsify(const RangeImage& img, std::size_t row_stride,
                    std::size_t col_stride);

struct KnnGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  /// neighbors[i] sorted ascending by (distance, index).
  std::vector<std::vector<std::size_t>> neighbors;
};

/// Exact k-nearest-neighbor graph over the rows of `points` (Euclidean).
/// k is clamped to n - 1. Ties in distance go to the smaller index.
KnnGraph knn_graph(const FeatureMatrix& points, std::size_t k);

/// Squared Euclidean distance between two rows, summed in dimension order.
inline double squared_distance(const FeatureMatrix& a, Eigen::Index i,
                               const FeatureMatrix& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index d = 0; d < a.cols(); ++d) {
    const double diff = a(i, d) - b(j, d);
    s += diff * diff;
  }
  return s;
}

}  // namespace topolidar

#endif  // TOPOLIDAR_GEOMETRY_HPP
