#include "topolidar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "topolidar/kdtree.hpp"
#include "topolidar/parallel.hpp"

namespace topolidar {

PointCloud::PointCloud(std::vector<Point3> points, FeatureMatrix features)
    : points_(std::move(points)), features_(std::move(features)) {
  for (const auto& p : points_) {
    if (!p.allFinite()) throw std::invalid_argument("non-finite coordinate");
  }
  if (features_.size() > 0 &&
      static_cast<std::size_t>(features_.rows()) != points_.size()) {
    throw std::invalid_argument("feature rows do not match point count");
  }
  if (features_.size() > 0 && !features_.allFinite()) {
    throw std::invalid_argument("non-finite feature value");
  }
}

PointCloud PointCloud::from_matrix(const FeatureMatrix& xyz) {
  if (xyz.rows() > 0 && xyz.cols() != 3) {
    throw std::invalid_argument("expected an n x 3 coordinate matrix");
  }
  std::vector<Point3> pts;
  pts.reserve(static_cast<std::size_t>(xyz.rows()));
  for (Eigen::Index i = 0; i < xyz.rows(); ++i) {
    pts.emplace_back(xyz(i, 0), xyz(i, 1), xyz(i, 2));
  }
  return PointCloud(std::move(pts));
}

FeatureMatrix PointCloud::coordinates() const {
  FeatureMatrix m(static_cast<Eigen::Index>(points_.size()), 3);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = points_[i].transpose();
  }
  return m;
}

RangeImage::RangeImage(std::size_t height, std::size_t width)
    : height_(height), width_(width), cells_(height * width) {}

void RangeImage::set_point(std::size_t row, std::size_t col, const Point3& p) {
  RangeCell& c = at(row, col);
  c.x = p.x();
  c.y = p.y();
  c.z = p.z();
  c.range = p.norm();
  c.valid = c.range > 0.0;
  if (!c.valid) c = RangeCell{};
}

void RangeImage::invalidate(std::size_t row, std::size_t col) {
  at(row, col) = RangeCell{};
}

std::size_t RangeImage::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(),
                    [](const RangeCell& c) { return c.valid; }));
}

void ProjectionConfig::validate() const {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("projection grid must be at least 1x1");
  }
  if (!(fov_up_deg > fov_down_deg)) {
    throw std::invalid_argument("fov_up must exceed fov_down");
  }
}

namespace {

std::size_t clamp_index(double v, std::size_t size) {
  const double f = std::floor(v);
  if (!(f > 0.0)) return 0;
  const double hi = static_cast<double>(size - 1);
  return f >= hi ? size - 1 : static_cast<std::size_t>(f);
}

}  // namespace

PixelCoord project_point(const Point3& p, const ProjectionConfig& cfg) {
  const double range = p.norm();
  const double pitch = std::asin(std::clamp(p.z() / range, -1.0, 1.0));
  const double up = cfg.fov_up_deg * std::numbers::pi / 180.0;
  const double down = cfg.fov_down_deg * std::numbers::pi / 180.0;
  const double v = (1.0 - (pitch - down) / (up - down)) *
                   static_cast<double>(cfg.height);
  const double u = 0.5 * (1.0 - std::atan2(p.y(), p.x()) / std::numbers::pi) *
                   static_cast<double>(cfg.width);
  return {clamp_index(v, cfg.height), clamp_index(u, cfg.width)};
}

RangeImage to_range_image(const PointCloud& cloud, const ProjectionConfig& cfg) {
  if (cloud.empty()) throw std::invalid_argument("empty input");
  cfg.validate();

  RangeImage img(cfg.height, cfg.width);
  for (const auto& p : cloud.points()) {
    const double range = p.norm();
    if (!(range > 0.0)) continue;
    const PixelCoord px = project_point(p, cfg);
    const RangeCell& cell = img.at(px.row, px.col);
    if (!cell.valid || range < cell.range) img.set_point(px.row, px.col, p);
  }
  return img;
}

PointCloud to_point_cloud(const RangeImage& img) {
  std::vector<Point3> pts;
  pts.reserve(img.valid_count());
  for (const auto& c : img.cells()) {
    if (c.valid) pts.emplace_back(c.x, c.y, c.z);
  }
  return PointCloud(std::move(pts));
}

RangeImage sparsify(const RangeImage& img, std::size_t row_stride,
                    std::size_t col_stride) {
  if (row_stride < 1 || col_stride < 1 || img.height() % row_stride != 0 ||
      img.width() % col_stride != 0) {
    throw std::invalid_argument("stride mismatch");
  }
  RangeImage out(img.height() / row_stride, img.width() / col_stride);
  for (std::size_t r = 0; r < out.height(); ++r) {
    for (std::size_t c = 0; c < out.width(); ++c) {
      out.at(r, c) = img.at(r * row_stride, c * col_stride);
    }
  }
  return out;
}

KnnGraph knn_graph(const FeatureMatrix& points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 2) throw std::invalid_argument("degenerate graph");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!points.allFinite()) throw std::invalid_argument("non-finite coordinate");

  KnnGraph g;
  g.n = n;
  g.k = std::min(k, n - 1);
  g.neighbors.assign(n, {});

  const bool use_tree = points.cols() <= 8 && n >= 128;
  if (use_tree) {
    const KdTree tree(points);
    parallel_for(n, [&](std::size_t i) {
      const auto row = static_cast<Eigen::Index>(i);
      std::vector<double> q(points.row(row).begin(), points.row(row).end());
      const auto nb = tree.knn(q, g.k, i);
      auto& out = g.neighbors[i];
      out.reserve(nb.size());
      for (const auto& x : nb) out.push_back(x.index);
    });
    return g;
  }

  parallel_for(n, [&](std::size_t i) {
    std::vector<Neighbor> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.push_back({j, squared_distance(points, static_cast<Eigen::Index>(i),
                                          points, static_cast<Eigen::Index>(j))});
    }
    std::partial_sort(cand.begin(),
                      cand.begin() + static_cast<std::ptrdiff_t>(g.k),
                      cand.end());
    auto& out = g.neighbors[i];
    out.reserve(g.k);
    for (std::size_t t = 0; t < g.k; ++t) out.push_back(cand[t].index);
  });
  return g;
}

}  // namespace topolidar
