#ifndef TOPOLIDAR_METRICS_HPP
#define TOPOLIDAR_METRICS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "topolidar/geometry.hpp"

namespace topolidar {

/// Bird's-eye (x, y) histogram used by jsd().
struct HistogramConfig {
  std::size_t bins_x = 100;
  std::size_t bins_y = 100;
  double xmin = -50.0;
  double xmax = 50.0;
  double ymin = -50.0;
  double ymax = 50.0;
  /// Added to every bin before normalizing.
  double smoothing = 1e-12;

  void validate() const;
};

/// Gaussian kernel bandwidth; nullopt selects the median pairwise distance of
/// the pooled point sets.
struct KernelConfig {
  std::optional<double> bandwidth;
};

/// Sum of squared nearest-neighbor distances, both directions.
double chamfer(const PointCloud& s, const PointCloud& t);

/// Minimum over bijections of the summed Euclidean distances. Solved exactly,
/// so intended for desk-scale inputs.
double emd_exact(const PointCloud& s, const PointCloud& t);

/// Normalized, smoothed bird's-eye histogram; bins ordered row-major (y, x).
/// Points outside the extent are dropped. Throws "empty histogram" when no
/// point falls inside.
std::vector<double> bev_histogram(const PointCloud& cloud,
                                  const HistogramConfig& cfg);

/// Jensen-Shannon divergence (natural log) of the bird's-eye histograms.
double jsd(const PointCloud& s, const PointCloud& t,
           const HistogramConfig& cfg = {});

/// Median of pairwise distances over the union of both sets; 1 if that
/// median is zero.
double median_bandwidth(const PointCloud& s, const PointCloud& t);

/// RKHS distance between Gaussian kernel mean embeddings.
double mmd(const PointCloud& s, const PointCloud& t,
           const KernelConfig& cfg = {});

/// Root mean squared range difference over cells valid in both images.
double rmse(const RangeImage& a, const RangeImage& b);

}  // namespace topolidar

#endif  // TOPOLIDAR_METRICS_HPP
