#include "topolidar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "topolidar/assignment.hpp"
#include "topolidar/kdtree.hpp"
#include "topolidar/parallel.hpp"

namespace topolidar {

void HistogramConfig::validate() const {
  if (bins_x < 1 || bins_y < 1) throw std::invalid_argument("bins must be >= 1");
  if (!(xmin < xmax) || !(ymin < ymax)) {
    throw std::invalid_argument("histogram extent must be well-ordered");
  }
  if (!(smoothing >= 0.0)) throw std::invalid_argument("smoothing must be >= 0");
}

namespace {

void require_non_empty(const PointCloud& s, const PointCloud& t) {
  if (s.empty() || t.empty()) throw std::invalid_argument("empty input");
}

double sq_dist(const Point3& a, const Point3& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

// Sum over `from` of the squared distance to the nearest point of `to`.
double directed_chamfer(const PointCloud& from, const PointCloud& to) {
  const KdTree tree(to.coordinates());
  std::vector<double> nearest(from.size());
  parallel_for(from.size(), [&](std::size_t i) {
    const Point3& p = from[i];
    const double q[3] = {p.x(), p.y(), p.z()};
    nearest[i] = tree.nearest(q).sq_distance;
  });
  double sum = 0.0;
  for (double d : nearest) sum += d;
  return sum;
}

}  // namespace

double chamfer(const PointCloud& s, const PointCloud& t) {
  require_non_empty(s, t);
  const double forward = directed_chamfer(s, t);
  const double backward = directed_chamfer(t, s);
  return forward + backward;
}

double emd_exact(const PointCloud& s, const PointCloud& t) {
  if (s.size() != t.size()) {
    throw std::invalid_argument("EMD requires equal sizes");
  }
  require_non_empty(s, t);
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cost(i, j) = std::sqrt(sq_dist(s[static_cast<std::size_t>(i)],
                                     t[static_cast<std::size_t>(j)]));
    }
  }
  const auto match = solve_assignment(cost);
  std::vector<double> matched;
  matched.reserve(match.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    matched.push_back(cost(i, static_cast<Eigen::Index>(match[static_cast<std::size_t>(i)])));
  }
  // summing in sorted order makes emd(s, t) and emd(t, s) bit-identical
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double c : matched) total += c;
  return total;
}

std::vector<double> bev_histogram(const PointCloud& cloud,
                                  const HistogramConfig& cfg) {
  cfg.validate();
  std::vector<double> hist(cfg.bins_x * cfg.bins_y, 0.0);
  std::size_t inside = 0;
  auto bin_of = [](double v, double lo, double hi, std::size_t bins) {
    const double f = std::floor((v - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(static_cast<std::size_t>(std::max(f, 0.0)), bins - 1);
  };
  for (const auto& p : cloud.points()) {
    if (p.x() < cfg.xmin || p.x() > cfg.xmax || p.y() < cfg.ymin ||
        p.y() > cfg.ymax) {
      continue;
    }
    const std::size_t bx = bin_of(p.x(), cfg.xmin, cfg.xmax, cfg.bins_x);
    const std::size_t by = bin_of(p.y(), cfg.ymin, cfg.ymax, cfg.bins_y);
    hist[by * cfg.bins_x + bx] += 1.0;
    ++inside;
  }
  if (inside == 0) throw std::invalid_argument("empty histogram");
  const double total =
      static_cast<double>(inside) + cfg.smoothing * static_cast<double>(hist.size());
  for (double& h : hist) h = (h + cfg.smoothing) / total;
  return hist;
}

double jsd(const PointCloud& s, const PointCloud& t, const HistogramConfig& cfg) {
  require_non_empty(s, t);
  const auto p = bev_histogram(s, cfg);
  const auto q = bev_histogram(t, cfg);
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    const double m = 0.5 * (p[b] + q[b]);
    if (p[b] > 0.0) kl_p += p[b] * std::log(p[b] / m);
    if (q[b] > 0.0) kl_q += q[b] * std::log(q[b] / m);
  }
  return std::clamp(0.5 * (kl_p + kl_q), 0.0, std::numbers::ln2);
}

double median_bandwidth(const PointCloud& s, const PointCloud& t) {
  std::vector<Point3> pooled = s.points();
  pooled.insert(pooled.end(), t.points().begin(), t.points().end());
  if (pooled.size() < 2) return 1.0;
  std::vector<double> dists;
  dists.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      dists.push_back(std::sqrt(sq_dist(pooled[i], pooled[j])));
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid),
                   dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(
        dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  return median > 0.0 ? median : 1.0;
}

double mmd(const PointCloud& s, const PointCloud& t, const KernelConfig& cfg) {
  require_non_empty(s, t);
  const double sigma = cfg.bandwidth ? *cfg.bandwidth : median_bandwidth(s, t);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("kernel bandwidth must be positive");
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto mean_kernel = [inv](const PointCloud& a, const PointCloud& b) {
    double sum = 0.0;
    for (const auto& x : a.points()) {
      for (const auto& y : b.points()) sum += std::exp(-sq_dist(x, y) * inv);
    }
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  };
  const double kss = mean_kernel(s, s);
  const double ktt = mean_kernel(t, t);
  const double kst = mean_kernel(s, t);
  return std::sqrt(std::max(0.0, kss + ktt - 2.0 * kst));
}

double rmse(const RangeImage& a, const RangeImage& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("image shape mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    const RangeCell& p = a.cells()[i];
    const RangeCell& q = b.cells()[i];
    if (!p.valid || !q.valid) continue;
    const double d = p.range - q.range;
    sum += d * d;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("no co-valid cells");
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace topolidar
