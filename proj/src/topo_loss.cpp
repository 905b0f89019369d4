#include "topolidar/topo_loss.hpp"

#include <cmath>
#include <stdexcept>

namespace topolidar {

double topo_loss(const PersistenceDiagram& diagram) {
  double loss = 0.0;
  for (const auto& p : diagram.finite_pairs) loss += p.death - p.birth;
  return loss;
}

TopoLossReport topo_loss_grad(const FeatureMatrix& points) {
  if (points.rows() < 2) {
    throw std::invalid_argument("topological gradient needs at least 2 points");
  }
  const PersistenceDiagram pd = flag_ph0(points);

  TopoLossReport report;
  report.loss = topo_loss(pd);
  report.per_point_grad = FeatureMatrix::Zero(points.rows(), points.cols());
  report.contributing_edges.reserve(pd.finite_pairs.size());
  for (const auto& pair : pd.finite_pairs) {
    const FiltrationEdge& e = pair.generator;
    report.contributing_edges.push_back(e);
    if (!(e.value > 0.0)) {
      report.degenerate = true;
      continue;
    }
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      const double g = (points(u, d) - points(v, d)) / e.value;
      report.per_point_grad(u, d) += g;
      report.per_point_grad(v, d) -= g;
    }
  }
  return report;
}

TopoLossReport topo_loss_grad(const PointCloud& cloud) {
  return topo_loss_grad(cloud.coordinates());
}

double absolute_error(const RangeImage& a, const RangeImage& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("image shape mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    const RangeCell& p = a.cells()[i];
    const RangeCell& q = b.cells()[i];
    if (!p.valid || !q.valid) continue;
    sum += std::abs(p.x - q.x) + std::abs(p.y - q.y) + std::abs(p.z - q.z);
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double total_loss(const RangeImage& augmented, const RangeImage& target,
                  const std::vector<FeatureMatrix>& embeddings) {
  if (!augmented.same_shape(target)) {
    throw std::invalid_argument("image shape mismatch");
  }
  const PointCloud points = to_point_cloud(augmented);
  if (points.empty()) throw std::invalid_argument("empty input");

  double loss = topo_loss(flag_ph0(points));
  for (const auto& emb : embeddings) {
    if (emb.rows() == 0) throw std::invalid_argument("empty embedding");
    loss += topo_loss(flag_ph0(emb));
  }
  return loss + absolute_error(augmented, target);
}

}  // namespace topolidar
