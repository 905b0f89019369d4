#include "topolidar/backbone.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "topolidar/persistence.hpp"
#include "topolidar/topo_loss.hpp"

namespace topolidar {

void OptimizerConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (!(anchor_weight >= 0.0) || !std::isfinite(anchor_weight)) {
    throw std::invalid_argument("anchor weight must be non-negative");
  }
  if (record_every < 1) {
    throw std::invalid_argument("record_every must be at least 1");
  }
}

namespace {

struct Evaluation {
  double topo = 0.0;
  double anchor = 0.0;
  FeatureMatrix grad;
  std::vector<FiltrationEdge> edges;

  double total() const { return topo + anchor; }
};

class Objective {
 public:
  Objective(const std::optional<FeatureMatrix>& target, double anchor_weight)
      : target_(target), anchor_weight_(anchor_weight) {}

  Evaluation operator()(const FeatureMatrix& x) const {
    TopoLossReport report = topo_loss_grad(x);
    Evaluation ev{report.loss, 0.0, std::move(report.per_point_grad),
                  std::move(report.contributing_edges)};
    if (target_ && anchor_weight_ > 0.0) {
      const double scale = anchor_weight_ / static_cast<double>(x.rows());
      double l1 = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index d = 0; d < x.cols(); ++d) {
          const double diff = x(i, d) - (*target_)(i, d);
          l1 += std::abs(diff);
          if (diff > 0.0) ev.grad(i, d) += scale;
          if (diff < 0.0) ev.grad(i, d) -= scale;
        }
      }
      ev.anchor = scale * l1;
    }
    return ev;
  }

 private:
  const std::optional<FeatureMatrix>& target_;
  double anchor_weight_;
};

void check_finite(const Evaluation& ev, std::size_t step) {
  if (!std::isfinite(ev.total()) || !ev.grad.allFinite()) {
    throw std::runtime_error("non-finite loss or gradient at step " +
                             std::to_string(step));
  }
}

FeatureMatrix merged_step(const FeatureMatrix& x, const Evaluation& ev,
                          double eta) {
  const auto n = static_cast<std::size_t>(x.rows());
  ComponentForest groups(std::vector<double>(n, 0.0));
  for (const auto& e : ev.edges) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    if (e.value <= eta * (ev.grad.row(u) - ev.grad.row(v)).norm()) {
      groups.merge(e.u, e.v);
    }
  }
  FeatureMatrix sum_x = FeatureMatrix::Zero(x.rows(), x.cols());
  FeatureMatrix sum_g = FeatureMatrix::Zero(x.rows(), x.cols());
  std::vector<std::size_t> count(n, 0);
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = groups.find(i);
    const auto r = static_cast<Eigen::Index>(root[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    sum_x.row(r) += x.row(ii);
    sum_g.row(r) += ev.grad.row(ii);
    ++count[root[i]];
  }
  FeatureMatrix trial(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto r = static_cast<Eigen::Index>(root[i]);
    if (count[root[i]] == 1) {
      trial.row(ii) = x.row(ii) - eta * ev.grad.row(ii);
    } else {
      const double m = static_cast<double>(count[root[i]]);
      trial.row(ii) = (sum_x.row(r) - eta * sum_g.row(r)) / m;
    }
  }
  return trial;
}

}  // namespace

OptimizationTrace optimize_backbone(const PointCloud& cloud,
                                    const std::optional<PointCloud>& target,
                                    const OptimizerConfig& cfg) {
  cfg.validate();
  if (cloud.size() < 2) {
    throw std::invalid_argument("optimization needs at least 2 points");
  }
  std::optional<FeatureMatrix> target_xyz;
  if (target) {
    if (target->size() != cloud.size()) {
      throw std::invalid_argument("target must match the cloud point count");
    }
    target_xyz = target->coordinates();
  }

  const Objective objective(target_xyz, cfg.anchor_weight);
  FeatureMatrix x = cloud.coordinates();
  Evaluation ev = objective(x);
  check_finite(ev, 0);

  OptimizationTrace trace;
  trace.history.reserve(cfg.steps + 1);
  trace.history.push_back({0, ev.topo, ev.anchor, ev.total()});
  trace.snapshots.push_back({0, PointCloud::from_matrix(x), ev.topo, ev.anchor});

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const double grad_sq = ev.grad.squaredNorm();
    if (grad_sq > 0.0) {
      double eta = cfg.step_size;
      if (cfg.backtracking) {
        for (std::size_t h = 0; h <= cfg.max_halvings; ++h, eta *= 0.5) {
          FeatureMatrix trial =
              cfg.merge_collapsed ? merged_step(x, ev, eta) : FeatureMatrix(x - eta * ev.grad);
          if (!trial.allFinite()) continue;
          Evaluation trial_ev = objective(trial);
          check_finite(trial_ev, step);
          const double moved_sq = (trial - x).squaredNorm();
          if (trial_ev.total() <= ev.total() - cfg.armijo_c * moved_sq / eta) {
            x = std::move(trial);
            ev = std::move(trial_ev);
            break;
          }
        }
      } else {
        x -= eta * ev.grad;
        if (!x.allFinite()) {
          throw std::runtime_error("non-finite loss or gradient at step " +
                                   std::to_string(step));
        }
        ev = objective(x);
        check_finite(ev, step);
      }
    }

    trace.history.push_back({step, ev.topo, ev.anchor, ev.total()});
    if (step % cfg.record_every == 0 || step == cfg.steps) {
      trace.snapshots.push_back(
          {step, PointCloud::from_matrix(x), ev.topo, ev.anchor});
    }
  }
  trace.final = PointCloud::from_matrix(x);
  return trace;
}

}  // namespace topolidar
