#include "topolidar/slam_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace topolidar {

void RigidTransform::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw std::invalid_argument("non-finite pose");
  }
  const double ortho =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-6 || std::abs(rotation.determinant() - 1.0) > 1e-6) {
    throw std::invalid_argument("pose rotation is not a proper rotation");
  }
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

PoseTrajectory::PoseTrajectory(std::vector<RigidTransform> poses)
    : poses_(std::move(poses)) {
  if (poses_.empty()) throw std::invalid_argument("trajectory needs at least one pose");
  for (const auto& p : poses_) p.validate();
}

PoseTrajectory PoseTrajectory::transformed(const RigidTransform& g) const {
  std::vector<RigidTransform> out;
  out.reserve(poses_.size());
  for (const auto& p : poses_) out.push_back(g * p);
  return PoseTrajectory(std::move(out));
}

namespace {

void require_same_length(const PoseTrajectory& a, const PoseTrajectory& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("trajectory length mismatch");
  }
}

}  // namespace

RigidTransform align_umeyama(const PoseTrajectory& estimate,
                             const PoseTrajectory& reference) {
  require_same_length(estimate, reference);
  const std::size_t n = estimate.size();
  if (n < 3) throw std::invalid_argument("alignment needs at least 3 poses");

  Eigen::Vector3d mean_p = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_q = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mean_p += estimate[i].translation;
    mean_q += reference[i].translation;
  }
  mean_p /= static_cast<double>(n);
  mean_q /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cov += (reference[i].translation - mean_q) *
           (estimate[i].translation - mean_p).transpose();
  }
  cov /= static_cast<double>(n);

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-9 * sv(0)) {
    throw std::invalid_argument("degenerate alignment: collinear trajectory");
  }
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    fix(2, 2) = -1.0;
  }

  RigidTransform s;
  s.rotation = svd.matrixU() * fix * svd.matrixV().transpose();
  s.translation = mean_q - s.rotation * mean_p;
  return s;
}

double ate(const PoseTrajectory& estimate, const PoseTrajectory& reference) {
  const RigidTransform s = align_umeyama(estimate, reference);
  double sum = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const RigidTransform err = reference[i].inverse() * (s * estimate[i]);
    sum += err.translation.squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(estimate.size()));
}

double rotation_angle(const Eigen::Matrix3d& r) {
  // atan2 form of arccos((tr - 1) / 2); stays accurate near 0 and pi
  const Eigen::Vector3d axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0),
                             r(1, 0) - r(0, 1));
  const double cos_angle = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::atan2(0.5 * axis.norm(), cos_angle);
}

RelativePoseError rpe(const PoseTrajectory& estimate,
                      const PoseTrajectory& reference, std::size_t delta) {
  require_same_length(estimate, reference);
  if (delta < 1) throw std::invalid_argument("delta must be at least 1");
  if (delta >= estimate.size()) {
    throw std::invalid_argument("delta must be smaller than the trajectory length");
  }
  const std::size_t m = estimate.size() - delta;
  double trans_sq = 0.0;
  double rot_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const RigidTransform rel_p = estimate[i].inverse() * estimate[i + delta];
    const RigidTransform rel_q = reference[i].inverse() * reference[i + delta];
    const RigidTransform err = rel_p.inverse() * rel_q;
    trans_sq += err.translation.squaredNorm();
    const double angle = rotation_angle(err.rotation);
    rot_sq += angle * angle;
  }
  return {std::sqrt(trans_sq / static_cast<double>(m)),
          std::sqrt(rot_sq / static_cast<double>(m))};
}

}  // namespace topolidar
