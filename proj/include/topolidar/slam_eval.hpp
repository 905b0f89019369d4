#ifndef TOPOLIDAR_SLAM_EVAL_HPP
#define TOPOLIDAR_SLAM_EVAL_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace topolidar {

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  /// Throws unless the rotation is orthonormal with det +1 (within 1e-6).
  void validate() const;

  RigidTransform inverse() const;
  RigidTransform operator*(const RigidTransform& rhs) const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

/// Time-ordered poses; every pose is validated on construction.
class PoseTrajectory {
 public:
  PoseTrajectory() = default;
  explicit PoseTrajectory(std::vector<RigidTransform> poses);

  const std::vector<RigidTransform>& poses() const { return poses_; }
  std::size_t size() const { return poses_.size(); }
  const RigidTransform& operator[](std::size_t i) const { return poses_[i]; }

  /// Left-multiplies every pose by `g`.
  PoseTrajectory transformed(const RigidTransform& g) const;

 private:
  std::vector<RigidTransform> poses_;
};

/// Least-squares rigid transform (no scale) mapping the translations of
/// `estimate` onto those of `reference`.
RigidTransform align_umeyama(const PoseTrajectory& estimate,
                             const PoseTrajectory& reference);

/// Absolute trajectory error (RMSE of translational residuals after
/// alignment).
double ate(const PoseTrajectory& estimate, const PoseTrajectory& reference);

struct RelativePoseError {
  double trans = 0.0;
  /// Radians.
  double rot = 0.0;
};

/// Rotation angle of a rotation matrix, in [0, pi].
double rotation_angle(const Eigen::Matrix3d& r);

/// Relative pose error over all windows of length delta.
RelativePoseError rpe(const PoseTrajectory& estimate,
                      const PoseTrajectory& reference, std::size_t delta);

}  // namespace topolidar

#endif  // TOPOLIDAR_SLAM_EVAL_HPP
