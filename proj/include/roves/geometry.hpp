#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace roves {

/// Plane n . p + d = 0 with unit normal n. Points on the side the normal
/// points to have positive height.
struct GroundPlane {
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  double offset = 0.0;

  /// Throws InputError unless the normal is unit length within 1e-9.
  void validate() const;

  double height_of(const Eigen::Vector3d& p) const { return normal.dot(p) + offset; }

  /// In-plane orthonormal axes (u, v) with u x v = normal. u is world x
  /// projected into the plane (world y when x is parallel to the normal), so
  /// for the z-up plane plane coordinates coincide with world (x, y).
  Eigen::Vector3d axis_u() const;
  Eigen::Vector3d axis_v() const;

  Eigen::Vector2d to_plane(const Eigen::Vector3d& p) const;
  /// Plane-projected direction of a world vector, not normalized.
  Eigen::Vector2d direction_to_plane(const Eigen::Vector3d& d) const;
};

/// p_world = rotation * p_local + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  /// Throws InputError unless rotation is orthonormal with det +1 (1e-9).
  void validate() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

/// Colored point set; colors are RGB in [0,1].
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> colors;

  std::size_t size() const { return points.size(); }
};

}  // namespace roves
