#include "roves/geometry.hpp"

#include <cmath>

#include <fmt/format.h>

#include "roves/error.hpp"

namespace roves {

void GroundPlane::validate() const {
  if (!normal.allFinite() || !std::isfinite(offset)) {
    throw InputError("ground plane has non-finite coefficients");
  }
  if (std::abs(normal.norm() - 1.0) > 1e-9) {
    throw InputError(fmt::format("ground plane normal is not unit length (|n| = {})", normal.norm()));
  }
}

Eigen::Vector3d GroundPlane::axis_u() const {
  Eigen::Vector3d ref = Eigen::Vector3d::UnitX();
  if (std::abs(normal.dot(ref)) > 0.9) ref = Eigen::Vector3d::UnitY();
  return (ref - normal.dot(ref) * normal).normalized();
}

Eigen::Vector3d GroundPlane::axis_v() const { return normal.cross(axis_u()); }

Eigen::Vector2d GroundPlane::to_plane(const Eigen::Vector3d& p) const {
  return {axis_u().dot(p), axis_v().dot(p)};
}

Eigen::Vector2d GroundPlane::direction_to_plane(const Eigen::Vector3d& d) const {
  return {axis_u().dot(d), axis_v().dot(d)};
}

void RigidTransform::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InputError("rigid transform has non-finite entries");
  }
  const double ortho_err =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (ortho_err > 1e-9 || std::abs(det - 1.0) > 1e-9) {
    throw InputError(fmt::format(
        "transform is not rigid: |R^T R - I|_max = {:.3g}, det(R) = {:.12g}", ortho_err, det));
  }
}

}  // namespace roves
