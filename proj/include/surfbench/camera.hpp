#pragma once

#include "surfbench/types.hpp"

namespace surfbench {

/// Extrinsics K = [R | t]: camera-to-world rotation and camera position.
/// A camera-frame point p lands at R * p + t in the world.
struct CameraPose {
  Matrix3d rotation = Matrix3d::Identity();
  Vector3d translation = Vector3d::Zero();

  Vector3d position() const { return translation; }
  Vector3d optical_axis() const { return rotation.col(2); }
  Vector3d to_world(const Vector3d& p) const { return rotation * p + translation; }
  Vector3d to_camera(const Vector3d& p) const { return rotation.transpose() * (p - translation); }

  /// Orthonormality within 1e-9 and det > 0; throws ValidationError.
  void check() const;
};

/// Pinhole depth camera. Pixel (u, v) looks through its center; depth is the
/// camera-frame z coordinate.
struct CameraIntrinsics {
  int width = 256;
  int height = 256;
  double vfov_deg = 60.0;
  double near = 0.1;
  double far = 100.0;

  double focal() const;
  /// Camera-frame ray with unit z component.
  Vector3d ray(double u, double v) const;
  /// Throws ValidationError on out-of-range fields.
  void check() const;
};

}  // namespace surfbench
