#pragma once

#include "surfbench/types.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace surfbench {

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

/// Camera-to-world rotation whose columns are (right, down, forward): the
/// camera looks along its +z axis. World up is +z, switching to +x when the
/// view direction is within 1 degree of the z axis.
template <typename Derived>
Mat3T<typename Derived::Scalar> look_at(const Eigen::MatrixBase<Derived>& eye, const Eigen::MatrixBase<Derived>& target) {
  using Scalar = typename Derived::Scalar;
  const Vec3T<Scalar> forward = (target - eye).normalized();
  Vec3T<Scalar> up = Vec3T<Scalar>::UnitZ();
  if (std::abs(forward.dot(up)) > std::cos(deg2rad<Scalar>(1))) up = Vec3T<Scalar>::UnitX();
  const Vec3T<Scalar> right = forward.cross(up).normalized();
  const Vec3T<Scalar> down = forward.cross(right);
  Mat3T<Scalar> r;
  r << right, down, forward;
  return r;
}

/// Rx(alpha) * Ry(beta) * Rz(gamma), angles in radians.
template <typename Scalar>
Mat3T<Scalar> rotation_xyz(Scalar alpha, Scalar beta, Scalar gamma) {
  using Axis = Eigen::AngleAxis<Scalar>;
  return (Axis(alpha, Vec3T<Scalar>::UnitX()) * Axis(beta, Vec3T<Scalar>::UnitY()) * Axis(gamma, Vec3T<Scalar>::UnitZ()))
      .toRotationMatrix();
}

template <typename Scalar>
struct RayHit {
  Scalar t;
  Scalar u, v;
};

/// Moller-Trumbore with the determinant cut at 1e-9; both windings hit.
/// `origin + t * dir` with t in [t_min, t_max].
template <typename Scalar>
std::optional<RayHit<Scalar>> ray_triangle(const Vec3T<Scalar>& origin, const Vec3T<Scalar>& dir, const Vec3T<Scalar>& a,
                                           const Vec3T<Scalar>& e1, const Vec3T<Scalar>& e2, Scalar t_min, Scalar t_max) {
  const Vec3T<Scalar> pvec = dir.cross(e2);
  const Scalar det = e1.dot(pvec);
  if (std::abs(det) < Scalar(1e-9)) return std::nullopt;
  const Scalar inv = Scalar(1) / det;
  const Vec3T<Scalar> tvec = origin - a;
  const Scalar u = tvec.dot(pvec) * inv;
  if (u < 0 || u > 1) return std::nullopt;
  const Vec3T<Scalar> qvec = tvec.cross(e1);
  const Scalar v = dir.dot(qvec) * inv;
  if (v < 0 || u + v > 1) return std::nullopt;
  const Scalar t = e2.dot(qvec) * inv;
  if (t < t_min || t > t_max) return std::nullopt;
  return RayHit<Scalar>{t, u, v};
}

/// Separating-axis test between a triangle and a closed axis-aligned box.
/// Touching counts as overlap.
template <typename Scalar>
bool triangle_box_overlap(const Vec3T<Scalar>& box_center, const Vec3T<Scalar>& half, const Vec3T<Scalar>& a,
                          const Vec3T<Scalar>& b, const Vec3T<Scalar>& c) {
  const Vec3T<Scalar> v0 = a - box_center, v1 = b - box_center, v2 = c - box_center;
  const Vec3T<Scalar> edges[3] = {v1 - v0, v2 - v1, v0 - v2};
  auto separated = [&](const Vec3T<Scalar>& axis) {
    const Scalar p0 = v0.dot(axis), p1 = v1.dot(axis), p2 = v2.dot(axis);
    const Scalar r = half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) + half.z() * std::abs(axis.z());
    return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
  };
  for (int i = 0; i < 3; ++i)
    for (const auto& e : edges) {
      const Vec3T<Scalar> axis = Vec3T<Scalar>::Unit(i).cross(e);
      if (axis.squaredNorm() > 0 && separated(axis)) return false;
    }
  for (int i = 0; i < 3; ++i)
    if (separated(Vec3T<Scalar>::Unit(i))) return false;
  const Vec3T<Scalar> normal = edges[0].cross(edges[1]);
  return !(normal.squaredNorm() > 0 && separated(normal));
}

}  // namespace surfbench
