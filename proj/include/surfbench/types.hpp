#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace surfbench {

using Index = std::int64_t;

template <typename Scalar>
using PointsT = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;
template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Points = PointsT<double>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Eigen::Matrix3d;
using Eigen::Vector3d;

/// Invalid input or violated precondition (CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File-system or format failure (CLI exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Vector3d row3(const Points& p, Index i) { return p.row(i).transpose(); }

// Squared Euclidean distance, spelled out so every caller rounds identically.
inline double dist2(const double* a, const double* b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace surfbench
