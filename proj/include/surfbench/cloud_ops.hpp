#pragma once

#include "surfbench/kdtree.hpp"
#include "surfbench/point_cloud.hpp"

#include <cstdint>
#include <vector>

namespace surfbench {

enum class FpsSeed {
  farthest_from_centroid,  ///< default
  first_index,             ///< for comparison with tools that start at point 0
};

/// Greedy farthest-point order of `n` points (selection order). Exact: equals
/// the quadratic reference, ties resolved toward the lower index.
std::vector<Index> fps_indices(const Points& points, Index n, FpsSeed seed = FpsSeed::farthest_from_centroid);
PointCloud fps(const PointCloud& cloud, Index n, FpsSeed seed = FpsSeed::farthest_from_centroid);

/// `n` distinct indices drawn uniformly without replacement (selection order).
std::vector<Index> random_indices(Index size, Index n, std::uint64_t seed);
PointCloud random_sample(const PointCloud& cloud, Index n, std::uint64_t seed);

/// PCA normals from the k nearest neighbours (the point itself included).
/// Points whose neighbourhood covariance has rank < 2 are listed in
/// `unreliable` when given; their normal is still the smallest eigenvector.
PointCloud estimate_normals(const PointCloud& cloud, Index k = 40, std::vector<Index>* unreliable = nullptr);

/// Flips each normal to face the camera that captured the point. Points that
/// coincide with their camera are left untouched and listed in `failed`; with
/// `failed == nullptr` they raise ValidationError instead.
PointCloud orient_normals(const PointCloud& cloud, const std::vector<Vector3d>& camera_positions,
                          std::vector<Index>* failed = nullptr);

}  // namespace surfbench
