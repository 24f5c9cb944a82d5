#pragma once

#include "surfbench/kdtree.hpp"
#include "surfbench/point_cloud.hpp"
#include "surfbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace test {

using namespace surfbench;

inline PointCloud random_cloud(Index n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Points p(n, 3);
  for (Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) p(i, c) = rng.uniform(-scale, scale);
  return PointCloud(p);
}

inline Points random_unit_vectors(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Points p(n, 3);
  for (Index i = 0; i < n; ++i) {
    Vector3d v(rng.normal(), rng.normal(), rng.normal());
    p.row(i) = v.normalized().transpose();
  }
  return p;
}

/// Exhaustive k nearest, ordered by (distance, index).
inline std::vector<Neighbor> brute_knn(const Points& pts, const Vector3d& q, Index k) {
  std::vector<Neighbor> all;
  for (Index i = 0; i < pts.rows(); ++i) {
    const double d[3] = {pts(i, 0), pts(i, 1), pts(i, 2)};
    all.push_back({i, std::sqrt(dist2(d, q.data()))});
  }
  std::sort(all.begin(), all.end());
  all.resize(k);
  return all;
}

inline Neighbor brute_nearest(const Points& pts, const Vector3d& q) { return brute_knn(pts, q, 1).front(); }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("surfbench_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test
