#pragma once

#include "support.hpp"

namespace test {

// O(n^2) metric references accumulating in input order, ties to the lower index.
inline double brute_mean_nn(const Points& from, const Points& to) {
  double sum = 0.0;
  for (Index i = 0; i < from.rows(); ++i) sum += brute_nearest(to, row3(from, i)).distance;
  return sum / static_cast<double>(from.rows());
}

inline double brute_chamfer(const PointCloud& p, const PointCloud& q) {
  return 0.5 * brute_mean_nn(p.positions, q.positions) + 0.5 * brute_mean_nn(q.positions, p.positions);
}

inline double brute_fraction(const Points& from, const Points& to, double tau) {
  Index n = 0;
  for (Index i = 0; i < from.rows(); ++i) n += brute_nearest(to, row3(from, i)).distance < tau;
  return static_cast<double>(n) / static_cast<double>(from.rows());
}

inline double brute_fscore(double precision, double recall) {
  return precision + recall > 0.0 ? 200.0 * precision * recall / (precision + recall) : 0.0;
}

inline double brute_dot(const PointCloud& from, const PointCloud& to) {
  double sum = 0.0;
  const auto& a = from.faces->normal;
  const auto& b = to.faces->normal;
  for (Index i = 0; i < from.size(); ++i) {
    const Index j = brute_nearest(to.positions, from.point(i)).index;
    sum += std::abs(a(i, 0) * b(j, 0) + a(i, 1) * b(j, 1) + a(i, 2) * b(j, 2));
  }
  return sum / static_cast<double>(from.size());
}

inline double brute_ncs(const PointCloud& p, const PointCloud& q) { return 0.5 * brute_dot(p, q) + 0.5 * brute_dot(q, p); }

/// Random cloud with random unit face normals.
inline PointCloud cloud_with_normals(Index n, std::uint64_t seed, double scale = 1.0) {
  PointCloud c = random_cloud(n, seed, scale);
  FaceProvenance f;
  f.face.assign(static_cast<std::size_t>(n), 0);
  f.normal = random_unit_vectors(n, mix64(seed));
  c.faces = std::move(f);
  return c;
}

}  // namespace test
