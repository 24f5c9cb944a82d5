#pragma once

#include "surfbench/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace surfbench {

/// Source triangle of each point and that triangle's unit normal.
struct FaceProvenance {
  std::vector<int> face;
  Points normal;
};

/// Positions plus optional per-point attributes. Every present attribute has
/// exactly one entry per position.
struct PointCloud {
  Points positions;
  std::optional<Points> normals;
  std::optional<std::vector<std::uint32_t>> view_index;
  std::optional<FaceProvenance> faces;

  PointCloud() : positions(0, 3) {}
  explicit PointCloud(Points p) : positions(std::move(p)) {}

  Index size() const { return positions.rows(); }
  bool empty() const { return positions.rows() == 0; }
  Vector3d point(Index i) const { return row3(positions, i); }

  /// Throws ValidationError if an attribute has the wrong length.
  void check() const;
};

/// Rows `indices` of every attribute, in the given order.
PointCloud subset(const PointCloud& cloud, std::span<const Index> indices);

/// Concatenation; an attribute survives only if every part carries it.
PointCloud concatenate(std::span<const PointCloud> parts);

}  // namespace surfbench
