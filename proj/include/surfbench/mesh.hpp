#pragma once

#include "surfbench/point_cloud.hpp"
#include "surfbench/types.hpp"

#include <cstdint>
#include <optional>

namespace surfbench {

/// Indexed triangle surface.
struct TriMesh {
  Points vertices;
  Faces faces;

  TriMesh() : vertices(0, 3), faces(0, 3) {}
  TriMesh(Points v, Faces f) : vertices(std::move(v)), faces(std::move(f)) {}

  Index vertex_count() const { return vertices.rows(); }
  Index face_count() const { return faces.rows(); }
  bool empty() const { return faces.rows() == 0; }
  Vector3d vertex(Index i) const { return row3(vertices, i); }
  Vector3d corner(Index f, int c) const { return row3(vertices, faces(f, c)); }
};

/// Index range and repeated-vertex checks. Throws ValidationError.
void validate(const TriMesh& mesh);

/// Drops faces whose area is at most `min_area`.
TriMesh remove_degenerate_faces(const TriMesh& mesh, double min_area = 1e-12);

double face_area(const TriMesh& mesh, Index f);
/// Unit normal from the corner winding; zero for degenerate faces.
Vector3d face_normal(const TriMesh& mesh, Index f);
double surface_area(const TriMesh& mesh);

struct AlignedBox {
  Vector3d min;
  Vector3d max;
  Vector3d center() const { return 0.5 * (min + max); }
  Vector3d extent() const { return max - min; }
};
AlignedBox bounding_box(const Points& points);

struct TopologyReport {
  bool watertight = false;
  bool edge_manifold = false;
  bool vertex_manifold = false;
  int component_count = 0;
  /// Largest per-component genus; empty unless watertight and manifold.
  std::optional<int> genus;
  /// V - E + F over referenced vertices.
  Index euler_characteristic = 0;
  Index boundary_edges = 0;
};

TopologyReport topology_report(const TriMesh& mesh);

enum class Mode { object, scene };

/// Object: bounding-box center to origin, then max vertex norm 1.
/// Scene: translation only.
TriMesh normalize(const TriMesh& mesh, Mode mode);

/// `n` area-uniform samples carrying their source face and its unit normal.
PointCloud sample_surface(const TriMesh& mesh, Index n, std::uint64_t seed);

}  // namespace surfbench
