#pragma once

#include "surfbench/mesh.hpp"

namespace surfbench::primitives {

/// Icosahedron subdivided `level` times, vertices projected to the sphere.
TriMesh icosphere(int level, double radius = 1.0);

/// Closed torus on a `major_segments` x `minor_segments` grid (genus 1).
TriMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments);

/// Open cylinder side around the z axis, z in [-height/2, height/2].
TriMesh cylinder(double radius, double height, int segments, int rings);

/// Flat (nx x ny)-cell grid on z = 0 covering [0, sx] x [0, sy].
TriMesh grid(int nx, int ny, double sx, double sy);

/// Closed axis-aligned box centered at the origin, each face split into
/// `divisions` x `divisions` quads. Normals point outward unless `inward`.
TriMesh box(const Vector3d& size, int divisions = 1, bool inward = false);

/// Concatenates meshes into one vertex/face set.
TriMesh merge(const TriMesh& a, const TriMesh& b);

/// Reverses the winding of every face.
TriMesh flipped(const TriMesh& mesh);

}  // namespace surfbench::primitives
