#pragma once

#include "surfbench/mesh.hpp"
#include "surfbench/point_cloud.hpp"

#include <filesystem>

namespace surfbench::io {

enum class PlyFormat { ascii, binary_little_endian };

/// OBJ (v/f records, 1-based or negative indices) or PLY, chosen by extension.
/// Polygons are triangulated as fans from their first vertex.
TriMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriMesh& mesh,
                PlyFormat format = PlyFormat::binary_little_endian);

TriMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);
TriMesh read_ply_mesh(const std::filesystem::path& path);
void write_ply_mesh(const std::filesystem::path& path, const TriMesh& mesh, PlyFormat format);

/// Vertex properties: x y z, optional nx ny nz, view_index (uint32), and
/// face_index (int32) with fnx fny fnz for face provenance. Doubles in binary
/// mode round-trip bit-exactly.
PointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                 PlyFormat format = PlyFormat::binary_little_endian);

}  // namespace surfbench::io
