#pragma once

#include "surfbench/bvh.hpp"
#include "surfbench/camera.hpp"
#include "surfbench/mesh.hpp"
#include "surfbench/point_cloud.hpp"

#include <cstdint>
#include <vector>

namespace surfbench {

/// Viewpoints on a shell around the origin (object mode). With bands, the
/// directions are restricted to polar angles within band +- halfwidth.
struct ViewpointSpec {
  Index count = 1000;
  double r_min = 2.5;
  double r_max = 3.5;
  std::vector<double> bands_deg;
  double band_halfwidth_deg = 3.0;
  bool use_bands = false;
  std::uint64_t seed = 0;

  void check() const;
};

/// Direction uniform over the sphere (or the union of the polar bands, by
/// area), radius uniform in [r_min, r_max], camera looking at the origin.
std::vector<CameraPose> sample_viewpoints_object(const ViewpointSpec& spec);

struct SceneGridSpec {
  double cube_size = 1.0;
  double overlap = 0.5;
  Index dirs_per_cube = 100;
  std::uint64_t seed = 0;
};

/// Centers of the grid cubes (side cube_size, stride cube_size - overlap,
/// starting at the mesh bounding-box minimum) that no triangle touches.
std::vector<Vector3d> empty_cube_centers(const TriMesh& mesh, double cube_size, double overlap);

/// `dirs_per_cube` random view directions from every empty cube center.
/// Throws ValidationError when no cube is empty.
std::vector<CameraPose> sample_viewpoints_scene(const TriMesh& mesh, const SceneGridSpec& spec);

/// One ray per pixel; nearest hits with depth in [near, far] become
/// camera-frame points tagged with `view` and their face (normal in camera frame).
PointCloud render_view(const Bvh& bvh, const TriMesh& mesh, const CameraPose& pose, const CameraIntrinsics& intr,
                       std::uint32_t view = 0);
PointCloud render_view(const TriMesh& mesh, const CameraPose& pose, const CameraIntrinsics& intr, std::uint32_t view = 0);

/// Renders every pose (in parallel when threads > 1); views[i] belongs to poses[i].
std::vector<PointCloud> render_views(const TriMesh& mesh, const std::vector<CameraPose>& poses,
                                     const CameraIntrinsics& intr);

/// World-frame union: each view transformed by its pose, concatenated in pose order.
PointCloud fuse_views(const std::vector<PointCloud>& views, const std::vector<CameraPose>& poses);

std::vector<Vector3d> camera_positions(const std::vector<CameraPose>& poses);

/// Per-sample visibility: front-facing toward some camera, inside its image
/// and depth range, with an unobstructed segment. Samples need face provenance.
std::vector<bool> visible_mask(const Bvh& bvh, const PointCloud& samples, const std::vector<CameraPose>& poses,
                               const CameraIntrinsics& intr);

/// Fraction of `samples` area-uniform surface samples visible from at least one pose.
double visibility_coverage(const TriMesh& mesh, const std::vector<CameraPose>& poses, const CameraIntrinsics& intr,
                           Index samples, std::uint64_t seed);

}  // namespace surfbench
