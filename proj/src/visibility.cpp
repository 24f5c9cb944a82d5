#include "surfbench/parallel.hpp"
#include "surfbench/scanner.hpp"

#include <cmath>

namespace surfbench {

std::vector<bool> visible_mask(const Bvh& bvh, const PointCloud& samples, const std::vector<CameraPose>& poses,
                               const CameraIntrinsics& intr) {
  intr.check();
  if (!samples.faces) throw ValidationError("visibility needs samples with face provenance");
  const Index n = samples.size();
  const double f = intr.focal();
  std::vector<std::uint8_t> seen(n, 0);
  parallel_for(n, [&](Index i) {
    const Vector3d p = samples.point(i);
    const Vector3d normal = row3(samples.faces->normal, i);
    for (const auto& pose : poses) {
      const Vector3d to_camera = pose.translation - p;
      if (!(normal.dot(to_camera) > 0.0)) continue;
      const Vector3d q = pose.to_camera(p);
      if (q.z() < intr.near || q.z() > intr.far) continue;
      const double u = f * q.x() / q.z() + 0.5 * intr.width;
      const double v = f * q.y() / q.z() + 0.5 * intr.height;
      if (u < 0.0 || u > intr.width || v < 0.0 || v > intr.height) continue;
      // Shadow ray from the sample toward the camera, skipping both endpoints.
      const double length = to_camera.norm();
      const Vector3d dir = to_camera / length;
      const double eps = 1e-7 * (1.0 + length);
      if (bvh.occluded(p, dir, eps, length - eps)) continue;
      seen[i] = 1;
      break;
    }
  });
  return {seen.begin(), seen.end()};
}

double visibility_coverage(const TriMesh& mesh, const std::vector<CameraPose>& poses, const CameraIntrinsics& intr,
                           Index samples, std::uint64_t seed) {
  if (poses.empty()) throw ValidationError("visibility_coverage needs at least one pose");
  if (samples < 1) throw ValidationError("visibility_coverage needs at least one sample");
  const PointCloud cloud = sample_surface(mesh, samples, seed);
  const Bvh bvh(mesh);
  const auto mask = visible_mask(bvh, cloud, poses, intr);
  Index count = 0;
  for (bool b : mask) count += b;
  return static_cast<double>(count) / static_cast<double>(samples);
}

}  // namespace surfbench
