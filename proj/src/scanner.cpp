#include "surfbench/scanner.hpp"

#include "surfbench/geometry.hpp"
#include "surfbench/parallel.hpp"
#include "surfbench/rng.hpp"

#include <cmath>
#include <numbers>

namespace surfbench {

void CameraPose::check() const {
  if ((rotation.transpose() * rotation - Matrix3d::Identity()).cwiseAbs().maxCoeff() >= 1e-9)
    throw ValidationError("camera rotation is not orthonormal");
  if (!(rotation.determinant() > 0.0)) throw ValidationError("camera rotation is a reflection");
}

double CameraIntrinsics::focal() const { return 0.5 * height / std::tan(0.5 * deg2rad(vfov_deg)); }

Vector3d CameraIntrinsics::ray(double u, double v) const {
  const double f = focal();
  return {(u - 0.5 * width) / f, (v - 0.5 * height) / f, 1.0};
}

void CameraIntrinsics::check() const {
  if (width < 1 || height < 1) throw ValidationError("camera resolution must be positive");
  if (!(vfov_deg > 0.0 && vfov_deg < 180.0)) throw ValidationError("vertical field of view must lie in (0, 180)");
  if (!(near > 0.0 && near < far)) throw ValidationError("depth range must satisfy 0 < near < far");
}

void ViewpointSpec::check() const {
  if (count < 0) throw ValidationError("negative viewpoint count");
  if (!(r_min > 0.0 && r_min <= r_max)) throw ValidationError("viewpoint radii must satisfy 0 < r_min <= r_max");
  if (use_bands) {
    if (bands_deg.empty()) throw ValidationError("band sampling requested with no bands");
    for (double phi : bands_deg)
      if (phi - band_halfwidth_deg < 0.0 || phi + band_halfwidth_deg > 180.0)
        throw ValidationError("polar band leaves [0, 180] degrees");
  }
}

std::vector<CameraPose> sample_viewpoints_object(const ViewpointSpec& spec) {
  spec.check();
  // Each band is the z-interval [cos(phi + d), cos(phi - d)]; picking a band
  // with probability proportional to its length keeps directions area-uniform.
  std::vector<std::pair<double, double>> zranges;
  if (spec.use_bands) {
    for (double phi : spec.bands_deg)
      zranges.emplace_back(std::cos(deg2rad(phi + spec.band_halfwidth_deg)), std::cos(deg2rad(phi - spec.band_halfwidth_deg)));
  } else {
    zranges.emplace_back(-1.0, 1.0);
  }
  std::vector<double> cdf;
  double total = 0.0;
  for (const auto& [lo, hi] : zranges) cdf.push_back(total += hi - lo);

  Rng rng(spec.seed);
  std::vector<CameraPose> poses;
  poses.reserve(spec.count);
  for (Index i = 0; i < spec.count; ++i) {
    const double pick = rng.uniform() * total;
    std::size_t b = 0;
    while (b + 1 < cdf.size() && pick >= cdf[b]) ++b;
    const double z = rng.uniform(zranges[b].first, zranges[b].second);
    const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vector3d dir(s * std::cos(azimuth), s * std::sin(azimuth), z);
    const double radius = rng.uniform(spec.r_min, spec.r_max);
    CameraPose pose;
    pose.translation = radius * dir;
    pose.rotation = look_at(pose.translation, Vector3d::Zero().eval());
    poses.push_back(pose);
  }
  return poses;
}

std::vector<Vector3d> empty_cube_centers(const TriMesh& mesh, double cube_size, double overlap) {
  if (!(cube_size > overlap && overlap >= 0.0)) throw ValidationError("scene grid needs cube_size > overlap >= 0");
  const AlignedBox box = bounding_box(mesh.vertices);
  const double step = cube_size - overlap;
  int counts[3];
  for (int c = 0; c < 3; ++c) {
    const double extent = box.max[c] - box.min[c];
    counts[c] = extent > cube_size ? static_cast<int>(std::ceil((extent - cube_size) / step - 1e-9)) + 1 : 1;
  }
  auto cube_id = [&](int i, int j, int k) { return (static_cast<Index>(k) * counts[1] + j) * counts[0] + i; };
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(counts[0]) * counts[1] * counts[2], 0);
  const Vector3d half = Vector3d::Constant(0.5 * cube_size);

  for (Index f = 0; f < mesh.face_count(); ++f) {
    const Vector3d a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
    const Vector3d lo = a.cwiseMin(b).cwiseMin(c), hi = a.cwiseMax(b).cwiseMax(c);
    int first[3], last[3];
    for (int d = 0; d < 3; ++d) {
      first[d] = std::max(0, static_cast<int>(std::ceil((lo[d] - box.min[d] - cube_size) / step)) - 1);
      last[d] = std::min(counts[d] - 1, static_cast<int>(std::floor((hi[d] - box.min[d]) / step)) + 1);
    }
    for (int k = first[2]; k <= last[2]; ++k)
      for (int j = first[1]; j <= last[1]; ++j)
        for (int i = first[0]; i <= last[0]; ++i) {
          auto& occ = occupied[cube_id(i, j, k)];
          if (occ) continue;
          const Vector3d center = box.min + Vector3d(i * step, j * step, k * step) + half;
          if (triangle_box_overlap<double>(center, half, a, b, c)) occ = 1;
        }
  }
  std::vector<Vector3d> centers;
  for (int k = 0; k < counts[2]; ++k)
    for (int j = 0; j < counts[1]; ++j)
      for (int i = 0; i < counts[0]; ++i)
        if (!occupied[cube_id(i, j, k)]) centers.push_back(box.min + Vector3d(i * step, j * step, k * step) + half);
  return centers;
}

std::vector<CameraPose> sample_viewpoints_scene(const TriMesh& mesh, const SceneGridSpec& spec) {
  const auto centers = empty_cube_centers(mesh, spec.cube_size, spec.overlap);
  if (centers.empty()) throw ValidationError("scene has no empty cube to place the camera in");
  Rng rng(spec.seed);
  std::vector<CameraPose> poses;
  poses.reserve(centers.size() * static_cast<std::size_t>(spec.dirs_per_cube));
  for (const auto& center : centers) {
    for (Index d = 0; d < spec.dirs_per_cube; ++d) {
      const double z = rng.uniform(-1.0, 1.0);
      const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Vector3d dir(s * std::cos(azimuth), s * std::sin(azimuth), z);
      CameraPose pose;
      pose.translation = center;
      pose.rotation = look_at(center, (center + dir).eval());
      poses.push_back(pose);
    }
  }
  return poses;
}

PointCloud render_view(const Bvh& bvh, const TriMesh& mesh, const CameraPose& pose, const CameraIntrinsics& intr,
                       std::uint32_t view) {
  intr.check();
  std::vector<double> xyz;
  std::vector<int> faces;
  std::vector<double> fn;
  if (!mesh.empty()) {
    for (int v = 0; v < intr.height; ++v)
      for (int u = 0; u < intr.width; ++u) {
        const Vector3d ray = intr.ray(u + 0.5, v + 0.5);
        const auto hit = bvh.intersect(pose.translation, pose.rotation * ray);
        // t is the camera-frame depth because the ray has unit z.
        if (!hit || hit->t < intr.near || hit->t > intr.far) continue;
        const Vector3d p = hit->t * ray;
        xyz.insert(xyz.end(), {p.x(), p.y(), p.z()});
        faces.push_back(static_cast<int>(hit->face));
        const Vector3d n = pose.rotation.transpose() * face_normal(mesh, hit->face);
        fn.insert(fn.end(), {n.x(), n.y(), n.z()});
      }
  }
  const auto n = static_cast<Index>(faces.size());
  PointCloud cloud(Eigen::Map<Points>(xyz.data(), n, 3));
  cloud.view_index = std::vector<std::uint32_t>(n, view);
  cloud.faces = FaceProvenance{std::move(faces), Eigen::Map<Points>(fn.data(), n, 3)};
  return cloud;
}

PointCloud render_view(const TriMesh& mesh, const CameraPose& pose, const CameraIntrinsics& intr, std::uint32_t view) {
  const Bvh bvh(mesh);
  return render_view(bvh, mesh, pose, intr, view);
}

std::vector<PointCloud> render_views(const TriMesh& mesh, const std::vector<CameraPose>& poses,
                                     const CameraIntrinsics& intr) {
  const Bvh bvh(mesh);
  std::vector<PointCloud> views(poses.size());
  parallel_for(static_cast<Index>(poses.size()), [&](Index i) {
    views[i] = render_view(bvh, mesh, poses[i], intr, static_cast<std::uint32_t>(i));
  });
  return views;
}

PointCloud fuse_views(const std::vector<PointCloud>& views, const std::vector<CameraPose>& poses) {
  if (views.size() != poses.size()) throw ValidationError("fuse_views: one pose per view required");
  std::vector<PointCloud> world(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    const CameraPose& pose = poses[i];
    PointCloud w = views[i];
    w.positions = (views[i].positions * pose.rotation.transpose()).rowwise() + pose.translation.transpose();
    if (w.normals) w.normals = (*views[i].normals * pose.rotation.transpose()).eval();
    if (w.faces) w.faces->normal = (views[i].faces->normal * pose.rotation.transpose()).eval();
    world[i] = std::move(w);
  }
  return concatenate(world);
}

std::vector<Vector3d> camera_positions(const std::vector<CameraPose>& poses) {
  std::vector<Vector3d> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(p.position());
  return out;
}

}  // namespace surfbench
