#include "surfbench/point_cloud.hpp"

namespace surfbench {

void PointCloud::check() const {
  const Index n = size();
  if (normals && normals->rows() != n) throw ValidationError("normals length mismatch");
  if (view_index && static_cast<Index>(view_index->size()) != n)
    throw ValidationError("view index length mismatch");
  if (faces && (static_cast<Index>(faces->face.size()) != n || faces->normal.rows() != n))
    throw ValidationError("face provenance length mismatch");
}

PointCloud subset(const PointCloud& cloud, std::span<const Index> indices) {
  const auto n = static_cast<Index>(indices.size());
  PointCloud out(Points(n, 3));
  for (Index i = 0; i < n; ++i) out.positions.row(i) = cloud.positions.row(indices[i]);
  if (cloud.normals) {
    Points nn(n, 3);
    for (Index i = 0; i < n; ++i) nn.row(i) = cloud.normals->row(indices[i]);
    out.normals = std::move(nn);
  }
  if (cloud.view_index) {
    std::vector<std::uint32_t> v(n);
    for (Index i = 0; i < n; ++i) v[i] = (*cloud.view_index)[indices[i]];
    out.view_index = std::move(v);
  }
  if (cloud.faces) {
    FaceProvenance fp{std::vector<int>(n), Points(n, 3)};
    for (Index i = 0; i < n; ++i) {
      fp.face[i] = cloud.faces->face[indices[i]];
      fp.normal.row(i) = cloud.faces->normal.row(indices[i]);
    }
    out.faces = std::move(fp);
  }
  return out;
}

PointCloud concatenate(std::span<const PointCloud> parts) {
  Index total = 0;
  bool normals = !parts.empty(), views = !parts.empty(), faces = !parts.empty();
  for (const auto& p : parts) {
    total += p.size();
    normals = normals && p.normals.has_value();
    views = views && p.view_index.has_value();
    faces = faces && p.faces.has_value();
  }
  PointCloud out(Points(total, 3));
  if (normals) out.normals = Points(total, 3);
  if (views) out.view_index = std::vector<std::uint32_t>();
  if (faces) out.faces = FaceProvenance{{}, Points(total, 3)};
  Index at = 0;
  for (const auto& p : parts) {
    const Index n = p.size();
    if (n == 0) continue;
    out.positions.middleRows(at, n) = p.positions;
    if (normals) out.normals->middleRows(at, n) = *p.normals;
    if (views) out.view_index->insert(out.view_index->end(), p.view_index->begin(), p.view_index->end());
    if (faces) {
      out.faces->face.insert(out.faces->face.end(), p.faces->face.begin(), p.faces->face.end());
      out.faces->normal.middleRows(at, n) = p.faces->normal;
    }
    at += n;
  }
  return out;
}

}  // namespace surfbench
