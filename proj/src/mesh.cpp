#include "surfbench/mesh.hpp"

#include "surfbench/rng.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <vector>

namespace surfbench {

namespace {

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), Index{0}); }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (std::uint64_t{lo} << 32) | hi;
}

}  // namespace

void validate(const TriMesh& mesh) {
  const Index nv = mesh.vertex_count();
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
      throw ValidationError("face " + std::to_string(f) + " references a missing vertex");
    if (a == b || b == c || a == c)
      throw ValidationError("face " + std::to_string(f) + " repeats a vertex");
  }
  if (!mesh.vertices.allFinite()) throw ValidationError("non-finite vertex coordinate");
}

double face_area(const TriMesh& mesh, Index f) {
  const Vector3d a = mesh.corner(f, 0);
  return 0.5 * (mesh.corner(f, 1) - a).cross(mesh.corner(f, 2) - a).norm();
}

Vector3d face_normal(const TriMesh& mesh, Index f) {
  const Vector3d a = mesh.corner(f, 0);
  const Vector3d n = (mesh.corner(f, 1) - a).cross(mesh.corner(f, 2) - a);
  const double len = n.norm();
  return len > 0.0 ? Vector3d(n / len) : Vector3d::Zero();
}

double surface_area(const TriMesh& mesh) {
  double total = 0.0;
  for (Index f = 0; f < mesh.face_count(); ++f) total += face_area(mesh, f);
  return total;
}

TriMesh remove_degenerate_faces(const TriMesh& mesh, double min_area) {
  std::vector<Index> keep;
  for (Index f = 0; f < mesh.face_count(); ++f)
    if (face_area(mesh, f) > min_area) keep.push_back(f);
  Faces faces(static_cast<Index>(keep.size()), 3);
  for (std::size_t i = 0; i < keep.size(); ++i) faces.row(static_cast<Index>(i)) = mesh.faces.row(keep[i]);
  return TriMesh(mesh.vertices, std::move(faces));
}

AlignedBox bounding_box(const Points& points) {
  if (points.rows() == 0) return {Vector3d::Zero(), Vector3d::Zero()};
  return {points.colwise().minCoeff().transpose(), points.colwise().maxCoeff().transpose()};
}

TopologyReport topology_report(const TriMesh& mesh) {
  TopologyReport report;
  const Index nv = mesh.vertex_count();
  const Index nf = mesh.face_count();
  if (nf == 0) return report;

  struct EdgeUse {
    int count = 0;
    int forward = 0;  // directed low -> high
    int backward = 0;
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(static_cast<std::size_t>(nf) * 2);
  for (Index f = 0; f < nf; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = mesh.faces(f, c), b = mesh.faces(f, (c + 1) % 3);
      auto& use = edges[edge_key(a, b)];
      ++use.count;
      (a < b ? use.forward : use.backward)++;
    }
  }
  report.edge_manifold = true;
  report.watertight = true;
  for (const auto& [key, use] : edges) {
    if (use.count > 2) report.edge_manifold = false;
    if (use.count == 1) ++report.boundary_edges;
    if (use.count != 2 || use.forward != 1 || use.backward != 1) report.watertight = false;
  }

  // Faces around each vertex must form a single fan: link incident faces that
  // share an edge through the vertex and count the resulting groups.
  std::vector<Index> offset(nv + 1, 0);
  for (Index f = 0; f < nf; ++f)
    for (int c = 0; c < 3; ++c) ++offset[mesh.faces(f, c) + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  std::vector<Index> incident(offset.back());
  {
    std::vector<Index> fill(offset.begin(), offset.end() - 1);
    for (Index f = 0; f < nf; ++f)
      for (int c = 0; c < 3; ++c) incident[fill[mesh.faces(f, c)]++] = f;
  }
  report.vertex_manifold = true;
  std::vector<std::pair<int, int>> spokes;
  for (Index v = 0; v < nv && report.vertex_manifold; ++v) {
    const Index begin = offset[v], end = offset[v + 1];
    if (begin == end) continue;
    spokes.clear();
    for (Index i = begin; i < end; ++i) {
      const Index f = incident[i];
      for (int c = 0; c < 3; ++c)
        if (mesh.faces(f, c) != v) spokes.emplace_back(mesh.faces(f, c), static_cast<int>(i - begin));
    }
    std::sort(spokes.begin(), spokes.end());
    DisjointSets fan(end - begin);
    for (std::size_t s = 1; s < spokes.size(); ++s)
      if (spokes[s].first == spokes[s - 1].first) fan.unite(spokes[s].second, spokes[s - 1].second);
    for (Index i = 0; i < end - begin; ++i)
      if (fan.find(i) != 0) {
        report.vertex_manifold = false;
        break;
      }
  }

  DisjointSets comp(nv);
  for (Index f = 0; f < nf; ++f) {
    comp.unite(mesh.faces(f, 0), mesh.faces(f, 1));
    comp.unite(mesh.faces(f, 1), mesh.faces(f, 2));
  }
  std::unordered_map<Index, Index> comp_id;
  std::vector<Index> chi;
  for (Index v = 0; v < nv; ++v) {
    if (offset[v] == offset[v + 1]) continue;
    auto [it, inserted] = comp_id.emplace(comp.find(v), static_cast<Index>(chi.size()));
    if (inserted) chi.push_back(0);
    ++chi[it->second];
  }
  for (const auto& [key, use] : edges) --chi[comp_id.at(comp.find(static_cast<Index>(key >> 32)))];
  for (Index f = 0; f < nf; ++f) ++chi[comp_id.at(comp.find(mesh.faces(f, 0)))];

  report.component_count = static_cast<int>(chi.size());
  report.euler_characteristic = std::accumulate(chi.begin(), chi.end(), Index{0});
  if (report.watertight && report.edge_manifold && report.vertex_manifold) {
    Index genus = 0;
    for (Index c : chi) genus = std::max(genus, (2 - c) / 2);
    report.genus = static_cast<int>(genus);
  }
  return report;
}

TriMesh normalize(const TriMesh& mesh, Mode mode) {
  if (mesh.vertex_count() == 0 || mesh.face_count() == 0) throw ValidationError("cannot normalize an empty mesh");
  const Vector3d center = bounding_box(mesh.vertices).center();
  TriMesh out = mesh;
  out.vertices.rowwise() -= center.transpose();
  if (mode == Mode::object) {
    const double radius = out.vertices.rowwise().norm().maxCoeff();
    if (!(radius > 0.0)) throw ValidationError("mesh collapses to a point");
    out.vertices /= radius;
  }
  return out;
}

PointCloud sample_surface(const TriMesh& mesh, Index n, std::uint64_t seed) {
  if (n < 0) throw ValidationError("negative sample count");
  const Index nf = mesh.face_count();
  std::vector<double> cdf(nf);
  double total = 0.0;
  for (Index f = 0; f < nf; ++f) {
    total += face_area(mesh, f);
    cdf[f] = total;
  }
  if (!(total > 0.0)) throw ValidationError("mesh has zero surface area");

  PointCloud cloud(Points(n, 3));
  FaceProvenance prov{std::vector<int>(n), Points(n, 3)};
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // upper_bound never lands on a zero-area face.
    const auto f = static_cast<Index>(it - cdf.begin());
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vector3d p = (1.0 - r1) * mesh.corner(f, 0) + r1 * (1.0 - r2) * mesh.corner(f, 1) + r1 * r2 * mesh.corner(f, 2);
    cloud.positions.row(i) = p.transpose();
    prov.face[i] = static_cast<int>(f);
    prov.normal.row(i) = face_normal(mesh, f).transpose();
  }
  cloud.faces = std::move(prov);
  return cloud;
}

}  // namespace surfbench
