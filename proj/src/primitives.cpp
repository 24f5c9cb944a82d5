#include "surfbench/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace surfbench::primitives {

namespace {

TriMesh from_lists(const std::vector<Vector3d>& v, const std::vector<Eigen::Vector3i>& f) {
  Points vertices(static_cast<Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) vertices.row(static_cast<Index>(i)) = v[i].transpose();
  Faces faces(static_cast<Index>(f.size()), 3);
  for (std::size_t i = 0; i < f.size(); ++i) faces.row(static_cast<Index>(i)) = f[i].transpose();
  return TriMesh(std::move(vertices), std::move(faces));
}

}  // namespace

TriMesh icosphere(int level, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vector3d> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Eigen::Vector3i> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int a = mid(tri[0], tri[1]), b = mid(tri[1], tri[2]), c = mid(tri[2], tri[0]);
      next.emplace_back(tri[0], a, c);
      next.emplace_back(tri[1], b, a);
      next.emplace_back(tri[2], c, b);
      next.emplace_back(a, b, c);
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return from_lists(v, f);
}

TriMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments) {
  std::vector<Vector3d> v;
  std::vector<Eigen::Vector3i> f;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < major_segments; ++i) {
    const double u = two_pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double w = two_pi * j / minor_segments;
      const double r = major_radius + minor_radius * std::cos(w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(w));
    }
  }
  auto id = [&](int i, int j) { return (i % major_segments) * minor_segments + (j % minor_segments); };
  for (int i = 0; i < major_segments; ++i)
    for (int j = 0; j < minor_segments; ++j) {
      f.emplace_back(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      f.emplace_back(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  return from_lists(v, f);
}

TriMesh cylinder(double radius, double height, int segments, int rings) {
  std::vector<Vector3d> v;
  std::vector<Eigen::Vector3i> f;
  for (int r = 0; r <= rings; ++r) {
    const double z = -0.5 * height + height * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * std::numbers::pi * s / segments;
      v.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
    }
  }
  auto id = [&](int r, int s) { return r * segments + (s % segments); };
  for (int r = 0; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      f.emplace_back(id(r, s), id(r, s + 1), id(r + 1, s + 1));
      f.emplace_back(id(r, s), id(r + 1, s + 1), id(r + 1, s));
    }
  return from_lists(v, f);
}

TriMesh grid(int nx, int ny, double sx, double sy) {
  std::vector<Vector3d> v;
  std::vector<Eigen::Vector3i> f;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) v.emplace_back(sx * i / nx, sy * j / ny, 0.0);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      f.emplace_back(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      f.emplace_back(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  return from_lists(v, f);
}

TriMesh box(const Vector3d& size, int divisions, bool inward) {
  std::vector<Vector3d> v;
  std::vector<Eigen::Vector3i> f;
  std::map<std::tuple<int, int, int>, int> lattice;
  const int n = divisions;
  auto vid = [&](int i, int j, int k) {
    auto [it, inserted] = lattice.emplace(std::make_tuple(i, j, k), static_cast<int>(v.size()));
    if (inserted)
      v.emplace_back(size.x() * (double(i) / n - 0.5), size.y() * (double(j) / n - 0.5), size.z() * (double(k) / n - 0.5));
    return it->second;
  };
  // Each side: fixed axis, fixed end (0 or n); u/v axes chosen so (u x v) points outward.
  struct Side {
    int axis, end, u, w;
  };
  const Side sides[] = {{0, n, 1, 2}, {0, 0, 2, 1}, {1, n, 2, 0}, {1, 0, 0, 2}, {2, n, 0, 1}, {2, 0, 1, 0}};
  for (const auto& s : sides) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        auto corner = [&](int da, int db) {
          int c[3];
          c[s.axis] = s.end;
          c[s.u] = a + da;
          c[s.w] = b + db;
          return vid(c[0], c[1], c[2]);
        };
        const int p00 = corner(0, 0), p10 = corner(1, 0), p11 = corner(1, 1), p01 = corner(0, 1);
        f.emplace_back(p00, p10, p11);
        f.emplace_back(p00, p11, p01);
      }
  }
  TriMesh mesh = from_lists(v, f);
  return inward ? flipped(mesh) : mesh;
}

TriMesh merge(const TriMesh& a, const TriMesh& b) {
  Points v(a.vertex_count() + b.vertex_count(), 3);
  v << a.vertices, b.vertices;
  Faces f(a.face_count() + b.face_count(), 3);
  f.topRows(a.face_count()) = a.faces;
  f.bottomRows(b.face_count()) = b.faces.array() + static_cast<int>(a.vertex_count());
  return TriMesh(std::move(v), std::move(f));
}

TriMesh flipped(const TriMesh& mesh) {
  TriMesh out = mesh;
  out.faces.col(1).swap(out.faces.col(2));
  return out;
}

}  // namespace surfbench::primitives
