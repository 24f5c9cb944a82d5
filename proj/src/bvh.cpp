#include "surfbench/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace surfbench {

namespace {

constexpr int kBins = 16;
constexpr int kLeafSize = 4;

double half_area(const Vector3d& lo, const Vector3d& hi) {
  const Vector3d d = (hi - lo).cwiseMax(0.0);
  return d.x() * d.y() + d.y() * d.z() + d.z() * d.x();
}

// Slab test; the entry distance, or nullopt when [t_min, t_max] misses the box.
std::optional<double> slab_entry(const Vector3d& lo, const Vector3d& hi, const Vector3d& origin,
                                 const Vector3d& inv_dir, double t_min, double t_max) {
  double t0 = t_min, t1 = t_max;
  for (int c = 0; c < 3; ++c) {
    double near = (lo[c] - origin[c]) * inv_dir[c];
    double far = (hi[c] - origin[c]) * inv_dir[c];
    if (near > far) std::swap(near, far);
    // NaN (0 * inf) leaves the interval untouched.
    t0 = near > t0 ? near : t0;
    t1 = far < t1 ? far : t1;
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace

std::optional<Hit> intersect_brute_force(const TriMesh& mesh, const Vector3d& origin, const Vector3d& dir, double t_min,
                                         double t_max) {
  std::optional<Hit> best;
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const Vector3d a = mesh.corner(f, 0);
    const Vector3d e1 = mesh.corner(f, 1) - a;
    const Vector3d e2 = mesh.corner(f, 2) - a;
    const auto hit = ray_triangle<double>(origin, dir, a, e1, e2, t_min, t_max);
    if (hit && (!best || hit->t < best->t)) best = Hit{hit->t, f, hit->u, hit->v};
  }
  return best;
}

Bvh::Bvh(const TriMesh& mesh) {
  const int n = static_cast<int>(mesh.face_count());
  if (n == 0) return;
  std::vector<Vector3d> centroids(n);
  std::vector<AlignedBox> boxes(n);
  faces_.resize(n);
  std::iota(faces_.begin(), faces_.end(), Index{0});
  for (int f = 0; f < n; ++f) {
    const Vector3d a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
    boxes[f] = {a.cwiseMin(b).cwiseMin(c), a.cwiseMax(b).cwiseMax(c)};
    centroids[f] = (a + b + c) / 3.0;
  }
  nodes_.reserve(2 * static_cast<std::size_t>(n));
  build(0, n, centroids, boxes);
  tris_.resize(n);
  for (int s = 0; s < n; ++s) {
    const Index f = faces_[s];
    const Vector3d a = mesh.corner(f, 0);
    tris_[s] = {a, mesh.corner(f, 1) - a, mesh.corner(f, 2) - a};
  }
}

int Bvh::build(int begin, int end, std::vector<Vector3d>& centroids, std::vector<AlignedBox>& boxes) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Vector3d lo = Vector3d::Constant(INFINITY), hi = Vector3d::Constant(-INFINITY);
  Vector3d clo = lo, chi = hi;
  for (int s = begin; s < end; ++s) {
    const Index f = faces_[s];
    lo = lo.cwiseMin(boxes[f].min);
    hi = hi.cwiseMax(boxes[f].max);
    clo = clo.cwiseMin(centroids[f]);
    chi = chi.cwiseMax(centroids[f]);
  }
  // Padding keeps rounding in the slab test from culling boundary hits.
  const Vector3d pad = 1e-9 * (Vector3d::Ones() + lo.cwiseAbs().cwiseMax(hi.cwiseAbs()));
  nodes_[id].lo = lo - pad;
  nodes_[id].hi = hi + pad;
  const int count = end - begin;
  if (count <= kLeafSize) {
    nodes_[id].first = begin;
    nodes_[id].count = count;
    return id;
  }

  // Binned SAH over the centroid bounds.
  int best_axis = -1, best_split = 0;
  double best_cost = static_cast<double>(count) * half_area(lo, hi);
  for (int axis = 0; axis < 3; ++axis) {
    const double extent = chi[axis] - clo[axis];
    if (!(extent > 0.0)) continue;
    struct Bin {
      Vector3d lo = Vector3d::Constant(INFINITY), hi = Vector3d::Constant(-INFINITY);
      int n = 0;
    };
    std::array<Bin, kBins> bins;
    for (int s = begin; s < end; ++s) {
      const Index f = faces_[s];
      const int b = std::min(kBins - 1, static_cast<int>(kBins * (centroids[f][axis] - clo[axis]) / extent));
      bins[b].lo = bins[b].lo.cwiseMin(boxes[f].min);
      bins[b].hi = bins[b].hi.cwiseMax(boxes[f].max);
      ++bins[b].n;
    }
    std::array<double, kBins> right_cost{};
    Vector3d rlo = Vector3d::Constant(INFINITY), rhi = Vector3d::Constant(-INFINITY);
    int rn = 0;
    for (int b = kBins - 1; b > 0; --b) {
      rlo = rlo.cwiseMin(bins[b].lo);
      rhi = rhi.cwiseMax(bins[b].hi);
      rn += bins[b].n;
      right_cost[b] = rn ? rn * half_area(rlo, rhi) : 0.0;
    }
    Vector3d llo = Vector3d::Constant(INFINITY), lhi = Vector3d::Constant(-INFINITY);
    int ln = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      llo = llo.cwiseMin(bins[b].lo);
      lhi = lhi.cwiseMax(bins[b].hi);
      ln += bins[b].n;
      if (ln == 0 || ln == count) continue;
      const double cost = ln * half_area(llo, lhi) + right_cost[b + 1];
      if (cost < best_cost) {
        best_cost = cost;
        best_axis = axis;
        best_split = b + 1;
      }
    }
  }

  int mid;
  if (best_axis >= 0) {
    const double extent = chi[best_axis] - clo[best_axis];
    auto it = std::partition(faces_.begin() + begin, faces_.begin() + end, [&](Index f) {
      return std::min(kBins - 1, static_cast<int>(kBins * (centroids[f][best_axis] - clo[best_axis]) / extent)) <
             best_split;
    });
    mid = static_cast<int>(it - faces_.begin());
  } else {
    // Fall back to a median split on the widest centroid axis.
    int axis = 0;
    for (int c = 1; c < 3; ++c)
      if (chi[c] - clo[c] > chi[axis] - clo[axis]) axis = c;
    mid = begin + count / 2;
    std::nth_element(faces_.begin() + begin, faces_.begin() + mid, faces_.begin() + end,
                     [&](Index a, Index b) { return centroids[a][axis] < centroids[b][axis]; });
  }
  build(begin, mid, centroids, boxes);
  const int right = build(mid, end, centroids, boxes);
  nodes_[id].first = right;
  nodes_[id].count = 0;
  return id;
}

std::optional<Hit> Bvh::intersect(const Vector3d& origin, const Vector3d& dir, double t_min, double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  const Vector3d inv_dir = dir.cwiseInverse();
  std::optional<Hit> best;
  double best_t = t_max;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const int id = stack[--top];
    const Node& node = nodes_[id];
    // Slack on the far end keeps equal-t boxes so ties reach the lower face index.
    const double reach = best_t + 1e-9 * std::abs(best_t);
    if (!slab_entry(node.lo, node.hi, origin, inv_dir, t_min, reach)) continue;
    if (node.count > 0) {
      for (int s = node.first; s < node.first + node.count; ++s) {
        const Tri& tri = tris_[s];
        const auto hit = ray_triangle<double>(origin, dir, tri.a, tri.e1, tri.e2, t_min, best_t);
        if (!hit) continue;
        if (!best || hit->t < best->t || (hit->t == best->t && faces_[s] < best->face)) {
          best = Hit{hit->t, faces_[s], hit->u, hit->v};
          best_t = hit->t;
        }
      }
      continue;
    }
    const int left = id + 1;
    const int right = node.first;
    const auto tl = slab_entry(nodes_[left].lo, nodes_[left].hi, origin, inv_dir, t_min, reach);
    const auto tr = slab_entry(nodes_[right].lo, nodes_[right].hi, origin, inv_dir, t_min, reach);
    if (!tl && !tr) continue;
    if (!tr) {
      stack[top++] = left;
    } else if (!tl) {
      stack[top++] = right;
    } else if (*tl <= *tr) {
      stack[top++] = right;
      stack[top++] = left;
    } else {
      stack[top++] = left;
      stack[top++] = right;
    }
  }
  return best;
}

bool Bvh::occluded(const Vector3d& origin, const Vector3d& dir, double t_min, double t_max) const {
  if (nodes_.empty()) return false;
  const Vector3d inv_dir = dir.cwiseInverse();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const int id = stack[--top];
    const Node& node = nodes_[id];
    if (!slab_entry(node.lo, node.hi, origin, inv_dir, t_min, t_max)) continue;
    if (node.count > 0) {
      for (int s = node.first; s < node.first + node.count; ++s) {
        const Tri& tri = tris_[s];
        if (ray_triangle<double>(origin, dir, tri.a, tri.e1, tri.e2, t_min, t_max)) return true;
      }
      continue;
    }
    stack[top++] = node.first;
    stack[top++] = id + 1;
  }
  return false;
}

}  // namespace surfbench
