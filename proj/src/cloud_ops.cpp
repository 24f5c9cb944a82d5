#include "surfbench/cloud_ops.hpp"

#include "surfbench/parallel.hpp"
#include "surfbench/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace surfbench {

namespace {

std::atomic<int> g_threads{1};

/// Bounding-box tree whose nodes cache the largest "distance to selected set"
/// below them. Adding a selected point only descends into nodes whose box lies
/// closer than that cached maximum, which is what keeps FPS near-linear.
class FarthestPointTree {
 public:
  FarthestPointTree(const Points& points, int leaf_size = 32)
      : points_(points), order_(points.rows()), dist_(points.rows(), std::numeric_limits<double>::infinity()) {
    std::iota(order_.begin(), order_.end(), Index{0});
    nodes_.reserve(2 * static_cast<std::size_t>(points.rows() / leaf_size + 1));
    build(0, points.rows(), leaf_size);
  }

  void add(Index selected) {
    dist_[selected] = -1.0;  // never chosen again
    update(0, &points_(selected, 0));
  }

  /// Point with the largest distance to the selected set (lowest index on ties).
  Index farthest() const { return nodes_[0].arg; }

 private:
  struct Node {
    double lo[3], hi[3];
    Index begin, end;
    int left = -1, right = -1;
    double max = std::numeric_limits<double>::infinity();
    Index arg = -1;
  };

  static bool better(double d, Index i, double best_d, Index best_i) {
    return d > best_d || (d == best_d && i < best_i);
  }

  int build(Index begin, Index end, int leaf_size) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{{0, 0, 0}, {0, 0, 0}, begin, end});
    double lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
    Index arg = std::numeric_limits<Index>::max();
    for (Index i = begin; i < end; ++i) {
      arg = std::min(arg, order_[i]);
      for (int c = 0; c < 3; ++c) {
        lo[c] = std::min(lo[c], points_(order_[i], c));
        hi[c] = std::max(hi[c], points_(order_[i], c));
      }
    }
    std::copy(lo, lo + 3, nodes_[id].lo);
    std::copy(hi, hi + 3, nodes_[id].hi);
    nodes_[id].arg = arg;
    if (end - begin <= leaf_size) return id;
    int axis = 0;
    for (int c = 1; c < 3; ++c)
      if (hi[c] - lo[c] > hi[axis] - lo[axis]) axis = c;
    const Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](Index a, Index b) {
      return points_(a, axis) < points_(b, axis) || (points_(a, axis) == points_(b, axis) && a < b);
    });
    const int left = build(begin, mid, leaf_size);
    const int right = build(mid, end, leaf_size);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void update(int id, const double* s) {
    Node& node = nodes_[id];
    double gap2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double g = std::max({node.lo[c] - s[c], 0.0, s[c] - node.hi[c]});
      gap2 += g * g;
    }
    if (gap2 > node.max) return;  // nothing below can get closer
    if (node.left < 0) {
      node.max = -1.0;
      node.arg = -1;
      for (Index i = node.begin; i < node.end; ++i) {
        const Index p = order_[i];
        const double d = dist2(&points_(p, 0), s);
        if (d < dist_[p]) dist_[p] = d;
        if (node.arg < 0 || better(dist_[p], p, node.max, node.arg)) {
          node.max = dist_[p];
          node.arg = p;
        }
      }
      return;
    }
    update(node.left, s);
    update(node.right, s);
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    if (better(r.max, r.arg, l.max, l.arg)) {
      node.max = r.max;
      node.arg = r.arg;
    } else {
      node.max = l.max;
      node.arg = l.arg;
    }
  }

  const Points& points_;
  std::vector<Index> order_;
  std::vector<double> dist_;  // squared distance to the selected set, -1 once selected
  std::vector<Node> nodes_;
};

}  // namespace

int thread_count() { return g_threads.load(); }
void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

std::vector<Index> fps_indices(const Points& points, Index n, FpsSeed seed) {
  const Index size = points.rows();
  if (n < 1 || n > size) throw ValidationError("fps: n must lie in [1, cloud size]");
  Index first = 0;
  if (seed == FpsSeed::farthest_from_centroid) {
    const Vector3d centroid = points.colwise().mean().transpose();
    double best = -1.0;
    for (Index i = 0; i < size; ++i) {
      const double d = dist2(&points(i, 0), centroid.data());
      if (d > best) {
        best = d;
        first = i;
      }
    }
  }
  std::vector<Index> selected;
  selected.reserve(n);
  selected.push_back(first);
  FarthestPointTree tree(points);
  tree.add(first);
  while (static_cast<Index>(selected.size()) < n) {
    const Index next = tree.farthest();
    selected.push_back(next);
    tree.add(next);
  }
  return selected;
}

PointCloud fps(const PointCloud& cloud, Index n, FpsSeed seed) {
  const auto idx = fps_indices(cloud.positions, n, seed);
  return subset(cloud, idx);
}

std::vector<Index> random_indices(Index size, Index n, std::uint64_t seed) {
  if (n < 0 || n > size) throw ValidationError("random_sample: n must lie in [0, cloud size]");
  std::vector<Index> pool(size);
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(seed);
  for (Index i = 0; i < n; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(size - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

PointCloud random_sample(const PointCloud& cloud, Index n, std::uint64_t seed) {
  const auto idx = random_indices(cloud.size(), n, seed);
  return subset(cloud, idx);
}

PointCloud estimate_normals(const PointCloud& cloud, Index k, std::vector<Index>* unreliable) {
  if (cloud.size() <= k) throw ValidationError("estimate_normals: cloud must hold more than k points");
  const KdTree tree(cloud.positions);
  const Index n = cloud.size();
  Points normals(n, 3);
  std::vector<std::uint8_t> flagged(n, 0);
  parallel_for(n, [&](Index i) {
    thread_local std::vector<Neighbor> nbrs;
    tree.knn(cloud.point(i), k, nbrs);
    Vector3d mean = Vector3d::Zero();
    for (const auto& nb : nbrs) mean += cloud.point(nb.index);
    mean /= static_cast<double>(nbrs.size());
    Matrix3d cov = Matrix3d::Zero();
    for (const auto& nb : nbrs) {
      const Vector3d d = cloud.point(nb.index) - mean;
      cov.noalias() += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Matrix3d> eig(cov);
    // Eigenvalues ascend: rank < 2 means the middle one vanishes.
    const auto& ev = eig.eigenvalues();
    if (!(ev(1) > 1e-12 * std::max(ev(2), std::numeric_limits<double>::min()))) flagged[i] = 1;
    normals.row(i) = eig.eigenvectors().col(0).normalized().transpose();
  });
  if (unreliable) {
    unreliable->clear();
    for (Index i = 0; i < n; ++i)
      if (flagged[i]) unreliable->push_back(i);
  }
  PointCloud out = cloud;
  out.normals = std::move(normals);
  return out;
}

PointCloud orient_normals(const PointCloud& cloud, const std::vector<Vector3d>& camera_positions,
                          std::vector<Index>* failed) {
  if (!cloud.normals) throw ValidationError("orient_normals: cloud has no normals");
  if (!cloud.view_index) throw ValidationError("orient_normals: cloud has no view provenance");
  PointCloud out = cloud;
  if (failed) failed->clear();
  for (Index i = 0; i < cloud.size(); ++i) {
    const std::uint32_t view = (*cloud.view_index)[i];
    if (view >= camera_positions.size()) throw ValidationError("orient_normals: view index without camera");
    const Vector3d to_camera = camera_positions[view] - cloud.point(i);
    if (to_camera.squaredNorm() == 0.0) {
      if (!failed) throw ValidationError("orient_normals: point " + std::to_string(i) + " coincides with its camera");
      failed->push_back(i);
      continue;
    }
    const Vector3d n = row3(*out.normals, i);
    if (n.dot(to_camera) < 0.0) out.normals->row(i) = -out.normals->row(i);
  }
  return out;
}

}  // namespace surfbench
