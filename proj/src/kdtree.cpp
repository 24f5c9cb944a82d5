#include "surfbench/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace surfbench {

double distance(const double* a, const double* b, Norm norm) {
  switch (norm) {
    case Norm::l2: return std::sqrt(dist2(a, b));
    case Norm::l1: return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
    case Norm::linf: return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
  }
  return 0.0;
}

KdTree::KdTree(const Points& points, int leaf_size) : points_(points), index_(points.rows()) {
  std::iota(index_.begin(), index_.end(), Index{0});
  if (points.rows() == 0) return;
  nodes_.reserve(2 * static_cast<std::size_t>(points.rows() / std::max(leaf_size, 1) + 1));
  // Build permutes index_; gather the coordinates afterwards.
  build(0, size(), std::max(leaf_size, 1));
  for (Index i = 0; i < size(); ++i) points_.row(i) = points.row(index_[i]);
  for (auto& node : nodes_) {
    for (int c = 0; c < 3; ++c) {
      node.lo[c] = points_.block(node.begin, c, node.end - node.begin, 1).minCoeff();
      node.hi[c] = points_.block(node.begin, c, node.end - node.begin, 1).maxCoeff();
    }
  }
}

int KdTree::build(Index begin, Index end, int leaf_size) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{{0, 0, 0}, {0, 0, 0}, begin, end});
  if (end - begin <= leaf_size) return id;
  double lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
  for (Index i = begin; i < end; ++i)
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], points_(index_[i], c));
      hi[c] = std::max(hi[c], points_(index_[i], c));
    }
  int axis = 0;
  for (int c = 1; c < 3; ++c)
    if (hi[c] - lo[c] > hi[axis] - lo[axis]) axis = c;
  const Index mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end, [&](Index a, Index b) {
    const double pa = points_(a, axis), pb = points_(b, axis);
    return pa < pb || (pa == pb && a < b);
  });
  const int left = build(begin, mid, leaf_size);
  const int right = build(mid, end, leaf_size);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::box_distance(const Node& node, const double* q, Norm norm) const {
  double d[3];
  for (int c = 0; c < 3; ++c) d[c] = std::max({node.lo[c] - q[c], 0.0, q[c] - node.hi[c]});
  switch (norm) {
    case Norm::l2: return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    case Norm::l1: return d[0] + d[1] + d[2];
    case Norm::linf: return std::max({d[0], d[1], d[2]});
  }
  return 0.0;
}

void KdTree::knn(const Vector3d& query, Index k, std::vector<Neighbor>& out, Norm norm) const {
  if (k < 1 || k > size()) throw ValidationError("knn: k must lie in [1, size]");
  const double q[3] = {query.x(), query.y(), query.z()};
  // Max-heap on (distance, index): the top is the current worst candidate.
  out.clear();
  out.reserve(k + 1);
  auto worst = [&]() -> const Neighbor& { return out.front(); };

  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    // Ties must still be visited: a farther node can hold an equal distance
    // with a lower index.
    if (static_cast<Index>(out.size()) == k && box_distance(node, q, norm) > worst().distance) continue;
    if (node.left < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        const Neighbor cand{index_[i], distance(&points_(i, 0), q, norm)};
        if (static_cast<Index>(out.size()) < k) {
          out.push_back(cand);
          std::push_heap(out.begin(), out.end());
        } else if (cand < worst()) {
          std::pop_heap(out.begin(), out.end());
          out.back() = cand;
          std::push_heap(out.begin(), out.end());
        }
      }
      continue;
    }
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    // Push the farther child first so the nearer one is searched first.
    if (box_distance(l, q, norm) <= box_distance(r, q, norm)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  std::sort_heap(out.begin(), out.end());
}

std::vector<Neighbor> KdTree::knn(const Vector3d& query, Index k, Norm norm) const {
  std::vector<Neighbor> out;
  knn(query, k, out, norm);
  return out;
}

Neighbor KdTree::nearest(const Vector3d& query, Norm norm) const {
  if (size() == 0) throw ValidationError("nearest: empty tree");
  const double q[3] = {query.x(), query.y(), query.z()};
  Neighbor best{-1, INFINITY};
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_distance(node, q, norm) > best.distance) continue;
    if (node.left < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        const Neighbor cand{index_[i], distance(&points_(i, 0), q, norm)};
        if (cand < best) best = cand;
      }
      continue;
    }
    const double dl = box_distance(nodes_[node.left], q, norm);
    const double dr = box_distance(nodes_[node.right], q, norm);
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

std::vector<Neighbor> KdTree::radius_search(const Vector3d& query, double radius) const {
  std::vector<Neighbor> out;
  if (size() == 0) return out;
  const double q[3] = {query.x(), query.y(), query.z()};
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_distance(node, q, Norm::l2) > radius) continue;
    if (node.left < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        const double d = distance(&points_(i, 0), q, Norm::l2);
        if (d <= radius) out.push_back({index_[i], d});
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace surfbench
