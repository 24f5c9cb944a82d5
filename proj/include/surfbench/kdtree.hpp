#pragma once

#include "surfbench/types.hpp"

#include <vector>

namespace surfbench {

/// Distance used for nearest-neighbour queries.
enum class Norm { l1, l2, linf };

double distance(const double* a, const double* b, Norm norm = Norm::l2);

struct Neighbor {
  Index index;
  double distance;
  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact kd-tree: median split on the axis of widest spread. Results match a
/// brute-force scan, ties broken by ascending point index. Immutable after
/// construction and safe to query from several threads.
class KdTree {
 public:
  explicit KdTree(const Points& points, int leaf_size = 12);

  Index size() const { return static_cast<Index>(index_.size()); }

  /// The k nearest points, ascending by (distance, index). Throws
  /// ValidationError unless 1 <= k <= size().
  std::vector<Neighbor> knn(const Vector3d& query, Index k, Norm norm = Norm::l2) const;
  void knn(const Vector3d& query, Index k, std::vector<Neighbor>& out, Norm norm = Norm::l2) const;

  Neighbor nearest(const Vector3d& query, Norm norm = Norm::l2) const;

  /// All points with Euclidean distance <= radius, ascending by (distance, index).
  std::vector<Neighbor> radius_search(const Vector3d& query, double radius) const;

 private:
  struct Node {
    double lo[3], hi[3];
    Index begin, end;
    int left = -1, right = -1;
  };
  int build(Index begin, Index end, int leaf_size);
  double box_distance(const Node& node, const double* q, Norm norm) const;

  Points points_;  // permuted copy; row i is original point index_[i]
  std::vector<Index> index_;
  std::vector<Node> nodes_;
};

}  // namespace surfbench
