#pragma once

#include "surfbench/geometry.hpp"
#include "surfbench/mesh.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace surfbench {

struct Hit {
  double t;
  Index face;
  double u, v;
};

/// Nearest hit over all faces without acceleration; the reference the BVH
/// must reproduce exactly. Ties in t resolve to the lower face index.
std::optional<Hit> intersect_brute_force(const TriMesh& mesh, const Vector3d& origin, const Vector3d& dir,
                                         double t_min = 0.0, double t_max = std::numeric_limits<double>::infinity());

/// Binned-SAH bounding volume hierarchy over a triangle mesh. Immutable and
/// shareable across threads once built.
class Bvh {
 public:
  explicit Bvh(const TriMesh& mesh);

  std::optional<Hit> intersect(const Vector3d& origin, const Vector3d& dir, double t_min = 0.0,
                               double t_max = std::numeric_limits<double>::infinity()) const;
  /// True if any face is hit with t in [t_min, t_max].
  bool occluded(const Vector3d& origin, const Vector3d& dir, double t_min, double t_max) const;

  Index face_count() const { return static_cast<Index>(faces_.size()); }

 private:
  struct Node {
    Eigen::Vector3d lo, hi;
    int first = 0;  // leaf: first triangle slot; inner: right child
    int count = 0;  // 0 for inner nodes
  };
  struct Tri {
    Vector3d a, e1, e2;
  };
  int build(int begin, int end, std::vector<Eigen::Vector3d>& centroids, std::vector<AlignedBox>& boxes);

  std::vector<Node> nodes_;
  std::vector<Tri> tris_;
  std::vector<Index> faces_;  // slot -> original face index
};

}  // namespace surfbench
