#pragma once

#include "surfbench/kdtree.hpp"
#include "surfbench/mesh.hpp"
#include "surfbench/nfs.hpp"
#include "surfbench/point_cloud.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace surfbench {

/// Nearest point of `to` for every row of `from` (ties to the lower index).
std::vector<Neighbor> nearest_neighbors(const Points& from, const KdTree& to, Norm norm = Norm::l2);

/// Symmetric mean nearest-neighbour distance, each direction weighted 1/2.
double chamfer(const PointCloud& p, const PointCloud& q, Norm norm = Norm::l2);

struct FScore {
  double fscore = 0.0;  ///< percent
  double precision = 0.0;
  double recall = 0.0;
};

/// Precision: fraction of p strictly within tau of q; recall the reverse.
FScore fscore(const PointCloud& p, const PointCloud& q, double tau);

/// Mean |<n_p, n_nn(p)>| over both directions, using face-provenance normals.
double ncs(const PointCloud& p, const PointCloud& q);

struct MetricPreset {
  std::string label;
  Index samples = 0;  ///< per surface; 0 means "match the ground-truth cloud"
  double tau = 0.0;

  static MetricPreset object() { return {"object", 200000, 0.005}; }
  static MetricPreset scene() { return {"scene", 1500000, 0.03}; }
  static MetricPreset real() { return {"real", 0, 0.5}; }
  static MetricPreset named(const std::string& label);
  void check() const;
};

struct MetricReport {
  double cd = 0.0;
  double fscore = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double ncs = 0.0;
  std::optional<double> nfs;
  std::string preset;
  std::uint64_t seed = 0;
  /// Ground truth normals were estimated rather than taken from faces.
  bool degraded_ncs = false;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// All metrics on two already sampled clouds carrying face normals.
MetricReport evaluate_clouds(const PointCloud& recon, const PointCloud& gt, double tau, const std::string& label,
                             std::uint64_t seed, const NfsModel* model = nullptr);

/// Samples both meshes with the preset's count (seeded), then evaluates.
MetricReport evaluate(const TriMesh& recon, const TriMesh& gt, const MetricPreset& preset, std::uint64_t seed,
                      const NfsModel* model = nullptr);

/// Ground truth given as a raw cloud. Without face provenance its normals are
/// taken from the cloud or estimated (k = 40) and the report is flagged.
MetricReport evaluate(const TriMesh& recon, const PointCloud& gt, const MetricPreset& preset, std::uint64_t seed,
                      const NfsModel* model = nullptr);

}  // namespace surfbench
