#include "surfbench/complexity.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace surfbench {

namespace {

double cot(const Vector3d& a, const Vector3d& b) {
  const double s = a.cross(b).norm();
  return a.dot(b) / s;
}

}  // namespace

CurvatureField vertex_curvatures(const TriMesh& mesh) {
  validate(mesh);
  const TopologyReport topo = topology_report(mesh);
  if (!topo.edge_manifold || !topo.vertex_manifold) throw ValidationError("curvature needs a manifold mesh");
  const Index nv = mesh.vertex_count();
  CurvatureField field;
  field.mean = Eigen::VectorXd::Zero(nv);
  field.gaussian = Eigen::VectorXd::Zero(nv);
  field.mixed_area = Eigen::VectorXd::Zero(nv);
  field.angle_defect = Eigen::VectorXd::Zero(nv);
  field.boundary.assign(nv, 0);
  field.referenced.assign(nv, 0);

  // Boundary vertices: endpoints of edges used by a single face.
  std::vector<std::pair<int, int>> edges;
  edges.reserve(mesh.face_count() * 3);
  for (Index f = 0; f < mesh.face_count(); ++f)
    for (int c = 0; c < 3; ++c) {
      int a = mesh.faces(f, c), b = mesh.faces(f, (c + 1) % 3);
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i == 1) field.boundary[edges[i].first] = field.boundary[edges[i].second] = 1;
    i = j;
  }

  Points normal_sum = Points::Zero(nv, 3);
  Eigen::VectorXd angle_sum = Eigen::VectorXd::Zero(nv);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const int idx[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    const Vector3d p[3] = {mesh.vertex(idx[0]), mesh.vertex(idx[1]), mesh.vertex(idx[2])};
    const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
    if (!(area > 0.0)) throw ValidationError("degenerate face in curvature input");
    double angle[3], cotangent[3];
    for (int c = 0; c < 3; ++c) {
      const Vector3d a = p[(c + 1) % 3] - p[c], b = p[(c + 2) % 3] - p[c];
      angle[c] = std::atan2(a.cross(b).norm(), a.dot(b));
      cotangent[c] = cot(a, b);
    }
    const bool obtuse = angle[0] > std::numbers::pi / 2 || angle[1] > std::numbers::pi / 2 ||
                        angle[2] > std::numbers::pi / 2;
    for (int c = 0; c < 3; ++c) {
      const int i = idx[c];
      const int j = (c + 1) % 3, k = (c + 2) % 3;
      field.referenced[i] = 1;
      angle_sum[i] += angle[c];
      // Edge (i, j) is opposite corner k and edge (i, k) opposite corner j.
      const Vector3d eij = p[c] - p[j], eik = p[c] - p[k];
      const Vector3d contrib = cotangent[k] * eij + cotangent[j] * eik;
      normal_sum.row(i) += contrib.transpose();
      if (!obtuse) {
        field.mixed_area[i] += (eij.squaredNorm() * cotangent[k] + eik.squaredNorm() * cotangent[j]) / 8.0;
      } else {
        field.mixed_area[i] += angle[c] > std::numbers::pi / 2 ? area / 2.0 : area / 4.0;
      }
    }
  }
  for (Index i = 0; i < nv; ++i) {
    if (!field.referenced[i]) continue;
    const double full = field.boundary[i] ? std::numbers::pi : 2.0 * std::numbers::pi;
    field.angle_defect[i] = full - angle_sum[i];
    const double a = field.mixed_area[i];
    field.gaussian[i] = field.angle_defect[i] / a;
    field.mean[i] = row3(normal_sum, i).norm() / (2.0 * a) / 2.0;
  }
  return field;
}

double complexity_score(const CurvatureField& field, Weighting weighting) {
  double total = 0.0, weight = 0.0;
  for (Index i = 0; i < field.mean.size(); ++i) {
    if (!field.referenced[i] || field.boundary[i]) continue;
    const double h = field.mean[i];
    const double w = weighting == Weighting::vertex_mean ? 1.0 : field.mixed_area[i];
    total += w * (1.5 * h * h - 0.5 * field.gaussian[i]);
    weight += w;
  }
  if (!(weight > 0.0)) throw ValidationError("mesh has no interior vertex to score");
  return total / weight;
}

double complexity_score(const TriMesh& mesh, Weighting weighting) {
  return complexity_score(vertex_curvatures(mesh), weighting);
}

CorpusPartition partition_corpus(std::span<const double> scores, std::array<int, 3> ratios) {
  const auto n = static_cast<Index>(scores.size());
  if (n < 10) throw ValidationError("corpus partition needs at least 10 scores");
  if (ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0 || ratios[0] + ratios[1] + ratios[2] <= 0)
    throw ValidationError("partition ratios must be non-negative with a positive sum");
  for (double s : scores)
    if (!std::isfinite(s)) throw ValidationError("non-finite complexity score");
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });
  const double sum = ratios[0] + ratios[1] + ratios[2];
  const auto high = static_cast<Index>(std::llround(n * ratios[2] / sum));
  const auto middle = std::min(n - high, static_cast<Index>(std::llround(n * ratios[1] / sum)));
  CorpusPartition out;
  const Index low = n - high - middle;
  out.low.assign(order.begin(), order.begin() + low);
  out.middle.assign(order.begin() + low, order.begin() + low + middle);
  out.high.assign(order.begin() + low + middle, order.end());
  return out;
}

}  // namespace surfbench
