#include "surfbench/metrics.hpp"

#include "surfbench/cloud_ops.hpp"
#include "surfbench/parallel.hpp"
#include "surfbench/rng.hpp"

#include <cmath>

namespace surfbench {

namespace {

void require_points(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw ValidationError("metric needs two non-empty clouds");
}

const Points& face_normals(const PointCloud& c) {
  if (!c.faces) throw ValidationError("normal consistency needs face normals on both clouds");
  return c.faces->normal;
}

double mean_distance(const std::vector<Neighbor>& nn) {
  double sum = 0.0;
  for (const auto& n : nn) sum += n.distance;
  return sum / static_cast<double>(nn.size());
}

double fraction_within(const std::vector<Neighbor>& nn, double tau) {
  Index count = 0;
  for (const auto& n : nn) count += n.distance < tau ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(nn.size());
}

double mean_abs_dot(const Points& from_normals, const Points& to_normals, const std::vector<Neighbor>& nn) {
  double sum = 0.0;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    const auto r = static_cast<Index>(i);
    sum += std::abs(from_normals(r, 0) * to_normals(nn[i].index, 0) + from_normals(r, 1) * to_normals(nn[i].index, 1) +
                    from_normals(r, 2) * to_normals(nn[i].index, 2));
  }
  return sum / static_cast<double>(nn.size());
}

FScore make_fscore(double precision, double recall) {
  FScore f{0.0, precision, recall};
  if (precision + recall > 0.0) f.fscore = 200.0 * precision * recall / (precision + recall);
  return f;
}

}  // namespace

std::vector<Neighbor> nearest_neighbors(const Points& from, const KdTree& to, Norm norm) {
  std::vector<Neighbor> out(from.rows());
  parallel_for(from.rows(), [&](Index i) { out[i] = to.nearest(row3(from, i), norm); });
  return out;
}

double chamfer(const PointCloud& p, const PointCloud& q, Norm norm) {
  require_points(p, q);
  const auto pq = nearest_neighbors(p.positions, KdTree(q.positions), norm);
  const auto qp = nearest_neighbors(q.positions, KdTree(p.positions), norm);
  return 0.5 * mean_distance(pq) + 0.5 * mean_distance(qp);
}

FScore fscore(const PointCloud& p, const PointCloud& q, double tau) {
  require_points(p, q);
  if (!(tau > 0.0)) throw ValidationError("F-score threshold must be positive");
  const auto pq = nearest_neighbors(p.positions, KdTree(q.positions));
  const auto qp = nearest_neighbors(q.positions, KdTree(p.positions));
  return make_fscore(fraction_within(pq, tau), fraction_within(qp, tau));
}

double ncs(const PointCloud& p, const PointCloud& q) {
  require_points(p, q);
  const Points& np = face_normals(p);
  const Points& nq = face_normals(q);
  const auto pq = nearest_neighbors(p.positions, KdTree(q.positions));
  const auto qp = nearest_neighbors(q.positions, KdTree(p.positions));
  return 0.5 * mean_abs_dot(np, nq, pq) + 0.5 * mean_abs_dot(nq, np, qp);
}

MetricPreset MetricPreset::named(const std::string& label) {
  if (label == "object") return object();
  if (label == "scene") return scene();
  if (label == "real") return real();
  throw ValidationError("unknown metric preset '" + label + "'");
}

void MetricPreset::check() const {
  if (samples < 0) throw ValidationError("preset sample count must be non-negative");
  if (!(tau > 0.0)) throw ValidationError("preset threshold must be positive");
}

MetricReport evaluate_clouds(const PointCloud& recon, const PointCloud& gt, double tau, const std::string& label,
                             std::uint64_t seed, const NfsModel* model) {
  require_points(recon, gt);
  if (!(tau > 0.0)) throw ValidationError("F-score threshold must be positive");
  const Points& nr = face_normals(recon);
  const Points& ng = face_normals(gt);
  // One pair of nearest-neighbour passes serves all three metrics.
  const auto rg = nearest_neighbors(recon.positions, KdTree(gt.positions));
  const auto gr = nearest_neighbors(gt.positions, KdTree(recon.positions));
  MetricReport report;
  report.cd = 0.5 * mean_distance(rg) + 0.5 * mean_distance(gr);
  const FScore f = make_fscore(fraction_within(rg, tau), fraction_within(gr, tau));
  report.fscore = f.fscore;
  report.precision = f.precision;
  report.recall = f.recall;
  report.ncs = 0.5 * mean_abs_dot(nr, ng, rg) + 0.5 * mean_abs_dot(ng, nr, gr);
  if (model) report.nfs = nfs(*model, recon, gt, sub_seed(seed, "eval-nfs"));
  report.preset = label;
  report.seed = seed;
  return report;
}

MetricReport evaluate(const TriMesh& recon, const TriMesh& gt, const MetricPreset& preset, std::uint64_t seed,
                      const NfsModel* model) {
  preset.check();
  if (preset.samples == 0) throw ValidationError("preset needs an explicit sample count for mesh ground truth");
  const PointCloud r = sample_surface(recon, preset.samples, sub_seed(seed, "eval-recon"));
  const PointCloud g = sample_surface(gt, preset.samples, sub_seed(seed, "eval-gt"));
  return evaluate_clouds(r, g, preset.tau, preset.label, seed, model);
}

MetricReport evaluate(const TriMesh& recon, const PointCloud& gt, const MetricPreset& preset, std::uint64_t seed,
                      const NfsModel* model) {
  preset.check();
  if (gt.empty()) throw ValidationError("ground-truth cloud is empty");
  const Index n = preset.samples > 0 ? preset.samples : gt.size();
  const PointCloud r = sample_surface(recon, n, sub_seed(seed, "eval-recon"));
  PointCloud g = gt;
  const bool degraded = !gt.faces;
  if (degraded) {
    const Points normals = gt.normals ? *gt.normals : *estimate_normals(gt, std::min<Index>(40, gt.size())).normals;
    g.faces = FaceProvenance{std::vector<int>(gt.size(), -1), normals};
  }
  MetricReport report = evaluate_clouds(r, g, preset.tau, preset.label, seed, model);
  report.degraded_ncs = degraded;
  return report;
}

}  // namespace surfbench
