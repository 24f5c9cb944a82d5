#include "metric_oracle.hpp"

#include "surfbench/geometry.hpp"
#include "surfbench/metrics.hpp"
#include "surfbench/primitives.hpp"

#include <doctest.h>

using namespace surfbench;

namespace {

PointCloud cloud_of(std::initializer_list<Vector3d> pts) {
  Points p(static_cast<Index>(pts.size()), 3);
  Index i = 0;
  for (const auto& x : pts) p.row(i++) = x.transpose();
  return PointCloud(std::move(p));
}

}  // namespace

TEST_CASE("hand-computed two-point example") {
  const auto p = cloud_of({Vector3d(0, 0, 0)});
  const auto q = cloud_of({Vector3d(0, 0, 0), Vector3d(1, 0, 0)});
  CHECK(chamfer(p, q) == doctest::Approx(0.25).epsilon(1e-12));
  const auto f = fscore(p, q, 0.5);
  CHECK(f.precision == 1.0);
  CHECK(f.recall == 0.5);
  CHECK(f.fscore == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
  // The threshold is strict.
  CHECK(fscore(p, q, 1.0).recall == 0.5);
  CHECK(fscore(p, q, 1.0 + 1e-12).recall == 1.0);
  const auto far = cloud_of({Vector3d(10, 0, 0)});
  CHECK(fscore(p, far, 0.5).fscore == 0.0);
}

TEST_CASE("identical clouds") {
  auto p = test::cloud_with_normals(300, 1);
  CHECK(chamfer(p, p) == 0.0);
  CHECK(fscore(p, p, 1e-9).fscore == 100.0);
  CHECK(ncs(p, p) == doctest::Approx(1.0).epsilon(1e-12));
  auto flipped = p;
  flipped.faces->normal = -p.faces->normal;
  CHECK(ncs(p, flipped) == doctest::Approx(1.0).epsilon(1e-12));
  auto orth = p;
  orth.faces->normal.setZero();
  orth.faces->normal.col(0).setOnes();
  p.faces->normal.setZero();
  p.faces->normal.col(2).setOnes();
  CHECK(ncs(p, orth) == 0.0);
}

TEST_CASE("metrics equal brute-force references exactly") {
  Rng rng(5);
  for (int t = 0; t < 60; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(500));
    const Index m = 1 + static_cast<Index>(rng.below(500));
    const auto p = test::cloud_with_normals(n, 100 + t);
    const auto q = test::cloud_with_normals(m, 300 + t, 1.3);
    CHECK(chamfer(p, q) == test::brute_chamfer(p, q));
    const double tau = rng.uniform(0.01, 0.3);
    const auto f = fscore(p, q, tau);
    CHECK(f.precision == test::brute_fraction(p.positions, q.positions, tau));
    CHECK(f.recall == test::brute_fraction(q.positions, p.positions, tau));
    CHECK(f.fscore == test::brute_fscore(f.precision, f.recall));
    CHECK(ncs(p, q) == test::brute_ncs(p, q));
  }
}

TEST_CASE("symmetry, invariance and monotonicity") {
  const auto p = test::cloud_with_normals(400, 7);
  const auto q = test::cloud_with_normals(350, 9);
  CHECK(chamfer(p, q) == chamfer(q, p));
  CHECK(ncs(p, q) == ncs(q, p));
  const auto f = fscore(p, q, 0.1);
  const auto g = fscore(q, p, 0.1);
  CHECK(f.precision == g.recall);
  CHECK(f.recall == g.precision);
  CHECK(f.fscore == doctest::Approx(g.fscore).epsilon(1e-15));

  const Matrix3d r = rotation_xyz(0.4, 1.2, -0.7);
  const Vector3d t(0.3, -0.2, 0.5);
  auto move = [&](const PointCloud& c) {
    PointCloud out = c;
    for (Index i = 0; i < c.size(); ++i) out.positions.row(i) = (r * c.point(i) + t).transpose();
    return out;
  };
  CHECK(std::abs(chamfer(move(p), move(q)) - chamfer(p, q)) < 1e-12);

  double last = -1.0;
  for (double tau = 0.005; tau < 0.5; tau *= 1.3) {
    const double v = fscore(p, q, tau).fscore;
    CHECK(v >= last);
    last = v;
  }
  CHECK(chamfer(p, q, Norm::l1) >= chamfer(p, q));
  CHECK(chamfer(p, q, Norm::linf) <= chamfer(p, q));
}

TEST_CASE("metric input errors") {
  const PointCloud empty;
  const auto p = test::cloud_with_normals(10, 1);
  CHECK_THROWS_AS(chamfer(empty, p), ValidationError);
  CHECK_THROWS_AS(fscore(p, p, 0.0), ValidationError);
  CHECK_THROWS_AS(ncs(p, PointCloud(p.positions)), ValidationError);
  CHECK_THROWS_AS(MetricPreset::named("indoor"), ValidationError);
}

TEST_CASE("metric presets") {
  CHECK(MetricPreset::object().samples == 200000);
  CHECK(MetricPreset::object().tau == 0.005);
  CHECK(MetricPreset::scene().samples == 1500000);
  CHECK(MetricPreset::scene().tau == 0.03);
  CHECK(MetricPreset::real().tau == 0.5);
  CHECK(MetricPreset::named("scene").label == "scene");
}

TEST_CASE("a mesh evaluated against itself") {
  const auto mesh = primitives::icosphere(4, 0.5);
  const auto preset = MetricPreset::object();
  const auto report = evaluate(mesh, mesh, preset, 3);
  // Mean nearest-neighbour spacing of the ground-truth sample.
  const auto gt = sample_surface(mesh, preset.samples, 1);
  const KdTree tree(gt.positions);
  double spacing = 0.0;
  for (Index i = 0; i < gt.size(); i += 50) spacing += tree.knn(gt.point(i), 2)[1].distance;
  spacing /= static_cast<double>((gt.size() + 49) / 50);
  CHECK(report.cd < 2 * spacing);
  CHECK(report.fscore > 99.0);
  CHECK(report.ncs > 0.99);
  CHECK_FALSE(report.nfs);
  CHECK(report.preset == "object");
  CHECK(evaluate(mesh, mesh, preset, 3) == report);
  CHECK_FALSE(evaluate(mesh, mesh, preset, 4) == report);
}

TEST_CASE("cloud ground truth degrades normal consistency") {
  const auto mesh = primitives::icosphere(3, 0.5);
  MetricPreset preset = MetricPreset::object();
  preset.samples = 20000;
  PointCloud gt(sample_surface(mesh, 20000, 9).positions);
  const auto report = evaluate(mesh, gt, preset, 1);
  CHECK(report.degraded_ncs);
  CHECK(report.ncs > 0.95);
  CHECK(evaluate(mesh, mesh, preset, 1).degraded_ncs == false);
}
