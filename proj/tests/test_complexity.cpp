#include "support.hpp"

#include "surfbench/complexity.hpp"
#include "surfbench/geometry.hpp"
#include "surfbench/primitives.hpp"

#include <doctest.h>

#include <numbers>

using namespace surfbench;

namespace {

double total_area(const TriMesh& m) {
  double a = 0.0;
  for (Index f = 0; f < m.face_count(); ++f)
    a += 0.5 * (m.corner(f, 1) - m.corner(f, 0)).cross(m.corner(f, 2) - m.corner(f, 0)).norm();
  return a;
}

TriMesh transformed(const TriMesh& m, const Matrix3d& r, const Vector3d& t, double s) {
  TriMesh out = m;
  for (Index i = 0; i < out.vertex_count(); ++i) out.vertices.row(i) = (s * (r * m.vertex(i)) + t).transpose();
  return out;
}

}  // namespace

TEST_CASE("spheres score one over radius squared") {
  for (double r : {0.5, 1.0, 2.0}) {
    const double score = complexity_score(primitives::icosphere(4, r));
    CHECK(score == doctest::Approx(1.0 / (r * r)).epsilon(0.05));
  }
  const auto field = vertex_curvatures(primitives::icosphere(4));
  for (Index v = 0; v < field.mean.size(); ++v) {
    CHECK(field.mean[v] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(field.gaussian[v] == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("flat grids score zero") {
  const auto plane = primitives::grid(20, 20, 1.0, 1.0);
  CHECK(std::abs(complexity_score(plane)) < 1e-6);
  CHECK(std::abs(complexity_score(plane, Weighting::area_weighted)) < 1e-6);
  const auto field = vertex_curvatures(plane);
  Index boundary = 0;
  for (char b : field.boundary) boundary += b;
  CHECK(boundary == 80);
}

TEST_CASE("cylinder mean curvature is one over twice the radius") {
  const auto cyl = primitives::cylinder(1.0, 2.0, 64, 16);
  const auto field = vertex_curvatures(cyl);
  for (Index v = 0; v < field.mean.size(); ++v) {
    if (field.boundary[v]) continue;
    CHECK(field.mean[v] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(std::abs(field.gaussian[v]) < 1e-6);
  }
  CHECK(complexity_score(cyl) == doctest::Approx(0.375).epsilon(0.05));
}

TEST_CASE("angle defects satisfy Gauss-Bonnet") {
  struct Case {
    TriMesh mesh;
    int chi;
  };
  const std::vector<Case> cases = {{primitives::icosphere(3), 2},
                                   {primitives::torus(1.0, 0.3, 30, 12), 0},
                                   {primitives::box(Vector3d(1, 2, 3), 3), 2},
                                   {primitives::merge(primitives::icosphere(2), primitives::icosphere(1, 0.2)), 4}};
  for (const auto& c : cases) {
    const auto field = vertex_curvatures(c.mesh);
    const double total = field.angle_defect.sum();
    CHECK(std::abs(total - 2 * std::numbers::pi * c.chi) <= 1e-6 * std::max(1, std::abs(c.chi)));
    CHECK(topology_report(c.mesh).euler_characteristic == c.chi);
    // Mixed areas tile the surface.
    CHECK(field.mixed_area.sum() == doctest::Approx(total_area(c.mesh)).epsilon(1e-10));
  }
}

TEST_CASE("score is rigid-invariant and scales as inverse length squared") {
  const auto mesh = primitives::torus(1.0, 0.4, 36, 18);
  const double base = complexity_score(mesh);
  const Matrix3d r = rotation_xyz(0.3, -1.1, 2.0);
  CHECK(complexity_score(transformed(mesh, r, Vector3d(3, -2, 1), 1.0)) == doctest::Approx(base).epsilon(1e-9));
  CHECK(complexity_score(transformed(mesh, r, Vector3d::Zero(), 2.5)) == doctest::Approx(base / 6.25).epsilon(0.01));
  CHECK(complexity_score(primitives::icosphere(4, 0.5)) > complexity_score(primitives::icosphere(4, 1.0)));
}

TEST_CASE("orientation does not change curvature magnitudes") {
  const auto mesh = primitives::icosphere(3);
  const auto a = vertex_curvatures(mesh);
  const auto b = vertex_curvatures(primitives::flipped(mesh));
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.gaussian - b.gaussian).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("invalid meshes are rejected") {
  TriMesh fin;
  fin.vertices.resize(5, 3);
  fin.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1;
  fin.faces.resize(3, 3);
  fin.faces << 0, 1, 2, 1, 0, 3, 0, 1, 4;
  CHECK_THROWS_AS(vertex_curvatures(fin), ValidationError);

  // Two tetrahedra touching at one vertex.
  TriMesh bow;
  bow.vertices.resize(7, 3);
  bow.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, -1, 0, 0, 0, -1, 0, 0, 0, -1;
  bow.faces.resize(8, 3);
  bow.faces << 0, 2, 1, 0, 1, 3, 0, 3, 2, 1, 2, 3, 0, 4, 5, 0, 6, 4, 0, 5, 6, 4, 6, 5;
  CHECK_THROWS_AS(vertex_curvatures(bow), ValidationError);

  TriMesh flat;
  flat.vertices.resize(4, 3);
  flat.vertices << 0, 0, 0, 1, 0, 0, 2, 0, 0, 0, 1, 0;
  flat.faces.resize(2, 3);
  flat.faces << 0, 1, 2, 0, 3, 1;
  CHECK_THROWS_AS(vertex_curvatures(flat), ValidationError);
  CHECK_THROWS_AS(complexity_score(TriMesh{}), ValidationError);
}

TEST_CASE("corpus partition ratios") {
  std::vector<double> scores(100);
  Rng rng(3);
  for (double& s : scores) s = rng.uniform();
  const auto p = partition_corpus(scores);
  CHECK(p.low.size() == 60);
  CHECK(p.middle.size() == 30);
  CHECK(p.high.size() == 10);
  double max_low = 0, min_mid = 1e9, max_mid = 0, min_high = 1e9;
  for (Index i : p.low) max_low = std::max(max_low, scores[i]);
  for (Index i : p.middle) {
    min_mid = std::min(min_mid, scores[i]);
    max_mid = std::max(max_mid, scores[i]);
  }
  for (Index i : p.high) min_high = std::min(min_high, scores[i]);
  CHECK(max_low <= min_mid);
  CHECK(max_mid <= min_high);

  // Any strictly increasing transform yields the same groups.
  std::vector<double> warped(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) warped[i] = std::exp(5 * scores[i]) - 3;
  const auto q = partition_corpus(warped);
  CHECK(q.low == p.low);
  CHECK(q.middle == p.middle);
  CHECK(q.high == p.high);

  const std::vector<double> ten = {9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
  const auto t = partition_corpus(ten);
  CHECK(t.low.size() == 6);
  CHECK(t.middle.size() == 3);
  CHECK(t.high == std::vector<Index>{0});

  const std::vector<double> nine(9, 1.0);
  CHECK_THROWS_AS(partition_corpus(nine), ValidationError);
}

TEST_CASE("ties break on input order") {
  const std::vector<double> flat(20, 0.5);
  const auto p = partition_corpus(flat);
  CHECK(p.high == std::vector<Index>{18, 19});
  CHECK(p.middle == std::vector<Index>{12, 13, 14, 15, 16, 17});
  CHECK(p.low.size() == 12);
  std::vector<double> odd(15);
  for (std::size_t i = 0; i < odd.size(); ++i) odd[i] = static_cast<double>(i);
  const auto o = partition_corpus(odd);
  CHECK(o.low.size() + o.middle.size() + o.high.size() == 15);
}
