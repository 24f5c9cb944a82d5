#include "support.hpp"

#include "surfbench/cloud_ops.hpp"
#include "surfbench/geometry.hpp"
#include "surfbench/mesh.hpp"
#include "surfbench/primitives.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace surfbench;

namespace {

// Quadratic greedy farthest-point reference.
std::vector<Index> naive_fps(const Points& p, Index n, FpsSeed policy) {
  Index first = 0;
  if (policy == FpsSeed::farthest_from_centroid) {
    const Vector3d c = p.colwise().mean().transpose();
    double best = -1.0;
    for (Index i = 0; i < p.rows(); ++i) {
      const double d = dist2(p.row(i).data(), c.data());
      if (d > best) {
        best = d;
        first = i;
      }
    }
  }
  std::vector<double> dmin(p.rows(), std::numeric_limits<double>::infinity());
  std::vector<Index> out = {first};
  while (static_cast<Index>(out.size()) < n) {
    const Index last = out.back();
    for (Index i = 0; i < p.rows(); ++i) dmin[i] = std::min(dmin[i], dist2(p.row(i).data(), p.row(last).data()));
    for (Index s : out) dmin[s] = -1.0;
    Index best = 0;
    for (Index i = 1; i < p.rows(); ++i)
      if (dmin[i] > dmin[best]) best = i;
    out.push_back(best);
  }
  return out;
}

double min_pairwise(const Points& p, const std::vector<Index>& idx) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      best = std::min(best, dist2(p.row(idx[a]).data(), p.row(idx[b]).data()));
  return std::sqrt(best);
}

}  // namespace

TEST_CASE("kd-tree knn equals exhaustive search") {
  for (Index n : {1, 7, 100, 500, 2000}) {
    const auto cloud = test::random_cloud(n, 100 + n);
    const KdTree tree(cloud.positions, 4);
    const auto queries = test::random_cloud(50, 7 + n, 1.2);
    for (Index q = 0; q < queries.size(); ++q)
      for (Index k : {Index{1}, std::min<Index>(10, n), n}) {
        const auto got = tree.knn(queries.point(q), k);
        const auto want = test::brute_knn(cloud.positions, queries.point(q), k);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          CHECK(got[i].index == want[i].index);
          CHECK(got[i].distance == want[i].distance);
        }
      }
  }
}

TEST_CASE("kd-tree on a lattice with many ties") {
  Points p(1000, 3);
  for (int i = 0; i < 1000; ++i) p.row(i) << i % 10, (i / 10) % 10, i / 100;
  const KdTree tree(p);
  for (int q = 0; q < 1000; q += 37) {
    const Vector3d query = row3(p, q) + Vector3d(0.5, 0.5, 0.5);
    const auto got = tree.knn(query, 12);
    const auto want = test::brute_knn(p, query, 12);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
  }
  // Exact hit, then equidistant candidates ordered by index.
  const auto self = tree.knn(row3(p, 555), 1);
  CHECK(self[0].index == 555);
  CHECK(self[0].distance == 0.0);
  Points two(2, 3);
  two << 1, 0, 0, -1, 0, 0;
  CHECK(KdTree(two).nearest(Vector3d::Zero()).index == 0);
  CHECK_THROWS_AS(KdTree(two).knn(Vector3d::Zero(), 3), ValidationError);
}

TEST_CASE("kd-tree radius search and other norms") {
  const auto cloud = test::random_cloud(800, 3);
  const KdTree tree(cloud.positions);
  const Vector3d q(0.1, -0.2, 0.3);
  const auto found = tree.radius_search(q, 0.35);
  std::vector<Index> want;
  for (Index i = 0; i < cloud.size(); ++i)
    if ((cloud.point(i) - q).norm() <= 0.35) want.push_back(i);
  std::set<Index> got;
  for (const auto& n : found) got.insert(n.index);
  CHECK(got == std::set<Index>(want.begin(), want.end()));
  CHECK(std::is_sorted(found.begin(), found.end()));

  for (Norm norm : {Norm::l1, Norm::linf}) {
    const auto nn = tree.knn(q, 5, norm);
    std::vector<Neighbor> all;
    for (Index i = 0; i < cloud.size(); ++i) all.push_back({i, distance(cloud.positions.row(i).data(), q.data(), norm)});
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 5; ++i) CHECK(nn[i] == all[i]);
  }
}

TEST_CASE("FPS hand example on a line") {
  Points p(4, 3);
  p << 0, 0, 0, 1, 0, 0, 3, 0, 0, 7, 0, 0;
  const auto idx = fps_indices(p, 3);
  REQUIRE(idx.size() == 3);
  CHECK(p(idx[0], 0) == 7.0);
  CHECK(p(idx[1], 0) == 0.0);
  CHECK(p(idx[2], 0) == 3.0);
  CHECK(fps_indices(p, 2, FpsSeed::first_index) == std::vector<Index>{0, 3});
}

TEST_CASE("tree FPS equals the quadratic reference") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto cloud = test::random_cloud(700, 40 + s);
    for (auto policy : {FpsSeed::farthest_from_centroid, FpsSeed::first_index})
      CHECK(fps_indices(cloud.positions, 150, policy) == naive_fps(cloud.positions, 150, policy));
  }
  // Duplicates and lattice ties.
  Points lattice(343 * 2, 3);
  for (int i = 0; i < 343 * 2; ++i) lattice.row(i) << (i % 343) % 7, ((i % 343) / 7) % 7, (i % 343) / 49;
  CHECK(fps_indices(lattice, 343) == naive_fps(lattice, 343, FpsSeed::farthest_from_centroid));
  const auto all = fps_indices(lattice, lattice.rows());
  CHECK(std::set<Index>(all.begin(), all.end()).size() == all.size());
}

TEST_CASE("FPS of the whole cloud is a permutation") {
  const auto cloud = test::random_cloud(300, 8);
  auto idx = fps_indices(cloud.positions, 300);
  std::sort(idx.begin(), idx.end());
  std::vector<Index> iota(300);
  std::iota(iota.begin(), iota.end(), Index{0});
  CHECK(idx == iota);
  CHECK_THROWS_AS(fps_indices(cloud.positions, 301), ValidationError);
  CHECK_THROWS_AS(fps_indices(cloud.positions, 0), ValidationError);
}

TEST_CASE("FPS set does not depend on input order") {
  const auto cloud = test::random_cloud(400, 12);
  std::vector<Index> perm(400);
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(3);
  for (Index i = 399; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  const auto shuffled = subset(cloud, perm);
  const auto a = fps(cloud, 60);
  const auto b = fps(shuffled, 60);
  std::set<std::array<double, 3>> sa, sb;
  for (Index i = 0; i < 60; ++i) {
    sa.insert({a.positions(i, 0), a.positions(i, 1), a.positions(i, 2)});
    sb.insert({b.positions(i, 0), b.positions(i, 1), b.positions(i, 2)});
  }
  CHECK(sa == sb);
}

TEST_CASE("FPS spreads points better than random sampling") {
  int wins = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto cloud = test::random_cloud(500, 1000 + t);
    const double f = min_pairwise(cloud.positions, fps_indices(cloud.positions, 50));
    const double r = min_pairwise(cloud.positions, random_indices(500, 50, 2000 + t));
    wins += f >= r;
  }
  CHECK(wins >= 95);
}

TEST_CASE("random sampling") {
  CHECK(random_sample(test::random_cloud(10, 1), 0, 5).empty());
  CHECK(random_indices(1000, 100, 7) == random_indices(1000, 100, 7));
  CHECK(random_indices(1000, 100, 7) != random_indices(1000, 100, 8));
  const auto idx = random_indices(50, 50, 3);
  CHECK(std::set<Index>(idx.begin(), idx.end()).size() == 50);
  for (Index i : idx) CHECK((i >= 0 && i < 50));
  CHECK_THROWS_AS(random_indices(5, 6, 1), ValidationError);
}

TEST_CASE("PCA normals on a plane") {
  Rng rng(4);
  Points p(200, 3);
  for (Index i = 0; i < 200; ++i) p.row(i) << rng.uniform(), rng.uniform(), 0.0;
  const auto c = estimate_normals(PointCloud(p), 40);
  REQUIRE(c.normals);
  for (Index i = 0; i < 200; ++i) {
    CHECK(std::abs(std::abs((*c.normals)(i, 2)) - 1.0) < 1e-9);
    CHECK(std::abs(row3(*c.normals, i).norm() - 1.0) < 1e-6);
  }
  std::vector<Index> bad;
  Points line(50, 3);
  for (Index i = 0; i < 50; ++i) line.row(i) << i, 0, 0;
  estimate_normals(PointCloud(line), 10, &bad);
  CHECK(bad.size() == 50);
  CHECK_THROWS_AS(estimate_normals(PointCloud(p), 200), ValidationError);
}

TEST_CASE("PCA normals on a dense sphere sample are radial") {
  const auto cloud = sample_surface(primitives::icosphere(5), 80000, 2);
  const auto c = estimate_normals(cloud, 40);
  Index good = 0;
  const double cos5 = std::cos(deg2rad(5.0));
  for (Index i = 0; i < c.size(); ++i) good += std::abs(row3(*c.normals, i).dot(c.point(i).normalized())) >= cos5;
  CHECK(static_cast<double>(good) / c.size() >= 0.99);
}

TEST_CASE("PCA normals rotate with the cloud") {
  const auto cloud = sample_surface(primitives::torus(1.0, 0.4, 32, 16), 3000, 6);
  const Matrix3d r = rotation_xyz(0.3, -1.1, 2.0);
  PointCloud rotated = cloud;
  rotated.positions = cloud.positions * r.transpose();
  const auto a = estimate_normals(cloud, 20);
  const auto b = estimate_normals(rotated, 20);
  for (Index i = 0; i < cloud.size(); ++i) {
    const Vector3d na = r * row3(*a.normals, i);
    const Vector3d nb = row3(*b.normals, i);
    CHECK(std::min((na - nb).norm(), (na + nb).norm()) < 1e-6);
  }
}

TEST_CASE("normals are oriented toward the capturing camera") {
  Points p(1, 3);
  p << 0, 0, 1;
  for (double s : {1.0, -1.0}) {
    PointCloud c(p);
    c.normals = Points(1, 3);
    c.normals->row(0) << 0, 0, s;
    c.view_index = std::vector<std::uint32_t>{0};
    const auto o = orient_normals(c, {Vector3d(0, 0, 5)});
    CHECK((*o.normals)(0, 2) == 1.0);
  }
  PointCloud c(p);
  c.normals = Points(1, 3);
  c.normals->row(0) << 0, 0, -1;
  c.view_index = std::vector<std::uint32_t>{0};
  std::vector<Index> failed;
  const auto o = orient_normals(c, {Vector3d(0, 0, 1)}, &failed);
  CHECK(failed == std::vector<Index>{0});
  CHECK_THROWS_AS(orient_normals(c, {Vector3d(0, 0, 1)}), ValidationError);
}
