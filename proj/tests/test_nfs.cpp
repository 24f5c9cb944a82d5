#include "gradcheck.hpp"
#include "support.hpp"

#include "surfbench/geometry.hpp"
#include "surfbench/mesh.hpp"
#include "surfbench/primitives.hpp"

#include <doctest.h>

#include <fstream>

using namespace surfbench;

namespace {

Patch random_patch(Index m, std::uint64_t seed) {
  return {canonicalize_patch(test::random_cloud(m, seed).positions), Vector3d::Zero(), 0};
}

PatchParams small_patches() {
  PatchParams p;
  p.points_per_patch = 32;
  p.patch_count = 12;
  p.radius_fraction = 0.25;
  return p;
}

double third_moment(const PointsT<double>& p, int axis) { return p.col(axis).array().cube().sum(); }

}  // namespace

TEST_CASE("canonical patches are centered, unit-radius and sign-fixed") {
  Rng rng(1);
  Points raw(200, 3);
  for (Index i = 0; i < raw.rows(); ++i) raw.row(i) << rng.uniform(-3, 3), rng.uniform(-1, 1), rng.normal() * 0.2;
  const auto p = canonicalize_patch(raw);
  CHECK(p.colwise().mean().norm() < 1e-9);
  CHECK(p.rowwise().norm().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix3d cov = p.transpose() * p;
  CHECK(std::abs(cov(0, 1)) < 1e-9);
  CHECK(std::abs(cov(0, 2)) < 1e-9);
  CHECK(std::abs(cov(1, 2)) < 1e-9);
  CHECK(cov(0, 0) >= cov(1, 1));
  CHECK(cov(1, 1) >= cov(2, 2));
  for (int a = 0; a < 3; ++a) CHECK(third_moment(p, a) >= -1e-12);
  for (Index i = 1; i < p.rows(); ++i)
    CHECK(std::lexicographical_compare(p.row(i - 1).data(), p.row(i - 1).data() + 3, p.row(i).data(),
                                       p.row(i).data() + 3) == true);

  // Rigid motion, uniform scale, and point order do not matter.
  Points moved(raw.rows(), 3);
  const Matrix3d r = rotation_xyz(0.7, -0.3, 1.9);
  for (Index i = 0; i < raw.rows(); ++i) moved.row(raw.rows() - 1 - i) = (3.5 * (r * row3(raw, i)) + Vector3d(4, 5, 6)).transpose();
  CHECK((canonicalize_patch(moved) - p).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(canonicalize_patch(raw.topRows(2)), ValidationError);
}

TEST_CASE("patch extraction is deterministic and frame-invariant") {
  const auto cloud = sample_surface(primitives::icosphere(3), 20000, 3);
  const PointCloud plain(cloud.positions);
  std::vector<Index> skipped;
  const auto a = extract_patches(plain, small_patches(), 7, &skipped);
  CHECK(a.size() + skipped.size() == 12);
  CHECK(a.size() == 12);
  const auto again = extract_patches(plain, small_patches(), 7);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(again[i].points == a[i].points);

  PointCloud scaled(Points(2.0 * plain.positions));
  const auto s = extract_patches(scaled, small_patches(), 7);
  REQUIRE(s.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(s[i].points == a[i].points);

  PointCloud shifted(Points(plain.positions.rowwise() + Eigen::RowVector3d(0.3, -1.7, 2.2)));
  const auto t = extract_patches(shifted, small_patches(), 7);
  REQUIRE(t.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((t[i].points - a[i].points).cwiseAbs().maxCoeff() < 1e-9);

  PatchParams dense = small_patches();
  dense.points_per_patch = 5000;
  std::vector<Index> none;
  CHECK(extract_patches(plain, dense, 7, &none).empty());
  CHECK(none.size() == 12);
}

TEST_CASE("network shapes and forward determinism") {
  const Mlp net = Mlp::init(3 * 256, 256, 6, 1);
  CHECK(net.layer_count() == 6);
  CHECK(net.input_dim() == 768);
  CHECK(net.output_dim() == 256);
  CHECK(net.parameter_count() == 768 * 256 + 256 + 5 * (256 * 256 + 256));
  const auto patch = random_patch(256, 2);
  const auto f = feature(net, patch);
  CHECK(f.size() == 256);
  CHECK(feature(net, patch) == f);
  Mlp zero = net;
  for (auto& w : zero.weights) w.setZero();
  for (auto& b : zero.biases) b.setZero();
  CHECK_THROWS_AS(feature(zero, patch), ValidationError);
}

TEST_CASE("LeakyReLU is applied to every layer but the last") {
  Mlp net = Mlp::init(2, 2, 2, 3, 0.01);
  net.weights[0] = Eigen::MatrixXd::Identity(2, 2);
  net.biases[0].setZero();
  net.weights[1] = Eigen::MatrixXd::Identity(2, 2);
  net.biases[1] << 0.0, -5.0;
  Eigen::MatrixXd x(2, 1);
  x << -1.0, 2.0;
  const auto y = net.forward(x);
  CHECK(y(0, 0) == doctest::Approx(-0.01));
  CHECK(y(1, 0) == doctest::Approx(-3.0));
}

TEST_CASE("analytic gradient matches central differences") {
  const Index m = 8;
  std::vector<Patch> patches = {random_patch(m, 10), random_patch(m, 11)};
  const auto x = patch_matrix(patches);
  for (bool same : {true, false}) {
    const Mlp small = Mlp::init(3 * m, 12, 6, 5);
    const std::vector<PatchPair> pairs = {{0, 1, same}};
    const auto r = test::gradient_check(small, x, pairs, 1e-4, small.parameter_count(), 0);
    CHECK(r.checked == small.parameter_count());
    CHECK(r.max_abs_gradient > 0.0);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("contrastive loss values") {
  Eigen::MatrixXd f(2, 3);
  f << 1, 1, 0, 0, 0, 1;
  // cos(f0, f1) = 1, cos(f0, f2) = 0.
  CHECK(contrastive_loss(f, {{0, 1, true}}) == doctest::Approx(0.0));
  CHECK(contrastive_loss(f, {{0, 2, true}}) == doctest::Approx(1.0));
  CHECK(contrastive_loss(f, {{0, 2, false}}) == doctest::Approx(0.0));
  CHECK(contrastive_loss(f, {{0, 1, false}, {0, 2, true}}) == doctest::Approx(2.0));
  Eigen::MatrixXd g;
  contrastive_loss(f, {{0, 2, false}}, &g);
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);  // subgradient zero at the kink
}

TEST_CASE("Adam update rules") {
  Mlp net = Mlp::init(4, 3, 2, 9);
  const Mlp start = net;
  Adam adam(net);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  for (const auto& w : net.weights) gw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : net.biases) gb.push_back(Eigen::VectorXd::Zero(b.size()));
  adam.step(net, gw, gb, 1e-3);
  for (int l = 0; l < net.layer_count(); ++l) CHECK(net.weights[l] == start.weights[l]);

  for (auto& w : gw) w.setConstant(0.37);
  for (auto& b : gb) b.setConstant(-2.0);
  Mlp before = net;
  for (int i = 0; i < 1000; ++i) {
    before = net;
    adam.step(net, gw, gb, 1e-3);
  }
  CHECK(adam.steps() == 1001);
  const double dw = std::abs(net.weights[0](0, 0) - before.weights[0](0, 0));
  const double db = std::abs(net.biases[0](0) - before.biases[0](0));
  CHECK(dw == doctest::Approx(1e-3).epsilon(0.01));
  CHECK(db == doctest::Approx(1e-3).epsilon(0.01));
  CHECK(net.weights[0](0, 0) < before.weights[0](0, 0));
  CHECK(net.biases[0](0) > before.biases[0](0));
}

TEST_CASE("learning-rate schedule halves every 200 epochs") {
  TrainConfig cfg;
  CHECK(cfg.epochs == 1000);
  CHECK(cfg.layers == 6);
  CHECK(cfg.width == 256);
  CHECK(cfg.adam.beta1 == 0.9);
  CHECK(cfg.adam.beta2 == 0.999);
  CHECK(cfg.adam.epsilon == 1e-8);
  CHECK(learning_rate(cfg, 0) == 1e-4);
  CHECK(learning_rate(cfg, 199) == 1e-4);
  CHECK(learning_rate(cfg, 200) == 5e-5);
  CHECK(learning_rate(cfg, 400) == 2.5e-5);
  CHECK(learning_rate(cfg, 600) == 1.25e-5);
  CHECK(learning_rate(cfg, 999) == 6.25e-6);
}

TEST_CASE("training on resamplings of one sphere lowers the loss") {
  const auto mesh = primitives::icosphere(3);
  std::vector<TrainingCloud> corpus;
  for (int r = 0; r < 2; ++r) corpus.push_back({0, PointCloud(sample_surface(mesh, 20000, 40 + r).positions)});
  TrainConfig cfg;
  cfg.patches = small_patches();
  cfg.width = 32;
  cfg.epochs = 300;
  cfg.learning_rate = 1e-3;
  cfg.seed = 4;
  const auto result = train_nfs(corpus, cfg);
  REQUIRE(result.loss.size() == 300);
  std::vector<double> avg;
  for (std::size_t i = 50; i <= result.loss.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = i - 50; j < i; ++j) s += result.loss[j];
    avg.push_back(s / 50.0);
  }
  for (std::size_t i = 1; i < avg.size(); ++i) CHECK(avg[i] <= avg[i - 1]);
  CHECK(avg.back() < avg.front());

  const auto again = train_nfs(corpus, cfg);
  CHECK(again.loss == result.loss);
  CHECK(again.model.net.weights.back() == result.model.net.weights.back());
}

TEST_CASE("similarity is symmetric, bounded and one on identical input") {
  const auto sphere = PointCloud(sample_surface(primitives::icosphere(3), 20000, 1).positions);
  const auto cube = PointCloud(sample_surface(primitives::box(Vector3d(1.4, 1.4, 1.4), 3), 20000, 2).positions);
  NfsModel model{Mlp::init(3 * 32, 32, 6, 3), small_patches()};
  CHECK(nfs(model, sphere, sphere, 5) == doctest::Approx(1.0).epsilon(1e-6));
  const double pq = nfs(model, sphere, cube, 5);
  CHECK(pq == nfs(model, cube, sphere, 5));
  CHECK((pq >= -1.0 && pq <= 1.0));
}

TEST_CASE("model checkpoints round-trip exactly") {
  const auto dir = test::scratch_dir("nfs_model");
  NfsModel model{Mlp::init(3 * 32, 16, 6, 8, 0.02), small_patches()};
  write_model(dir / "m.bin", model);
  const auto back = read_model(dir / "m.bin");
  CHECK(back.net.slope == 0.02);
  CHECK(back.patches.points_per_patch == 32);
  CHECK(back.patches.patch_count == 12);
  CHECK(back.patches.radius_fraction == 0.25);
  REQUIRE(back.net.layer_count() == 6);
  for (int l = 0; l < 6; ++l) {
    CHECK(back.net.weights[l] == model.net.weights[l]);
    CHECK(back.net.biases[l] == model.net.biases[l]);
  }
  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "not a model";
  }
  CHECK_THROWS_AS(read_model(dir / "bad.bin"), IoError);
  CHECK_THROWS_AS(read_model(dir / "missing.bin"), IoError);
  // Truncation is detected.
  std::filesystem::resize_file(dir / "m.bin", std::filesystem::file_size(dir / "m.bin") - 8);
  CHECK_THROWS_AS(read_model(dir / "m.bin"), IoError);
}

TEST_CASE("training input errors") {
  TrainConfig cfg;
  cfg.patches = small_patches();
  CHECK_THROWS_AS(train_nfs({}, cfg), ValidationError);
  const PointCloud single(test::random_cloud(5000, 3).positions);
  // A lone cloud has neither positive nor negative pairs.
  CHECK_THROWS_AS(train_nfs({{0, single}}, cfg), ValidationError);
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.check(), ValidationError);
}
