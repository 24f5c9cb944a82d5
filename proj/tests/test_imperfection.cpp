#include "support.hpp"

#include "surfbench/geometry.hpp"
#include "surfbench/imperfection.hpp"
#include "surfbench/primitives.hpp"
#include "surfbench/scanner.hpp"

#include <doctest.h>

#include <numbers>
#include <set>

using namespace surfbench;

TEST_CASE("object severity table") {
  const Severity levels[] = {Severity::low, Severity::middle, Severity::high};
  const double sigma[] = {0.001, 0.003, 0.006};
  const double ratio[] = {0.001, 0.003, 0.006};
  const double rot[] = {0.5, 1.0, 2.0};
  const double trans[] = {0.005, 0.01, 0.02};
  const std::vector<double> bands[] = {{20, 40, 60}, {20, 40}, {20}};
  for (int l = 0; l < 3; ++l) {
    CHECK(severity_preset(Challenge::noise, levels[l], Mode::object).noise_sigma == sigma[l]);
    const auto out = severity_preset(Challenge::outliers, levels[l], Mode::object);
    CHECK(out.outlier_ratio == ratio[l]);
    CHECK(out.outlier_min == 0.01);
    CHECK(out.outlier_max == 0.1);
    const auto mis = severity_preset(Challenge::misalignment, levels[l], Mode::object);
    CHECK(mis.rotation_min_deg == -rot[l]);
    CHECK(mis.rotation_max_deg == rot[l]);
    CHECK(mis.translation_min == -trans[l]);
    CHECK(mis.translation_max == trans[l]);
    const auto miss = severity_preset(Challenge::missing, levels[l], Mode::object);
    CHECK(miss.bands_deg == bands[l]);
    CHECK(miss.band_halfwidth_deg == 3.0);
    CHECK(severity_preset(Challenge::nonuniform, levels[l], Mode::object).sampling == Sampling::rs);
  }
  CHECK(severity_preset(Challenge::noise, Severity::low, Mode::object).sampling == Sampling::fps);
}

TEST_CASE("scene severity table") {
  CHECK(severity_preset(Challenge::noise, Severity::high, Mode::scene).noise_sigma == 0.005);
  const auto out = severity_preset(Challenge::outliers, Severity::low, Mode::scene);
  CHECK(out.outlier_ratio == 0.004);
  CHECK(out.outlier_min == 0.01);
  CHECK(out.outlier_max == 0.1);
  const auto mis = severity_preset(Challenge::misalignment, Severity::middle, Mode::scene);
  CHECK(mis.rotation_max_deg == 1.5);
  CHECK(mis.translation_max == 0.015);
  CHECK_THROWS_AS(severity_preset(Challenge::missing, Severity::middle, Mode::scene), ValidationError);
  CHECK_THROWS_AS(severity_preset(Challenge::nonuniform, Severity::middle, Mode::scene), ValidationError);
}

TEST_CASE("preset keys") {
  const auto k = parse_preset_key("noise:middle");
  CHECK(k.kind == Challenge::noise);
  CHECK(k.level == Severity::middle);
  CHECK(severity_preset(k).noise_sigma == 0.003);
  CHECK(parse_preset_key("outliers:scene").mode == Mode::scene);
  CHECK(parse_preset_key("nonuniform").kind == Challenge::nonuniform);
  for (const char* s : {"noise:low", "missing:high", "misalignment:scene"})
    CHECK(to_string(parse_preset_key(s)) == s);
  CHECK_THROWS_AS(parse_preset_key("blur:low"), ValidationError);
  CHECK_THROWS_AS(parse_preset_key("noise:extreme"), ValidationError);
  CHECK(parse_mode("scene") == Mode::scene);
  CHECK(parse_sampling("rs") == Sampling::rs);
}

TEST_CASE("spec range checks") {
  ImperfectionSpec s;
  s.outlier_min = 0.2;
  CHECK_THROWS_AS(s.check(), ValidationError);
  s = {};
  s.rotation_min_deg = 1;
  CHECK_THROWS_AS(s.check(), ValidationError);
  s = {};
  s.bands_deg = {179};
  CHECK_THROWS_AS(s.check(), ValidationError);
  s = {};
  s.noise_sigma = -1;
  CHECK_THROWS_AS(s.check(), ValidationError);
}

TEST_CASE("noise is bounded, centered, and has the truncated-normal spread") {
  const PointCloud cloud(test::random_cloud(50000, 3));
  const double sigma = 0.003;
  const auto noisy = add_noise(cloud, sigma, 11);
  const Points d = noisy.positions - cloud.positions;
  CHECK(d.cwiseAbs().maxCoeff() <= 2 * sigma + 1e-15);
  const double n = static_cast<double>(d.size());
  const double mean = d.sum() / n;
  const double sd = std::sqrt((d.array() - mean).square().sum() / n);
  // Standard deviation of N(0,1) truncated at +-2.
  const double phi2 = std::exp(-2.0) / std::sqrt(2 * std::numbers::pi);
  const double mass = std::erf(2.0 / std::sqrt(2.0));
  const double expected = sigma * std::sqrt(1.0 - 4.0 * phi2 / mass);
  CHECK(std::abs(mean) < 5 * expected / std::sqrt(n));
  CHECK(sd == doctest::Approx(expected).epsilon(0.01));
  CHECK(add_noise(cloud, 0.0, 1).positions == cloud.positions);
  CHECK(add_noise(cloud, sigma, 11).positions == noisy.positions);
  CHECK(add_noise(cloud, sigma, 12).positions != noisy.positions);
  CHECK_THROWS_AS(add_noise(cloud, -1.0, 1), ValidationError);
}

TEST_CASE("outliers displace an exact count within the magnitude range") {
  const PointCloud cloud(test::random_cloud(20000, 5));
  for (double ratio : {0.0, 0.001, 0.003, 0.006, 0.0123, 1.0}) {
    std::vector<Index> displaced;
    const auto out = add_outliers(cloud, ratio, 0.01, 0.1, 9, &displaced);
    CHECK(static_cast<Index>(displaced.size()) == static_cast<Index>(std::llround(ratio * 20000)));
    const std::set<Index> chosen(displaced.begin(), displaced.end());
    CHECK(chosen.size() == displaced.size());
    for (Index i = 0; i < cloud.size(); ++i) {
      const Vector3d off = out.point(i) - cloud.point(i);
      if (chosen.count(i)) {
        for (int c = 0; c < 3; ++c) CHECK((std::abs(off[c]) >= 0.01 - 1e-12 && std::abs(off[c]) <= 0.1 + 1e-12));
      } else {
        CHECK(out.positions.row(i) == cloud.positions.row(i));
      }
    }
  }
  std::vector<Index> displaced;
  const auto pp = add_outliers(cloud, 0.01, 0.01, 0.1, 2, &displaced, OutlierSign::per_point);
  for (Index i : displaced) {
    const Vector3d off = pp.point(i) - cloud.point(i);
    CHECK(((off.array() > 0).all() || (off.array() < 0).all()));
  }
  CHECK_THROWS_AS(add_outliers(cloud, 1.5, 0.01, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(add_outliers(cloud, 0.1, 0.1, 0.01, 1), ValidationError);
}

TEST_CASE("pose perturbation composes rotation and translation") {
  ViewpointSpec spec;
  spec.count = 200;
  const auto poses = sample_viewpoints_object(spec);
  std::vector<PosePerturbation> applied;
  const auto out = perturb_poses(poses, -2.0, 2.0, -0.02, 0.02, 17, &applied);
  REQUIRE(applied.size() == poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto& d = applied[i];
    CHECK((d.rotation.transpose() * d.rotation - Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.rotation.determinant() == doctest::Approx(1.0));
    CHECK(d.translation.cwiseAbs().maxCoeff() <= 0.02);
    CHECK((out[i].rotation - d.rotation * poses[i].rotation).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((out[i].translation - poses[i].translation - d.translation).cwiseAbs().maxCoeff() < 1e-12);
    out[i].check();
    // Rotation angle bounded by the three Euler angles.
    const double angle = std::acos(std::clamp((d.rotation.trace() - 1.0) / 2.0, -1.0, 1.0));
    CHECK(angle <= deg2rad(2.0) * 3.0 + 1e-12);
  }
  // Zero ranges are an exact no-op.
  const auto same = perturb_poses(poses, 0, 0, 0, 0, 3);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(same[i].rotation == poses[i].rotation);
    CHECK(same[i].translation == poses[i].translation);
  }
  CHECK_THROWS_AS(perturb_poses(poses, 1, 0, 0, 0, 1), ValidationError);
}

TEST_CASE("perturbed fusion shifts points by the rigid error") {
  PointCloud view(Points(1, 3));
  view.positions << 0.1, -0.2, 2.5;
  CameraPose pose;
  pose.translation = Vector3d(0, 0, 3);
  pose.rotation = look_at(pose.translation, Vector3d::Zero().eval());
  PosePerturbation d;
  d.rotation = rotation_xyz(0.01, 0.02, -0.03);
  d.translation = Vector3d(0.01, 0, -0.005);
  const auto moved = fuse_views({view}, {apply_perturbation(pose, d)});
  const Vector3d expect = d.rotation * pose.rotation * view.point(0) + pose.translation + d.translation;
  CHECK((moved.point(0) - expect).norm() < 1e-12);
}

TEST_CASE("sampling modes") {
  const PointCloud cloud(test::random_cloud(3000, 8));
  CHECK(apply_sampling(cloud, Sampling::fps, 3000, 1).positions == cloud.positions);
  const auto f = apply_sampling(cloud, Sampling::fps, 500, 1);
  CHECK(f.positions == fps(cloud, 500).positions);
  const auto r = apply_sampling(cloud, Sampling::rs, 500, 4);
  CHECK(r.positions == random_sample(cloud, 500, 4).positions);
  CHECK_THROWS_AS(apply_sampling(cloud, Sampling::rs, 3001, 1), ValidationError);
}
