#pragma once

#include "surfbench/camera.hpp"
#include "surfbench/cloud_ops.hpp"
#include "surfbench/mesh.hpp"
#include "surfbench/point_cloud.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace surfbench {

enum class Challenge { noise, nonuniform, outliers, misalignment, missing };
enum class Severity { low, middle, high };
enum class Sampling { fps, rs };
/// How the sign of an outlier displacement is drawn.
enum class OutlierSign { per_coordinate, per_point };

std::string to_string(Challenge c);
std::string to_string(Severity s);
std::string to_string(Mode m);
std::string to_string(Sampling s);
Challenge parse_challenge(std::string_view s);
Severity parse_severity(std::string_view s);
Mode parse_mode(std::string_view s);
Sampling parse_sampling(std::string_view s);

/// One imperfection with its severity parameters (lengths in mesh units,
/// angles in degrees, ratio as a fraction).
struct ImperfectionSpec {
  Challenge kind = Challenge::noise;
  double noise_sigma = 0.0;
  double outlier_ratio = 0.0;
  double outlier_min = 0.01;
  double outlier_max = 0.1;
  double rotation_min_deg = 0.0;
  double rotation_max_deg = 0.0;
  double translation_min = 0.0;
  double translation_max = 0.0;
  std::vector<double> bands_deg;
  double band_halfwidth_deg = 3.0;
  Sampling sampling = Sampling::fps;
  Index target_points = 0;
  std::uint64_t seed = 0;

  /// Throws ValidationError on inconsistent ranges.
  void check() const;
};

/// The benchmark's severity table. Scene mode has a single level (the level
/// argument is ignored); missing points and non-uniformity arise naturally in
/// scene scans and have no scene preset. Non-uniformity has one object level.
ImperfectionSpec severity_preset(Challenge kind, Severity level, Mode mode);

/// "noise:middle", "missing:high", "outliers:scene", "nonuniform".
struct PresetKey {
  Challenge kind;
  Severity level = Severity::middle;
  Mode mode = Mode::object;
};
PresetKey parse_preset_key(std::string_view key);
std::string to_string(const PresetKey& key);
ImperfectionSpec severity_preset(const PresetKey& key);

/// Independent N(0, sigma^2) offsets per coordinate, truncated to
/// [-2 sigma, 2 sigma] by rejection. sigma = 0 returns the input unchanged.
PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// Displaces exactly round(ratio * n) distinct points; coordinate magnitudes
/// from U[a, b] with random signs. The displaced indices go to `displaced`.
PointCloud add_outliers(const PointCloud& cloud, double ratio, double a, double b, std::uint64_t seed,
                        std::vector<Index>* displaced = nullptr, OutlierSign sign = OutlierSign::per_coordinate);

struct PosePerturbation {
  Matrix3d rotation = Matrix3d::Identity();
  Vector3d translation = Vector3d::Zero();
};

/// Per pose: Euler angles from U[rot_min, rot_max] (degrees), translation
/// offsets from U[trans_min, trans_max]; result is (dR * R, t + dt).
std::vector<CameraPose> perturb_poses(const std::vector<CameraPose>& poses, double rot_min_deg, double rot_max_deg,
                                      double trans_min, double trans_max, std::uint64_t seed,
                                      std::vector<PosePerturbation>* applied = nullptr);

/// Composition used by perturb_poses; exact no-op for the identity perturbation.
CameraPose apply_perturbation(const CameraPose& pose, const PosePerturbation& delta);

/// FPS (uniform) or seeded random subsampling down to n points.
PointCloud apply_sampling(const PointCloud& cloud, Sampling mode, Index n, std::uint64_t seed,
                          FpsSeed fps_seed = FpsSeed::farthest_from_centroid);

}  // namespace surfbench
