#include "surfbench/imperfection.hpp"

#include "surfbench/geometry.hpp"
#include "surfbench/rng.hpp"

#include <cmath>

namespace surfbench {

std::string to_string(Challenge c) {
  switch (c) {
    case Challenge::noise: return "noise";
    case Challenge::nonuniform: return "nonuniform";
    case Challenge::outliers: return "outliers";
    case Challenge::misalignment: return "misalignment";
    case Challenge::missing: return "missing";
  }
  return "?";
}

std::string to_string(Severity s) {
  switch (s) {
    case Severity::low: return "low";
    case Severity::middle: return "middle";
    case Severity::high: return "high";
  }
  return "?";
}

std::string to_string(Mode m) { return m == Mode::object ? "object" : "scene"; }
std::string to_string(Sampling s) { return s == Sampling::fps ? "fps" : "rs"; }

Challenge parse_challenge(std::string_view s) {
  if (s == "noise") return Challenge::noise;
  if (s == "nonuniform") return Challenge::nonuniform;
  if (s == "outliers") return Challenge::outliers;
  if (s == "misalignment") return Challenge::misalignment;
  if (s == "missing") return Challenge::missing;
  throw ValidationError("unknown challenge '" + std::string(s) + "'");
}

Severity parse_severity(std::string_view s) {
  if (s == "low") return Severity::low;
  if (s == "middle") return Severity::middle;
  if (s == "high") return Severity::high;
  throw ValidationError("unknown severity '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "object") return Mode::object;
  if (s == "scene") return Mode::scene;
  throw ValidationError("unknown mode '" + std::string(s) + "'");
}

Sampling parse_sampling(std::string_view s) {
  if (s == "fps" || s == "FPS") return Sampling::fps;
  if (s == "rs" || s == "RS") return Sampling::rs;
  throw ValidationError("unknown sampling '" + std::string(s) + "'");
}

void ImperfectionSpec::check() const {
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");
  if (!(outlier_ratio >= 0.0 && outlier_ratio <= 1.0)) throw ValidationError("outlier ratio must lie in [0, 1]");
  if (!(outlier_min > 0.0 && outlier_min <= outlier_max)) throw ValidationError("outlier range must satisfy 0 < a <= b");
  if (!(rotation_min_deg <= rotation_max_deg)) throw ValidationError("rotation range reversed");
  if (!(translation_min <= translation_max)) throw ValidationError("translation range reversed");
  for (double phi : bands_deg)
    if (phi - band_halfwidth_deg < 0.0 || phi + band_halfwidth_deg > 180.0)
      throw ValidationError("polar band leaves [0, 180] degrees");
}

ImperfectionSpec severity_preset(Challenge kind, Severity level, Mode mode) {
  ImperfectionSpec spec;
  spec.kind = kind;
  const int l = static_cast<int>(level);
  if (mode == Mode::scene) {
    switch (kind) {
      case Challenge::noise: spec.noise_sigma = 0.005; return spec;
      case Challenge::outliers:
        spec.outlier_ratio = 0.004;
        spec.outlier_min = 0.01;
        spec.outlier_max = 0.1;
        return spec;
      case Challenge::misalignment:
        spec.rotation_min_deg = -1.5;
        spec.rotation_max_deg = 1.5;
        spec.translation_min = -0.015;
        spec.translation_max = 0.015;
        return spec;
      case Challenge::missing:
      case Challenge::nonuniform:
        throw ValidationError("no scene preset for '" + to_string(kind) + "'");
    }
  }
  switch (kind) {
    case Challenge::noise: {
      constexpr double sigma[] = {0.001, 0.003, 0.006};
      spec.noise_sigma = sigma[l];
      break;
    }
    case Challenge::outliers: {
      constexpr double ratio[] = {0.001, 0.003, 0.006};
      spec.outlier_ratio = ratio[l];
      spec.outlier_min = 0.01;
      spec.outlier_max = 0.1;
      break;
    }
    case Challenge::misalignment: {
      constexpr double rot[] = {0.5, 1.0, 2.0};
      constexpr double trans[] = {0.005, 0.01, 0.02};
      spec.rotation_min_deg = -rot[l];
      spec.rotation_max_deg = rot[l];
      spec.translation_min = -trans[l];
      spec.translation_max = trans[l];
      break;
    }
    case Challenge::missing: {
      const std::vector<double> bands[] = {{20.0, 40.0, 60.0}, {20.0, 40.0}, {20.0}};
      spec.bands_deg = bands[l];
      spec.band_halfwidth_deg = 3.0;
      break;
    }
    case Challenge::nonuniform: spec.sampling = Sampling::rs; break;
  }
  return spec;
}

PresetKey parse_preset_key(std::string_view key) {
  const auto colon = key.find(':');
  PresetKey out{parse_challenge(key.substr(0, colon))};
  if (colon == std::string_view::npos) return out;
  const std::string_view rest = key.substr(colon + 1);
  if (rest == "scene") out.mode = Mode::scene;
  else out.level = parse_severity(rest);
  return out;
}

std::string to_string(const PresetKey& key) {
  return to_string(key.kind) + ":" + (key.mode == Mode::scene ? std::string("scene") : to_string(key.level));
}

ImperfectionSpec severity_preset(const PresetKey& key) { return severity_preset(key.kind, key.level, key.mode); }

PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");
  if (sigma == 0.0) return cloud;
  PointCloud out = cloud;
  Rng rng(seed);
  for (Index i = 0; i < out.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      double z;
      do {
        z = rng.normal();
      } while (std::abs(z) > 2.0);
      out.positions(i, c) += sigma * z;
    }
  return out;
}

PointCloud add_outliers(const PointCloud& cloud, double ratio, double a, double b, std::uint64_t seed,
                        std::vector<Index>* displaced, OutlierSign sign) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ValidationError("outlier ratio must lie in [0, 1]");
  if (!(a > 0.0 && a <= b)) throw ValidationError("outlier range must satisfy 0 < a <= b");
  const auto count = static_cast<Index>(std::llround(ratio * static_cast<double>(cloud.size())));
  const auto chosen = random_indices(cloud.size(), count, sub_seed(seed, "outlier-select"));
  PointCloud out = cloud;
  Rng rng(sub_seed(seed, "outlier-offset"));
  for (Index idx : chosen) {
    const double point_sign = rng.coin() ? -1.0 : 1.0;
    for (int c = 0; c < 3; ++c) {
      const double magnitude = rng.uniform(a, b);
      const double s = sign == OutlierSign::per_point ? point_sign : (rng.coin() ? -1.0 : 1.0);
      out.positions(idx, c) += s * magnitude;
    }
  }
  if (displaced) *displaced = chosen;
  return out;
}

CameraPose apply_perturbation(const CameraPose& pose, const PosePerturbation& delta) {
  CameraPose out = pose;
  if (delta.rotation != Matrix3d::Identity()) out.rotation = delta.rotation * pose.rotation;
  for (int c = 0; c < 3; ++c)
    if (delta.translation[c] != 0.0) out.translation[c] += delta.translation[c];
  return out;
}

std::vector<CameraPose> perturb_poses(const std::vector<CameraPose>& poses, double rot_min_deg, double rot_max_deg,
                                      double trans_min, double trans_max, std::uint64_t seed,
                                      std::vector<PosePerturbation>* applied) {
  if (!(rot_min_deg <= rot_max_deg) || !(trans_min <= trans_max)) throw ValidationError("perturbation range reversed");
  Rng rng(seed);
  std::vector<CameraPose> out;
  out.reserve(poses.size());
  if (applied) applied->clear();
  for (const auto& pose : poses) {
    const double alpha = rng.uniform(rot_min_deg, rot_max_deg);
    const double beta = rng.uniform(rot_min_deg, rot_max_deg);
    const double gamma = rng.uniform(rot_min_deg, rot_max_deg);
    PosePerturbation delta;
    if (alpha != 0.0 || beta != 0.0 || gamma != 0.0)
      delta.rotation = rotation_xyz(deg2rad(alpha), deg2rad(beta), deg2rad(gamma));
    for (int c = 0; c < 3; ++c) delta.translation[c] = rng.uniform(trans_min, trans_max);
    out.push_back(apply_perturbation(pose, delta));
    if (applied) applied->push_back(delta);
  }
  return out;
}

PointCloud apply_sampling(const PointCloud& cloud, Sampling mode, Index n, std::uint64_t seed, FpsSeed fps_seed) {
  if (n > cloud.size()) throw ValidationError("sampling target exceeds cloud size");
  if (n == cloud.size()) return cloud;
  return mode == Sampling::fps ? fps(cloud, n, fps_seed) : random_sample(cloud, n, seed);
}

}  // namespace surfbench
