#pragma once

#include "surfbench/camera.hpp"
#include "surfbench/imperfection.hpp"
#include "surfbench/metrics.hpp"
#include "surfbench/preprocess.hpp"
#include "surfbench/report.hpp"
#include "surfbench/scanner.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace surfbench {

inline constexpr const char* kToolVersion = "surfbench 1.0.0";

struct FilterOptions {
  int max_genus = 5;
  /// Self-occlusion proxy: minimum coverage under full-sphere viewpoints.
  bool check_occlusion = true;
  double coverage_threshold = 0.99;
  Index coverage_viewpoints = 1000;
  Index coverage_samples = 5000;
  CameraIntrinsics intrinsics;
};

struct FilterResult {
  bool accepted = false;
  std::string reason;
  TopologyReport topology;
  std::optional<double> coverage;
};

/// Watertight, manifold, genus <= max_genus, then (optionally) the coverage
/// test on the object-normalized mesh. Never throws for a failing mesh.
FilterResult filter_mesh(const TriMesh& mesh, const FilterOptions& options, std::uint64_t seed);

/// Camera-frame views of one viewpoint set, shared by the challenges that
/// only act after rendering.
struct RenderedScan {
  std::vector<CameraPose> poses;
  std::vector<PointCloud> views;
};

RenderedScan render_scan(const TriMesh& mesh, const std::vector<CameraPose>& poses, const CameraIntrinsics& intr);

struct ScanResult {
  PointCloud cloud;
  Index fused_points = 0;
  bool budget_reached = true;
};

/// Fuses (with perturbed poses for misalignment), subsamples to `budget`
/// (FPS, or RS for non-uniformity; scene clouds use RS), applies noise or
/// outliers, then estimates k-NN normals oriented toward the capturing camera.
/// Missing-point bands are realized by the caller's viewpoint set.
ScanResult finish_scan(const RenderedScan& rendered, const std::optional<ImperfectionSpec>& challenge, Index budget,
                       Mode mode, std::uint64_t seed, Index normal_k = 40);

struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  Mode mode = Mode::object;
  /// Preset keys; "perfect" is always produced as well.
  std::vector<std::string> challenges;
  /// Resolved parameters per preset key (defaults from the severity table,
  /// overridable from the config file).
  std::map<std::string, ImperfectionSpec> presets;
  ViewpointSpec viewpoints;
  SceneGridSpec scene_grid;
  CameraIntrinsics intrinsics;
  std::array<Index, 3> budgets = {80000, 120000, 160000};
  Index scene_budget = 1000000;
  /// Score thresholds (low/middle, middle/high) for corpora under 10 meshes.
  std::optional<std::array<double, 2>> complexity_thresholds;
  bool filter = true;
  FilterOptions filter_options;
  bool run_preprocess = false;
  PreprocessOptions preprocess;
  Index normal_k = 40;
  MetricPreset metric = MetricPreset::object();
  /// "<mesh id>/<challenge key>" -> reconstruction mesh to evaluate.
  std::map<std::string, std::filesystem::path> reconstructions;
  std::optional<std::filesystem::path> nfs_model;
  std::uint64_t seed = 0;
  std::filesystem::path output = "surfbench_out";

  /// Throws ValidationError on bad values or unresolvable keys.
  void check() const;
};

/// Defaults for a mode, including the severity table entries for `challenges`.
PipelineConfig default_config(Mode mode);

/// Parses a JSON config; keys absent from the file keep their defaults.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Resolves a preset key against the config's overrides and the table.
ImperfectionSpec resolve_preset(const PipelineConfig& config, const std::string& key);

struct PipelineSummary {
  Index meshes = 0;
  Index rejected = 0;
  Index clouds = 0;
  Index reports = 0;
  std::filesystem::path manifest;
};

/// Runs filter -> normalize -> score -> scan -> perturb -> preprocess ->
/// evaluate and writes clouds, reports and manifest.json under
/// config.output. Inputs are checked before anything is written.
PipelineSummary run_pipeline(const PipelineConfig& config);

/// Maps scores to groups: partition for >= 10 meshes, else thresholds, else
/// all low. Returns 0/1/2 per input.
std::vector<int> complexity_groups(const std::vector<double>& scores,
                                   const std::optional<std::array<double, 2>>& thresholds);

}  // namespace surfbench
