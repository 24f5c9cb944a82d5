#include "surfbench/pipeline.hpp"

#include "surfbench/complexity.hpp"
#include "surfbench/io.hpp"
#include "surfbench/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace surfbench {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

FilterResult filter_mesh(const TriMesh& mesh, const FilterOptions& options, std::uint64_t seed) {
  FilterResult r;
  try {
    validate(mesh);
  } catch (const ValidationError& e) {
    r.reason = e.what();
    return r;
  }
  r.topology = topology_report(mesh);
  if (!r.topology.watertight) {
    r.reason = "not watertight";
    return r;
  }
  if (!r.topology.edge_manifold || !r.topology.vertex_manifold) {
    r.reason = "not manifold";
    return r;
  }
  if (!r.topology.genus || *r.topology.genus > options.max_genus) {
    r.reason = "genus above " + std::to_string(options.max_genus);
    return r;
  }
  if (options.check_occlusion) {
    ViewpointSpec spec;
    spec.count = options.coverage_viewpoints;
    spec.seed = sub_seed(seed, "filter-viewpoints");
    const auto poses = sample_viewpoints_object(spec);
    r.coverage = visibility_coverage(normalize(mesh, Mode::object), poses, options.intrinsics, options.coverage_samples,
                                     sub_seed(seed, "filter-samples"));
    if (*r.coverage < options.coverage_threshold) {
      r.reason = "self-occluded (coverage below threshold)";
      return r;
    }
  }
  r.accepted = true;
  return r;
}

RenderedScan render_scan(const TriMesh& mesh, const std::vector<CameraPose>& poses, const CameraIntrinsics& intr) {
  return {poses, render_views(mesh, poses, intr)};
}

ScanResult finish_scan(const RenderedScan& rendered, const std::optional<ImperfectionSpec>& challenge, Index budget,
                       Mode mode, std::uint64_t seed, Index normal_k) {
  if (budget < 1) throw ValidationError("point budget must be positive");
  if (challenge) challenge->check();
  std::vector<CameraPose> poses = rendered.poses;
  if (challenge && challenge->kind == Challenge::misalignment)
    poses = perturb_poses(poses, challenge->rotation_min_deg, challenge->rotation_max_deg, challenge->translation_min,
                          challenge->translation_max, sub_seed(seed, "misalignment"));
  ScanResult result;
  PointCloud cloud = fuse_views(rendered.views, poses);
  result.fused_points = cloud.size();
  result.budget_reached = cloud.size() >= budget;
  const Index target = std::min(budget, cloud.size());
  Sampling sampling = challenge ? challenge->sampling : Sampling::fps;
  if (mode == Mode::scene) sampling = Sampling::rs;
  cloud = apply_sampling(cloud, sampling, target, sub_seed(seed, "sampling"));
  if (challenge && challenge->kind == Challenge::noise)
    cloud = add_noise(cloud, challenge->noise_sigma, sub_seed(seed, "noise"));
  if (challenge && challenge->kind == Challenge::outliers)
    cloud = add_outliers(cloud, challenge->outlier_ratio, challenge->outlier_min, challenge->outlier_max,
                         sub_seed(seed, "outliers"));
  if (normal_k > 0 && cloud.size() > normal_k) {
    std::vector<Index> failed;
    cloud = orient_normals(estimate_normals(cloud, normal_k), camera_positions(poses), &failed);
  }
  result.cloud = std::move(cloud);
  return result;
}

namespace {

const std::vector<std::string>& object_challenge_keys() {
  static const std::vector<std::string> keys = {
      "noise:low",        "noise:middle",        "noise:high",        "outliers:low", "outliers:middle",
      "outliers:high",    "misalignment:low",    "misalignment:middle", "misalignment:high",
      "missing:low",      "missing:middle",      "missing:high",      "nonuniform:middle"};
  return keys;
}

const std::vector<std::string>& scene_challenge_keys() {
  static const std::vector<std::string> keys = {"noise:scene", "outliers:scene", "misalignment:scene"};
  return keys;
}

std::string canonical_key(Mode mode, const std::string& key) {
  PresetKey pk = parse_preset_key(key);
  if (key.find(':') == std::string::npos && mode == Mode::scene) pk.mode = Mode::scene;
  if (pk.mode != mode) throw ValidationError("preset '" + key + "' does not match the pipeline mode");
  if (pk.kind == Challenge::nonuniform) pk.level = Severity::middle;
  return to_string(pk);
}

std::string file_key(const std::string& key) {
  std::string s = key;
  for (char& c : s)
    if (c == ':') c = '_';
  return s;
}

template <typename T>
void take(const ordered_json& j, const char* name, T& out) {
  if (j.contains(name)) out = j.at(name).get<T>();
}

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ValidationError("unknown config key '" + item.key() + "' in " + where);
  }
}

void apply_overrides(const ordered_json& j, ImperfectionSpec& spec) {
  reject_unknown(j,
                 {"noise_sigma", "outlier_ratio", "outlier_min", "outlier_max", "rotation_min_deg", "rotation_max_deg",
                  "translation_min", "translation_max", "bands_deg", "band_halfwidth_deg", "sampling"},
                 "preset");
  take(j, "noise_sigma", spec.noise_sigma);
  take(j, "outlier_ratio", spec.outlier_ratio);
  take(j, "outlier_min", spec.outlier_min);
  take(j, "outlier_max", spec.outlier_max);
  take(j, "rotation_min_deg", spec.rotation_min_deg);
  take(j, "rotation_max_deg", spec.rotation_max_deg);
  take(j, "translation_min", spec.translation_min);
  take(j, "translation_max", spec.translation_max);
  take(j, "bands_deg", spec.bands_deg);
  take(j, "band_halfwidth_deg", spec.band_halfwidth_deg);
  if (j.contains("sampling")) spec.sampling = parse_sampling(j.at("sampling").get<std::string>());
}

ordered_json spec_json(const ImperfectionSpec& s) {
  ordered_json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case Challenge::noise: j["noise_sigma"] = s.noise_sigma; break;
    case Challenge::outliers:
      j["outlier_ratio"] = s.outlier_ratio;
      j["outlier_min"] = s.outlier_min;
      j["outlier_max"] = s.outlier_max;
      break;
    case Challenge::misalignment:
      j["rotation_min_deg"] = s.rotation_min_deg;
      j["rotation_max_deg"] = s.rotation_max_deg;
      j["translation_min"] = s.translation_min;
      j["translation_max"] = s.translation_max;
      break;
    case Challenge::missing:
      j["bands_deg"] = s.bands_deg;
      j["band_halfwidth_deg"] = s.band_halfwidth_deg;
      break;
    case Challenge::nonuniform: break;
  }
  j["sampling"] = to_string(s.sampling);
  return j;
}

}  // namespace

void PipelineConfig::check() const {
  if (budgets[0] < 1 || budgets[1] < 1 || budgets[2] < 1 || scene_budget < 1)
    throw ValidationError("point budgets must be positive");
  viewpoints.check();
  intrinsics.check();
  if (!(scene_grid.cube_size > scene_grid.overlap && scene_grid.overlap >= 0.0) || scene_grid.dirs_per_cube < 1)
    throw ValidationError("scene grid needs cube_size > overlap >= 0 and positive directions");
  metric.check();
  if (metric.samples == 0) throw ValidationError("metric sample count must be positive");
  if (normal_k < 0) throw ValidationError("normal_k must be non-negative");
  if (complexity_thresholds && !((*complexity_thresholds)[0] <= (*complexity_thresholds)[1]))
    throw ValidationError("complexity thresholds must ascend");
  std::set<std::string> seen;
  for (const auto& key : challenges) {
    const auto spec = resolve_preset(*this, key);
    spec.check();
    if (!seen.insert(canonical_key(mode, key)).second) throw ValidationError("challenge '" + key + "' listed twice");
  }
}

PipelineConfig default_config(Mode mode) {
  PipelineConfig c;
  c.mode = mode;
  for (const auto& key : mode == Mode::object ? object_challenge_keys() : scene_challenge_keys())
    c.presets[key] = severity_preset(parse_preset_key(key));
  if (mode == Mode::scene) {
    c.intrinsics.near = 0.75;
    c.intrinsics.far = 2.1;
    c.metric = MetricPreset::scene();
    c.filter = false;
  }
  return c;
}

ImperfectionSpec resolve_preset(const PipelineConfig& config, const std::string& key) {
  const std::string canon = canonical_key(config.mode, key);
  if (auto it = config.presets.find(canon); it != config.presets.end()) return it->second;
  return severity_preset(parse_preset_key(canon));
}

PipelineConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(j,
                   {"inputs", "mode", "seed", "output", "challenges", "presets", "viewpoints", "scene_grid", "camera",
                    "budgets", "complexity_thresholds", "filter", "preprocess", "normal_k", "metric",
                    "reconstructions", "nfs_model"},
                   "config");
    const Mode mode = j.contains("mode") ? parse_mode(j.at("mode").get<std::string>()) : Mode::object;
    PipelineConfig c = default_config(mode);
    if (j.contains("inputs"))
      for (const auto& p : j.at("inputs")) c.inputs.emplace_back(p.get<std::string>());
    take(j, "seed", c.seed);
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    take(j, "challenges", c.challenges);
    if (j.contains("presets")) {
      for (const auto& item : j.at("presets").items()) {
        const std::string canon = canonical_key(mode, item.key());
        ImperfectionSpec spec = resolve_preset(c, canon);
        apply_overrides(item.value(), spec);
        c.presets[canon] = spec;
      }
    }
    if (j.contains("viewpoints")) {
      const auto& v = j.at("viewpoints");
      reject_unknown(v, {"count", "r_min", "r_max", "band_halfwidth_deg"}, "viewpoints");
      take(v, "count", c.viewpoints.count);
      take(v, "r_min", c.viewpoints.r_min);
      take(v, "r_max", c.viewpoints.r_max);
      take(v, "band_halfwidth_deg", c.viewpoints.band_halfwidth_deg);
    }
    if (j.contains("scene_grid")) {
      const auto& g = j.at("scene_grid");
      reject_unknown(g, {"cube_size", "overlap", "dirs_per_cube"}, "scene_grid");
      take(g, "cube_size", c.scene_grid.cube_size);
      take(g, "overlap", c.scene_grid.overlap);
      take(g, "dirs_per_cube", c.scene_grid.dirs_per_cube);
    }
    if (j.contains("camera")) {
      const auto& cam = j.at("camera");
      reject_unknown(cam, {"width", "height", "vfov_deg", "near", "far"}, "camera");
      take(cam, "width", c.intrinsics.width);
      take(cam, "height", c.intrinsics.height);
      take(cam, "vfov_deg", c.intrinsics.vfov_deg);
      take(cam, "near", c.intrinsics.near);
      take(cam, "far", c.intrinsics.far);
    }
    if (j.contains("budgets")) {
      const auto& b = j.at("budgets");
      reject_unknown(b, {"low", "middle", "high", "scene"}, "budgets");
      take(b, "low", c.budgets[0]);
      take(b, "middle", c.budgets[1]);
      take(b, "high", c.budgets[2]);
      take(b, "scene", c.scene_budget);
    }
    if (j.contains("complexity_thresholds")) {
      const auto t = j.at("complexity_thresholds").get<std::vector<double>>();
      if (t.size() != 2) throw ValidationError("complexity_thresholds needs two values");
      c.complexity_thresholds = std::array<double, 2>{t[0], t[1]};
    }
    if (j.contains("filter")) {
      const auto& f = j.at("filter");
      reject_unknown(f,
                     {"enabled", "max_genus", "check_occlusion", "coverage_threshold", "coverage_viewpoints",
                      "coverage_samples"},
                     "filter");
      take(f, "enabled", c.filter);
      take(f, "max_genus", c.filter_options.max_genus);
      take(f, "check_occlusion", c.filter_options.check_occlusion);
      take(f, "coverage_threshold", c.filter_options.coverage_threshold);
      take(f, "coverage_viewpoints", c.filter_options.coverage_viewpoints);
      take(f, "coverage_samples", c.filter_options.coverage_samples);
    }
    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      reject_unknown(p,
                     {"enabled", "remove_outliers", "smooth", "resample", "outlier_k", "outlier_alpha", "outlier_rule",
                      "jet_k", "fraction"},
                     "preprocess");
      take(p, "enabled", c.run_preprocess);
      take(p, "remove_outliers", c.preprocess.remove_outliers);
      take(p, "smooth", c.preprocess.smooth);
      take(p, "resample", c.preprocess.resample);
      take(p, "outlier_k", c.preprocess.outlier_k);
      take(p, "outlier_alpha", c.preprocess.outlier_alpha);
      if (p.contains("outlier_rule")) {
        const auto rule = p.at("outlier_rule").get<std::string>();
        if (rule == "centered") c.preprocess.outlier_rule = OutlierRule::centered;
        else if (rule == "literal") c.preprocess.outlier_rule = OutlierRule::literal;
        else throw ValidationError("unknown outlier rule '" + rule + "'");
      }
      take(p, "jet_k", c.preprocess.jet_k);
      take(p, "fraction", c.preprocess.fraction);
    }
    take(j, "normal_k", c.normal_k);
    if (j.contains("metric")) {
      const auto& m = j.at("metric");
      reject_unknown(m, {"preset", "samples", "tau"}, "metric");
      if (m.contains("preset")) c.metric = MetricPreset::named(m.at("preset").get<std::string>());
      take(m, "samples", c.metric.samples);
      take(m, "tau", c.metric.tau);
    }
    if (j.contains("reconstructions"))
      for (const auto& item : j.at("reconstructions").items())
        c.reconstructions[item.key()] = item.value().get<std::string>();
    if (j.contains("nfs_model")) c.nfs_model = j.at("nfs_model").get<std::string>();
    c.check();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  PipelineConfig c = parse_config(ss.str());
  // Relative paths in the file are relative to the file.
  const fs::path base = path.parent_path();
  auto rebase = [&](fs::path& p) {
    if (p.is_relative() && !base.empty()) p = base / p;
  };
  for (auto& p : c.inputs) rebase(p);
  for (auto& [k, p] : c.reconstructions) rebase(p);
  if (c.nfs_model) rebase(*c.nfs_model);
  rebase(c.output);
  return c;
}

std::vector<int> complexity_groups(const std::vector<double>& scores,
                                   const std::optional<std::array<double, 2>>& thresholds) {
  std::vector<int> groups(scores.size(), 0);
  if (scores.size() >= 10) {
    const auto part = partition_corpus(scores);
    for (Index i : part.middle) groups[i] = 1;
    for (Index i : part.high) groups[i] = 2;
  } else if (thresholds) {
    for (std::size_t i = 0; i < scores.size(); ++i)
      groups[i] = scores[i] < (*thresholds)[0] ? 0 : (scores[i] < (*thresholds)[1] ? 1 : 2);
  }
  return groups;
}

PipelineSummary run_pipeline(const PipelineConfig& config) {
  config.check();
  if (config.inputs.empty()) throw ValidationError("pipeline needs at least one input mesh");
  std::set<std::string> ids;
  for (const auto& p : config.inputs) {
    if (!fs::is_regular_file(p)) throw IoError("missing input " + p.string());
    if (!ids.insert(p.stem().string()).second) throw ValidationError("duplicate mesh name " + p.stem().string());
  }
  for (const auto& [key, p] : config.reconstructions)
    if (!fs::is_regular_file(p)) throw IoError("missing reconstruction " + p.string());
  std::optional<NfsModel> model;
  if (config.nfs_model) model = read_model(*config.nfs_model);

  struct MeshState {
    std::string id;
    fs::path source;
    TriMesh mesh;
    FilterResult filter;
    std::optional<double> score;
    int group = 0;
  };
  std::vector<MeshState> meshes;
  for (std::size_t i = 0; i < config.inputs.size(); ++i) {
    MeshState m;
    m.source = config.inputs[i];
    m.id = m.source.stem().string();
    const TriMesh raw = io::read_mesh(m.source);
    if (config.mode == Mode::object && config.filter) {
      m.filter = filter_mesh(raw, config.filter_options, sub_seed(config.seed, "filter", i));
    } else {
      m.filter.accepted = true;
    }
    if (m.filter.accepted) {
      try {
        m.mesh = normalize(remove_degenerate_faces(raw), config.mode);
        if (config.mode == Mode::object) m.score = complexity_score(m.mesh);
      } catch (const ValidationError& e) {
        m.filter.accepted = false;
        m.filter.reason = e.what();
      }
    }
    meshes.push_back(std::move(m));
  }
  if (config.mode == Mode::object) {
    std::vector<double> scores;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < meshes.size(); ++i)
      if (meshes[i].filter.accepted) {
        scores.push_back(*meshes[i].score);
        owner.push_back(i);
      }
    const auto groups = complexity_groups(scores, config.complexity_thresholds);
    for (std::size_t k = 0; k < owner.size(); ++k) meshes[owner[k]].group = groups[k];
  }

  fs::create_directories(config.output);
  PipelineSummary summary;
  std::vector<ReportRow> rows;
  ordered_json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["mode"] = to_string(config.mode);
  manifest["seed"] = config.seed;
  ordered_json params;
  params["viewpoints"] = {{"count", config.viewpoints.count},
                          {"r_min", config.viewpoints.r_min},
                          {"r_max", config.viewpoints.r_max}};
  params["camera"] = {{"width", config.intrinsics.width},
                      {"height", config.intrinsics.height},
                      {"vfov_deg", config.intrinsics.vfov_deg},
                      {"near", config.intrinsics.near},
                      {"far", config.intrinsics.far}};
  if (config.mode == Mode::scene)
    params["scene_grid"] = {{"cube_size", config.scene_grid.cube_size},
                            {"overlap", config.scene_grid.overlap},
                            {"dirs_per_cube", config.scene_grid.dirs_per_cube}};
  params["budgets"] = {{"low", config.budgets[0]},
                       {"middle", config.budgets[1]},
                       {"high", config.budgets[2]},
                       {"scene", config.scene_budget}};
  params["normal_k"] = config.normal_k;
  params["preprocess"] = config.run_preprocess
                             ? ordered_json{{"remove_outliers", config.preprocess.remove_outliers},
                                            {"smooth", config.preprocess.smooth},
                                            {"resample", config.preprocess.resample},
                                            {"outlier_k", config.preprocess.outlier_k},
                                            {"outlier_alpha", config.preprocess.outlier_alpha},
                                            {"outlier_rule", config.preprocess.outlier_rule == OutlierRule::centered
                                                                 ? "centered"
                                                                 : "literal"},
                                            {"jet_k", config.preprocess.jet_k},
                                            {"fraction", config.preprocess.fraction}}
                             : ordered_json(nullptr);
  params["metric"] = {{"preset", config.metric.label}, {"samples", config.metric.samples}, {"tau", config.metric.tau}};
  manifest["parameters"] = params;
  static const char* kGroupNames[] = {"low", "middle", "high"};

  ordered_json mesh_records = ordered_json::array();
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const auto& m = meshes[i];
    ordered_json rec;
    rec["id"] = m.id;
    rec["source"] = m.source.generic_string();
    rec["accepted"] = m.filter.accepted;
    if (!m.filter.accepted) {
      rec["reason"] = m.filter.reason;
      ++summary.rejected;
      mesh_records.push_back(rec);
      continue;
    }
    if (config.mode == Mode::object && config.filter) {
      rec["genus"] = *m.filter.topology.genus;
      if (m.filter.coverage) rec["coverage"] = *m.filter.coverage;
    }
    const fs::path mesh_rel = fs::path("meshes") / (m.id + ".ply");
    fs::create_directories(config.output / "meshes");
    io::write_mesh(config.output / mesh_rel, m.mesh);
    rec["normalized_mesh"] = mesh_rel.generic_string();
    Index budget = config.scene_budget;
    if (config.mode == Mode::object) {
      rec["complexity"] = *m.score;
      rec["group"] = kGroupNames[m.group];
      budget = config.budgets[m.group];
    }
    rec["budget"] = budget;

    const std::uint64_t view_seed = sub_seed(config.seed, "viewpoints", i);
    std::vector<CameraPose> poses;
    if (config.mode == Mode::object) {
      ViewpointSpec vp = config.viewpoints;
      vp.use_bands = false;
      vp.bands_deg.clear();
      vp.seed = view_seed;
      poses = sample_viewpoints_object(vp);
    } else {
      SceneGridSpec grid = config.scene_grid;
      grid.seed = view_seed;
      poses = sample_viewpoints_scene(m.mesh, grid);
    }
    rec["viewpoint_seed"] = view_seed;
    rec["views"] = poses.size();
    const RenderedScan full = render_scan(m.mesh, poses, config.intrinsics);

    std::vector<std::string> keys = {"perfect"};
    for (const auto& k : config.challenges) keys.push_back(canonical_key(config.mode, k));
    ordered_json artifacts = ordered_json::array();
    const fs::path cloud_dir = fs::path("clouds") / m.id;
    fs::create_directories(config.output / cloud_dir);
    for (const auto& key : keys) {
      std::optional<ImperfectionSpec> spec;
      if (key != "perfect") spec = resolve_preset(config, key);
      const std::uint64_t scan_seed = sub_seed(config.seed, "scan:" + key, i);
      ordered_json art;
      art["challenge"] = key;
      if (spec) art["parameters"] = spec_json(*spec);
      art["seed"] = scan_seed;
      ScanResult scan;
      if (spec && spec->kind == Challenge::missing) {
        ViewpointSpec vp = config.viewpoints;
        vp.use_bands = true;
        vp.bands_deg = spec->bands_deg;
        vp.band_halfwidth_deg = spec->band_halfwidth_deg;
        vp.seed = sub_seed(config.seed, "viewpoints:" + key, i);
        art["viewpoint_seed"] = vp.seed;
        const RenderedScan banded = render_scan(m.mesh, sample_viewpoints_object(vp), config.intrinsics);
        scan = finish_scan(banded, spec, budget, config.mode, scan_seed, config.normal_k);
      } else {
        scan = finish_scan(full, spec, budget, config.mode, scan_seed, config.normal_k);
      }
      const fs::path rel = cloud_dir / (file_key(key) + ".ply");
      io::write_cloud(config.output / rel, scan.cloud);
      ++summary.clouds;
      art["cloud"] = rel.generic_string();
      art["fused_points"] = scan.fused_points;
      art["points"] = scan.cloud.size();
      art["budget_reached"] = scan.budget_reached;
      if (config.run_preprocess) {
        PreprocessReport pre_report;
        const PointCloud pre = preprocess(scan.cloud, config.preprocess, &pre_report);
        const fs::path pre_rel = cloud_dir / (file_key(key) + "_preprocessed.ply");
        io::write_cloud(config.output / pre_rel, pre);
        ++summary.clouds;
        art["preprocessed"] = {{"cloud", pre_rel.generic_string()},
                               {"outliers_removed", pre_report.outliers_removed},
                               {"jet_fallbacks", pre_report.jet_fallbacks},
                               {"points", pre_report.output_points}};
      }
      if (auto it = config.reconstructions.find(m.id + "/" + key); it != config.reconstructions.end()) {
        const TriMesh recon = io::read_mesh(it->second);
        const std::uint64_t eval_seed = sub_seed(config.seed, "eval:" + key, i);
        ReportRow row;
        row.mesh = m.id;
        if (spec) {
          const PresetKey pk = parse_preset_key(key);
          row.challenge = to_string(pk.kind);
          row.severity = pk.mode == Mode::scene ? "scene" : to_string(pk.level);
        } else {
          row.challenge = "perfect";
          row.severity = "none";
        }
        row.metrics = evaluate(recon, m.mesh, config.metric, eval_seed, model ? &*model : nullptr);
        rows.push_back(row);
        art["reconstruction"] = it->second.generic_string();
        art["eval_seed"] = eval_seed;
      }
      artifacts.push_back(art);
    }
    rec["artifacts"] = artifacts;
    mesh_records.push_back(rec);
  }
  manifest["meshes"] = mesh_records;
  summary.meshes = static_cast<Index>(meshes.size());
  if (!rows.empty()) {
    emit_report(rows, ReportFormat::csv, config.output / "report.csv");
    emit_report(rows, ReportFormat::json, config.output / "report.json");
    manifest["reports"] = {"report.csv", "report.json"};
    summary.reports = static_cast<Index>(rows.size());
  }
  summary.manifest = config.output / "manifest.json";
  std::ofstream out(summary.manifest, std::ios::binary);
  if (!out) throw IoError("cannot write " + summary.manifest.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + summary.manifest.string());
  return summary;
}

}  // namespace surfbench
