// Command-line front end: one subcommand per pipeline stage plus the full run.

#include "surfbench/complexity.hpp"
#include "surfbench/io.hpp"
#include "surfbench/nfs.hpp"
#include "surfbench/parallel.hpp"
#include "surfbench/pipeline.hpp"
#include "surfbench/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <functional>
#include <iostream>

using namespace surfbench;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Subcommand bodies run after parsing so global flags are already applied.
std::function<void()> g_pending;

void defer(CLI::App* cmd, std::function<void()> fn) {
  cmd->callback([fn = std::move(fn)] { g_pending = fn; });
}

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string config;
};

/// Mesh files are sampled; face-less PLY files are read as clouds.
PointCloud load_surface(const fs::path& path, Index samples, std::uint64_t seed) {
  const TriMesh mesh = io::read_mesh(path);
  if (!mesh.empty()) return sample_surface(normalize(mesh, Mode::object), samples, seed);
  return io::read_cloud(path);
}

ordered_json report_to_json(const MetricReport& r) {
  ordered_json j;
  j["cd"] = r.cd;
  j["fscore"] = r.fscore;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["ncs"] = r.ncs;
  j["nfs"] = r.nfs ? ordered_json(*r.nfs) : ordered_json(nullptr);
  j["preset"] = r.preset;
  j["seed"] = r.seed;
  j["degraded_ncs"] = r.degraded_ncs;
  return j;
}

void add_filter(CLI::App& app, const Globals& g) {
  auto* cmd = app.add_subcommand("filter", "Topology and self-occlusion screening of meshes");
  auto files = std::make_shared<std::vector<std::string>>();
  auto opt = std::make_shared<FilterOptions>();
  auto no_occlusion = std::make_shared<bool>(false);
  cmd->add_option("meshes", *files, "Mesh files (OBJ/PLY)")->required();
  cmd->add_option("--max-genus", opt->max_genus, "Largest accepted genus")->capture_default_str();
  cmd->add_option("--coverage-threshold", opt->coverage_threshold, "Minimum visible fraction")->capture_default_str();
  cmd->add_option("--coverage-viewpoints", opt->coverage_viewpoints)->capture_default_str();
  cmd->add_option("--coverage-samples", opt->coverage_samples)->capture_default_str();
  cmd->add_flag("--no-occlusion", *no_occlusion, "Skip the coverage test");
  defer(cmd, [&g, files, opt, no_occlusion] {
    opt->check_occlusion = !*no_occlusion;
    for (std::size_t i = 0; i < files->size(); ++i) {
      const auto r = filter_mesh(io::read_mesh((*files)[i]), *opt, sub_seed(g.seed, "filter", i));
      ordered_json j;
      j["mesh"] = (*files)[i];
      j["accepted"] = r.accepted;
      if (!r.accepted) j["reason"] = r.reason;
      j["watertight"] = r.topology.watertight;
      j["genus"] = r.topology.genus ? ordered_json(*r.topology.genus) : ordered_json(nullptr);
      if (r.coverage) j["coverage"] = *r.coverage;
      std::cout << j.dump() << '\n';
    }
  });
}

void add_complexity(CLI::App& app) {
  auto* cmd = app.add_subcommand("complexity", "Curvature complexity score and corpus grouping");
  auto files = std::make_shared<std::vector<std::string>>();
  auto no_normalize = std::make_shared<bool>(false);
  auto area = std::make_shared<bool>(false);
  auto groups = std::make_shared<std::string>();
  auto thresholds = std::make_shared<std::vector<double>>();
  cmd->add_option("meshes", *files, "Mesh files")->required();
  cmd->add_flag("--no-normalize", *no_normalize, "Score meshes at their stored scale");
  cmd->add_flag("--area-weighted", *area, "Weight vertices by mixed area");
  cmd->add_option("--groups", *groups, "Write mesh,score,group CSV here");
  cmd->add_option("--thresholds", *thresholds, "Low/middle and middle/high cut scores (corpora under 10)")
      ->expected(2);
  defer(cmd, [=] {
    std::vector<double> scores;
    for (const auto& f : *files) {
      TriMesh mesh = remove_degenerate_faces(io::read_mesh(f));
      if (!*no_normalize) mesh = normalize(mesh, Mode::object);
      scores.push_back(complexity_score(mesh, *area ? Weighting::area_weighted : Weighting::vertex_mean));
      std::printf("%s,%.17g\n", f.c_str(), scores.back());
    }
    if (groups->empty()) return;
    std::optional<std::array<double, 2>> t;
    if (!thresholds->empty()) t = std::array<double, 2>{(*thresholds)[0], (*thresholds)[1]};
    const auto g = complexity_groups(scores, t);
    std::FILE* out = std::fopen(groups->c_str(), "wb");
    if (!out) throw IoError("cannot write " + *groups);
    static const char* names[] = {"low", "middle", "high"};
    std::fprintf(out, "mesh,score,group\n");
    for (std::size_t i = 0; i < files->size(); ++i)
      std::fprintf(out, "%s,%.17g,%s\n", (*files)[i].c_str(), scores[i], names[g[i]]);
    if (std::fclose(out) != 0) throw IoError("failed writing " + *groups);
  });
}

struct ScanArgs {
  std::string mesh, output, mode = "object", challenge;
  Index views = 1000, budget = 0, normal_k = 40;
  double r_min = 2.5, r_max = 3.5;
  CameraIntrinsics intr;
  SceneGridSpec grid;
  std::optional<double> near, far;
  bool no_normalize = false;
  std::string views_dir;
};

void add_scan(CLI::App& app, const Globals& g) {
  auto* cmd = app.add_subcommand("scan", "Virtual depth scan of a mesh to a fused point cloud");
  auto a = std::make_shared<ScanArgs>();
  cmd->add_option("mesh", a->mesh, "Mesh file")->required();
  cmd->add_option("-o,--output", a->output, "Output PLY cloud")->required();
  cmd->add_option("--mode", a->mode, "object or scene")->capture_default_str();
  cmd->add_option("--challenge", a->challenge, "Preset key, e.g. misalignment:middle or missing:high");
  cmd->add_option("--views", a->views, "Viewpoint count (object mode)")->capture_default_str();
  cmd->add_option("--r-min", a->r_min)->capture_default_str();
  cmd->add_option("--r-max", a->r_max)->capture_default_str();
  cmd->add_option("--width", a->intr.width)->capture_default_str();
  cmd->add_option("--height", a->intr.height)->capture_default_str();
  cmd->add_option("--vfov", a->intr.vfov_deg, "Vertical field of view in degrees")->capture_default_str();
  cmd->add_option("--near", a->near, "Depth range start (default 0.1 object, 0.75 scene)");
  cmd->add_option("--far", a->far, "Depth range end (default 100 object, 2.1 scene)");
  cmd->add_option("--cube-size", a->grid.cube_size)->capture_default_str();
  cmd->add_option("--overlap", a->grid.overlap)->capture_default_str();
  cmd->add_option("--dirs", a->grid.dirs_per_cube, "Directions per empty cube")->capture_default_str();
  cmd->add_option("--budget", a->budget, "Output points (default 80000 object, 1000000 scene)");
  cmd->add_option("--normal-k", a->normal_k, "Neighbours for normals; 0 disables")->capture_default_str();
  cmd->add_flag("--no-normalize", a->no_normalize, "Scan the mesh as stored");
  cmd->add_option("--views-dir", a->views_dir, "Also write each camera-frame view here");
  defer(cmd, [&g, a] {
    const Mode mode = parse_mode(a->mode);
    CameraIntrinsics intr = a->intr;
    if (mode == Mode::scene) {
      intr.near = 0.75;
      intr.far = 2.1;
    }
    if (a->near) intr.near = *a->near;
    if (a->far) intr.far = *a->far;
    TriMesh mesh = remove_degenerate_faces(io::read_mesh(a->mesh));
    if (!a->no_normalize) mesh = normalize(mesh, mode);
    std::optional<ImperfectionSpec> spec;
    if (!a->challenge.empty()) {
      PresetKey key = parse_preset_key(a->challenge);
      if (a->challenge.find(':') == std::string::npos) key.mode = mode;
      spec = severity_preset(key);
    }
    std::vector<CameraPose> poses;
    if (mode == Mode::object) {
      ViewpointSpec vp;
      vp.count = a->views;
      vp.r_min = a->r_min;
      vp.r_max = a->r_max;
      vp.seed = sub_seed(g.seed, "viewpoints");
      if (spec && spec->kind == Challenge::missing) {
        vp.use_bands = true;
        vp.bands_deg = spec->bands_deg;
        vp.band_halfwidth_deg = spec->band_halfwidth_deg;
      }
      poses = sample_viewpoints_object(vp);
    } else {
      SceneGridSpec grid = a->grid;
      grid.seed = sub_seed(g.seed, "viewpoints");
      poses = sample_viewpoints_scene(mesh, grid);
    }
    const RenderedScan rendered = render_scan(mesh, poses, intr);
    if (!a->views_dir.empty()) {
      fs::create_directories(a->views_dir);
      for (std::size_t i = 0; i < rendered.views.size(); ++i)
        io::write_cloud(fs::path(a->views_dir) / ("view_" + std::to_string(i) + ".ply"), rendered.views[i]);
    }
    const Index budget = a->budget > 0 ? a->budget : (mode == Mode::object ? 80000 : 1000000);
    const auto result = finish_scan(rendered, spec, budget, mode, sub_seed(g.seed, "scan"), a->normal_k);
    io::write_cloud(a->output, result.cloud);
    std::printf("views %zu fused %lld written %lld%s\n", poses.size(), static_cast<long long>(result.fused_points),
                static_cast<long long>(result.cloud.size()), result.budget_reached ? "" : " (budget not reached)");
  });
}

void add_perturb(CLI::App& app, const Globals& g) {
  auto* cmd = app.add_subcommand("perturb", "Apply noise, outliers or random subsampling to a cloud");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto key = std::make_shared<std::string>();
  auto mode = std::make_shared<std::string>("object");
  auto sigma = std::make_shared<std::optional<double>>();
  auto ratio = std::make_shared<std::optional<double>>();
  auto budget = std::make_shared<Index>(0);
  cmd->add_option("cloud", *in, "Input PLY cloud")->required();
  cmd->add_option("-o,--output", *out, "Output PLY cloud")->required();
  cmd->add_option("--challenge", *key, "noise:<level>, outliers:<level> or nonuniform")->required();
  cmd->add_option("--mode", *mode, "object or scene")->capture_default_str();
  cmd->add_option("--sigma", *sigma, "Override the noise sigma");
  cmd->add_option("--ratio", *ratio, "Override the outlier ratio");
  cmd->add_option("--budget", *budget, "Subsample size for nonuniform (default: half the cloud)");
  defer(cmd, [&g, in, out, key, mode, sigma, ratio, budget] {
    PresetKey pk = parse_preset_key(*key);
    if (key->find(':') == std::string::npos) pk.mode = parse_mode(*mode);
    ImperfectionSpec spec = severity_preset(pk);
    if (*sigma) spec.noise_sigma = **sigma;
    if (*ratio) spec.outlier_ratio = **ratio;
    spec.check();
    const PointCloud cloud = io::read_cloud(*in);
    PointCloud result;
    switch (spec.kind) {
      case Challenge::noise: result = add_noise(cloud, spec.noise_sigma, sub_seed(g.seed, "noise")); break;
      case Challenge::outliers:
        result = add_outliers(cloud, spec.outlier_ratio, spec.outlier_min, spec.outlier_max, sub_seed(g.seed, "outliers"));
        break;
      case Challenge::nonuniform:
        result = apply_sampling(cloud, spec.sampling, *budget > 0 ? *budget : cloud.size() / 2, sub_seed(g.seed, "sampling"));
        break;
      case Challenge::misalignment:
      case Challenge::missing:
        throw ValidationError(to_string(spec.kind) + " acts during scanning; use `scan --challenge`");
    }
    io::write_cloud(*out, result);
  });
}

void add_preprocess(CLI::App& app) {
  auto* cmd = app.add_subcommand("preprocess", "Outlier removal, jet smoothing and FPS resampling");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto opt = std::make_shared<PreprocessOptions>();
  auto skip = std::make_shared<std::array<bool, 3>>();
  auto literal = std::make_shared<bool>(false);
  cmd->add_option("cloud", *in, "Input PLY cloud")->required();
  cmd->add_option("-o,--output", *out, "Output PLY cloud")->required();
  cmd->add_flag("--skip-outliers", (*skip)[0]);
  cmd->add_flag("--skip-smooth", (*skip)[1]);
  cmd->add_flag("--skip-resample", (*skip)[2]);
  cmd->add_option("--outlier-k", opt->outlier_k)->capture_default_str();
  cmd->add_option("--alpha", opt->outlier_alpha)->capture_default_str();
  cmd->add_flag("--literal-rule", *literal, "Remove when d > alpha * std (no mean offset)");
  cmd->add_option("--jet-k", opt->jet_k)->capture_default_str();
  cmd->add_option("--fraction", opt->fraction, "Fraction kept by resampling")->capture_default_str();
  defer(cmd, [in, out, opt, skip, literal] {
    opt->remove_outliers = !(*skip)[0];
    opt->smooth = !(*skip)[1];
    opt->resample = !(*skip)[2];
    opt->outlier_rule = *literal ? OutlierRule::literal : OutlierRule::centered;
    PreprocessReport report;
    const PointCloud result = preprocess(io::read_cloud(*in), *opt, &report);
    io::write_cloud(*out, result);
    std::printf("input %lld removed %lld jet-fallbacks %lld output %lld\n", static_cast<long long>(report.input_points),
                static_cast<long long>(report.outliers_removed), static_cast<long long>(report.jet_fallbacks),
                static_cast<long long>(report.output_points));
  });
}

void add_eval(CLI::App& app, const Globals& g) {
  auto* cmd = app.add_subcommand("eval", "CD, F-score, NCS (and NFS) of a reconstruction");
  struct Args {
    std::string recon, gt, preset = "object", model, csv, json, mesh_id, challenge = "perfect", severity = "none";
    Index samples = -1;
    std::optional<double> tau;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--recon", a->recon, "Reconstructed mesh")->required();
  cmd->add_option("--gt", a->gt, "Ground-truth mesh, or a face-less PLY cloud")->required();
  cmd->add_option("--preset", a->preset, "object, scene or real")->capture_default_str();
  cmd->add_option("--samples", a->samples, "Override the preset's sample count");
  cmd->add_option("--tau", a->tau, "Override the F-score threshold");
  cmd->add_option("--model", a->model, "NFS checkpoint");
  cmd->add_option("--csv", a->csv, "Append-free CSV report path");
  cmd->add_option("--json", a->json, "JSON report path");
  cmd->add_option("--mesh-id", a->mesh_id);
  cmd->add_option("--challenge", a->challenge)->capture_default_str();
  cmd->add_option("--severity", a->severity)->capture_default_str();
  defer(cmd, [&g, a] {
    MetricPreset preset = MetricPreset::named(a->preset);
    if (a->samples >= 0) preset.samples = a->samples;
    if (a->tau) preset.tau = *a->tau;
    preset.check();
    std::optional<NfsModel> model;
    if (!a->model.empty()) model = read_model(a->model);
    const TriMesh recon = io::read_mesh(a->recon);
    const TriMesh gt_mesh = io::read_mesh(a->gt);
    const MetricReport r = gt_mesh.empty()
                               ? evaluate(recon, io::read_cloud(a->gt), preset, g.seed, model ? &*model : nullptr)
                               : evaluate(recon, gt_mesh, preset, g.seed, model ? &*model : nullptr);
    std::cout << report_to_json(r).dump(2) << '\n';
    const std::vector<ReportRow> rows = {
        {a->mesh_id.empty() ? fs::path(a->gt).stem().string() : a->mesh_id, a->challenge, a->severity, r}};
    if (!a->csv.empty()) emit_report(rows, ReportFormat::csv, a->csv);
    if (!a->json.empty()) emit_report(rows, ReportFormat::json, a->json);
  });
}

void add_nfs_train(CLI::App& app, const Globals& g) {
  auto* cmd = app.add_subcommand("nfs-train", "Train the patch feature network on meshes");
  struct Args {
    std::vector<std::string> meshes;
    std::string output;
    TrainConfig cfg;
    Index samples = 100000;
    int resamplings = 2;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("meshes", a->meshes, "Training meshes (one surface each)")->required();
  cmd->add_option("-o,--output", a->output, "Checkpoint path")->required();
  cmd->add_option("--epochs", a->cfg.epochs)->capture_default_str();
  cmd->add_option("--lr", a->cfg.learning_rate)->capture_default_str();
  cmd->add_option("--halving", a->cfg.halving_period, "Epochs between learning-rate halvings")->capture_default_str();
  cmd->add_option("--width", a->cfg.width)->capture_default_str();
  cmd->add_option("--layers", a->cfg.layers)->capture_default_str();
  cmd->add_option("--points", a->cfg.patches.points_per_patch, "Points per patch")->capture_default_str();
  cmd->add_option("--patches", a->cfg.patches.patch_count, "Patches per cloud")->capture_default_str();
  cmd->add_option("--radius", a->cfg.patches.radius_fraction, "Patch radius / bounding radius")->capture_default_str();
  cmd->add_option("--negatives", a->cfg.negatives_per_epoch, "Cross-surface pairs per epoch (0: match positives)");
  cmd->add_option("--samples", a->samples, "Points per resampling")->capture_default_str();
  cmd->add_option("--resamplings", a->resamplings, "Independent resamplings per mesh")->capture_default_str();
  defer(cmd, [&g, a] {
    if (a->resamplings < 1) throw ValidationError("need at least one resampling");
    std::vector<TrainingCloud> corpus;
    for (std::size_t i = 0; i < a->meshes.size(); ++i) {
      const TriMesh mesh = normalize(remove_degenerate_faces(io::read_mesh(a->meshes[i])), Mode::object);
      for (int r = 0; r < a->resamplings; ++r)
        corpus.push_back({static_cast<int>(i),
                          sample_surface(mesh, a->samples, sub_seed(g.seed, "nfs-resample", i * 1000 + r))});
    }
    a->cfg.seed = g.seed;
    const auto result = train_nfs(corpus, a->cfg);
    write_model(a->output, result.model);
    std::printf("patches %zu loss %.6g -> %.6g\n", result.patches.size(), result.loss.front(), result.loss.back());
  });
}

void add_nfs_eval(CLI::App& app, const Globals& g) {
  auto* cmd = app.add_subcommand("nfs-eval", "Neural feature similarity between two surfaces");
  auto model = std::make_shared<std::string>();
  auto p = std::make_shared<std::string>();
  auto q = std::make_shared<std::string>();
  auto samples = std::make_shared<Index>(100000);
  cmd->add_option("--model", *model, "Checkpoint")->required();
  cmd->add_option("p", *p, "Mesh or cloud")->required();
  cmd->add_option("q", *q, "Mesh or cloud")->required();
  cmd->add_option("--samples", *samples, "Points sampled from mesh inputs")->capture_default_str();
  defer(cmd, [&g, model, p, q, samples] {
    const NfsModel m = read_model(*model);
    const PointCloud cp = load_surface(*p, *samples, sub_seed(g.seed, "nfs-p"));
    const PointCloud cq = load_surface(*q, *samples, sub_seed(g.seed, "nfs-q"));
    std::printf("%.17g\n", nfs(m, cp, cq, g.seed));
  });
}

void add_pipeline(CLI::App& app, const Globals& g, const bool& seed_given) {
  auto* cmd = app.add_subcommand("pipeline", "Full seeded run from a JSON config (--config)");
  auto output = std::make_shared<std::string>();
  cmd->add_option("--output", *output, "Override the output directory");
  defer(cmd, [&g, &seed_given, output] {
    if (g.config.empty()) throw ValidationError("pipeline needs --config");
    PipelineConfig cfg = load_config(g.config);
    if (seed_given) cfg.seed = g.seed;
    if (!output->empty()) cfg.output = *output;
    const auto s = run_pipeline(cfg);
    std::printf("meshes %lld rejected %lld clouds %lld reports %lld manifest %s\n", static_cast<long long>(s.meshes),
                static_cast<long long>(s.rejected), static_cast<long long>(s.clouds),
                static_cast<long long>(s.reports), s.manifest.string().c_str());
  });
}

void add_report(CLI::App& app) {
  auto* cmd = app.add_subcommand("report", "Merge JSON reports into CSV and/or JSON");
  auto inputs = std::make_shared<std::vector<std::string>>();
  auto csv = std::make_shared<std::string>();
  auto json = std::make_shared<std::string>();
  cmd->add_option("reports", *inputs, "JSON report files, merged in order")->required();
  cmd->add_option("--csv", *csv, "CSV output");
  cmd->add_option("--json", *json, "JSON output");
  defer(cmd, [inputs, csv, json] {
    std::vector<ReportRow> rows;
    for (const auto& f : *inputs) {
      auto part = read_report_json(f);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    if (csv->empty() && json->empty()) std::cout << report_csv(rows);
    if (!csv->empty()) emit_report(rows, ReportFormat::csv, *csv);
    if (!json->empty()) emit_report(rows, ReportFormat::json, *json);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scanning benchmark for surface reconstruction"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Global seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "Pipeline config (JSON)");
  add_filter(app, g);
  add_complexity(app);
  add_scan(app, g);
  add_perturb(app, g);
  add_preprocess(app);
  add_eval(app, g);
  add_nfs_train(app, g);
  add_nfs_eval(app, g);
  bool seed_given = false;
  add_pipeline(app, g, seed_given);
  add_report(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  set_thread_count(g.threads);
  seed_given = app.count("--seed") > 0;
  try {
    if (g_pending) g_pending();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
