#include "surfbench/nfs.hpp"

#include "surfbench/cloud_ops.hpp"
#include "surfbench/kdtree.hpp"
#include "surfbench/mesh.hpp"
#include "surfbench/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace surfbench {

void PatchParams::check() const {
  if (points_per_patch < 3) throw ValidationError("patches need at least 3 points");
  if (patch_count < 1) throw ValidationError("patch count must be positive");
  if (!(radius_fraction > 0.0)) throw ValidationError("patch radius must be positive");
}

PointsT<double> canonicalize_patch(const Points& points) {
  const Index n = points.rows();
  if (n < 3) throw ValidationError("patches need at least 3 points");
  const Vector3d centroid = points.colwise().mean().transpose();
  Points centered = points.rowwise() - centroid.transpose();
  const Matrix3d cov = centered.transpose() * centered / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Matrix3d> eig(cov);
  Matrix3d axes;
  for (int c = 0; c < 3; ++c) axes.col(c) = eig.eigenvectors().col(2 - c);
  Points out = centered * axes;
  for (int c = 0; c < 3; ++c) {
    double third = 0.0;
    for (Index i = 0; i < n; ++i) third += out(i, c) * out(i, c) * out(i, c);
    if (third < 0.0) out.col(c) = -out.col(c);
  }
  double radius = 0.0;
  for (Index i = 0; i < n; ++i) radius = std::max(radius, row3(out, i).norm());
  if (!(radius > 0.0)) throw ValidationError("patch collapses to a point");
  out /= radius;
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (int c = 0; c < 3; ++c)
      if (out(a, c) != out(b, c)) return out(a, c) < out(b, c);
    return a < b;
  });
  Points sorted(n, 3);
  for (Index i = 0; i < n; ++i) sorted.row(i) = out.row(order[i]);
  return sorted;
}

std::vector<Patch> extract_patches(const PointCloud& cloud, const PatchParams& params, std::uint64_t seed,
                                   std::vector<Index>* skipped_centers) {
  params.check();
  if (cloud.empty()) throw ValidationError("cannot extract patches from an empty cloud");
  const Vector3d mid = bounding_box(cloud.positions).center();
  double bound = 0.0;
  for (Index i = 0; i < cloud.size(); ++i) bound = std::max(bound, (cloud.point(i) - mid).norm());
  const double radius = params.radius_fraction * bound;
  const auto centers = fps_indices(cloud.positions, std::min(params.patch_count, cloud.size()));
  const KdTree tree(cloud.positions);
  std::vector<Patch> out;
  if (skipped_centers) skipped_centers->clear();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const Vector3d center = cloud.point(centers[c]);
    const auto found = tree.radius_search(center, radius);
    if (static_cast<Index>(found.size()) < params.points_per_patch) {
      if (skipped_centers) skipped_centers->push_back(centers[c]);
      continue;
    }
    const auto pick = random_indices(static_cast<Index>(found.size()), params.points_per_patch, sub_seed(seed, "patch", c));
    Points raw(params.points_per_patch, 3);
    for (Index i = 0; i < params.points_per_patch; ++i) raw.row(i) = cloud.positions.row(found[pick[i]].index);
    out.push_back({canonicalize_patch(raw), center, 0});
  }
  return out;
}

Mlp Mlp::init(Index input_dim, Index width, int layers, std::uint64_t seed, double slope) {
  if (input_dim < 1 || width < 1 || layers < 1) throw ValidationError("network shape must be positive");
  Mlp net;
  net.slope = slope;
  Rng rng(seed);
  Index fan_in = input_dim;
  for (int l = 0; l < layers; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(width, fan_in);
    // Row-major fill so the stream does not depend on Eigen's storage order.
    for (Index r = 0; r < width; ++r)
      for (Index c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    Eigen::VectorXd b(width);
    for (Index r = 0; r < width; ++r) b[r] = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
    fan_in = width;
  }
  return net;
}

Index Mlp::parameter_count() const {
  Index n = 0;
  for (int l = 0; l < layer_count(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

void Mlp::check() const {
  if (weights.empty() || weights.size() != biases.size()) throw ValidationError("network has no layers");
  for (int l = 0; l < layer_count(); ++l) {
    if (biases[l].size() != weights[l].rows()) throw ValidationError("bias size does not match layer");
    if (l > 0 && weights[l].cols() != weights[l - 1].rows()) throw ValidationError("layer shapes do not chain");
    if (!weights[l].allFinite() || !biases[l].allFinite()) throw ValidationError("non-finite network parameter");
  }
}

Mlp::Tape Mlp::forward_tape(const Eigen::MatrixXd& input) const {
  if (input.rows() != input_dim()) throw ValidationError("input size does not match the network");
  Tape tape;
  Eigen::MatrixXd a = input;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weights[l] * a;
    z.colwise() += biases[l];
    tape.inputs.push_back(std::move(a));
    if (l + 1 < layer_count()) a = z.unaryExpr([s = slope](double x) { return x > 0.0 ? x : s * x; });
    else a = z;
    tape.pre.push_back(std::move(z));
  }
  tape.output = std::move(a);
  return tape;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  if (input.rows() != input_dim()) throw ValidationError("input size does not match the network");
  Eigen::MatrixXd a = input;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weights[l] * a;
    z.colwise() += biases[l];
    if (l + 1 < layer_count()) a = z.unaryExpr([s = slope](double x) { return x > 0.0 ? x : s * x; });
    else a = std::move(z);
  }
  return a;
}

void Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_output, std::vector<Eigen::MatrixXd>& grad_w,
                   std::vector<Eigen::VectorXd>& grad_b) const {
  grad_w.resize(layer_count());
  grad_b.resize(layer_count());
  Eigen::MatrixXd da = grad_output;
  for (int l = layer_count() - 1; l >= 0; --l) {
    Eigen::MatrixXd dz = da;
    if (l + 1 < layer_count())
      dz.array() *= tape.pre[l].unaryExpr([s = slope](double x) { return x > 0.0 ? 1.0 : s; }).array();
    grad_w[l] = dz * tape.inputs[l].transpose();
    grad_b[l] = dz.rowwise().sum();
    if (l > 0) da = weights[l].transpose() * dz;
  }
}

Eigen::MatrixXd patch_matrix(const std::vector<Patch>& patches) {
  if (patches.empty()) return {};
  const Index m = patches.front().points.rows();
  Eigen::MatrixXd out(3 * m, static_cast<Index>(patches.size()));
  for (std::size_t j = 0; j < patches.size(); ++j) {
    if (patches[j].points.rows() != m) throw ValidationError("patches differ in point count");
    // Row-major storage flattens as x0 y0 z0 x1 ...
    out.col(static_cast<Index>(j)) = Eigen::Map<const Eigen::VectorXd>(patches[j].points.data(), 3 * m);
  }
  return out;
}

Eigen::VectorXd feature(const Mlp& net, const Patch& patch) {
  const Eigen::VectorXd f = net.forward(patch_matrix({patch})).col(0);
  if (!(f.norm() > 0.0)) throw ValidationError("degenerate (zero) feature vector");
  return f;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw ValidationError("degenerate (zero) feature vector");
  return a.dot(b) / (na * nb);
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double contrastive_loss(const Eigen::MatrixXd& features, const std::vector<PatchPair>& pairs, Eigen::MatrixXd* grad) {
  const Eigen::VectorXd norms = features.colwise().norm().transpose();
  if (grad) grad->setZero(features.rows(), features.cols());
  double loss = 0.0;
  for (const auto& pair : pairs) {
    const double na = norms[pair.a], nb = norms[pair.b];
    if (!(na > 0.0) || !(nb > 0.0)) throw ValidationError("degenerate (zero) feature vector");
    const double c = features.col(pair.a).dot(features.col(pair.b)) / (na * nb);
    const double slope = pair.same_surface ? sign(c - 1.0) : sign(c);
    loss += pair.same_surface ? std::abs(c - 1.0) : std::abs(c);
    if (grad && slope != 0.0) {
      grad->col(pair.a) += slope * (features.col(pair.b) / (na * nb) - c / (na * na) * features.col(pair.a));
      grad->col(pair.b) += slope * (features.col(pair.a) / (na * nb) - c / (nb * nb) * features.col(pair.b));
    }
  }
  return loss;
}

double loss_and_gradient(const Mlp& net, const Eigen::MatrixXd& patches, const std::vector<PatchPair>& pairs,
                         std::vector<Eigen::MatrixXd>* grad_w, std::vector<Eigen::VectorXd>* grad_b) {
  if (!grad_w || !grad_b) return contrastive_loss(net.forward(patches), pairs);
  const auto tape = net.forward_tape(patches);
  Eigen::MatrixXd grad;
  const double loss = contrastive_loss(tape.output, pairs, &grad);
  net.backward(tape, grad, *grad_w, *grad_b);
  return loss;
}

Adam::Adam(const Mlp& net, AdamConfig config) : config_(config) {
  for (int l = 0; l < net.layer_count(); ++l) {
    mw_.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    vw_.push_back(mw_.back());
    mb_.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    vb_.push_back(mb_.back());
  }
}

namespace {

template <typename P, typename G>
void adam_update(P& param, const G& g, P& m, P& v, double b1, double b2, double eps, double c1, double c2, double lr) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

void Adam::step(Mlp& net, const std::vector<Eigen::MatrixXd>& grad_w, const std::vector<Eigen::VectorXd>& grad_b,
                double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (int l = 0; l < net.layer_count(); ++l) {
    adam_update(net.weights[l], grad_w[l], mw_[l], vw_[l], config_.beta1, config_.beta2, config_.epsilon, c1, c2, lr);
    adam_update(net.biases[l], grad_b[l], mb_[l], vb_[l], config_.beta1, config_.beta2, config_.epsilon, c1, c2, lr);
  }
}

void TrainConfig::check() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (halving_period < 1 || epochs < 1) throw ValidationError("epoch counts must be positive");
  if (width < 1 || layers < 1) throw ValidationError("network shape must be positive");
  if (negatives_per_epoch < 0) throw ValidationError("negative pair count must be non-negative");
  patches.check();
}

double learning_rate(const TrainConfig& cfg, int epoch) {
  return cfg.learning_rate * std::ldexp(1.0, -(epoch / cfg.halving_period));
}

namespace {

Index nearest_center(const std::vector<Patch>& patches, std::size_t begin, std::size_t end, const Vector3d& c) {
  Index best = -1;
  double best_d = 0.0;
  for (std::size_t j = begin; j < end; ++j) {
    const double d = dist2(patches[j].center.data(), c.data());
    if (best < 0 || d < best_d) {
      best = static_cast<Index>(j);
      best_d = d;
    }
  }
  return best;
}

}  // namespace

TrainResult train_nfs(const std::vector<TrainingCloud>& corpus, const TrainConfig& cfg) {
  cfg.check();
  TrainResult result;
  std::vector<std::size_t> first(corpus.size() + 1, 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto patches = extract_patches(corpus[i].cloud, cfg.patches, sub_seed(cfg.seed, "train-patches", i));
    for (auto& p : patches) p.surface = corpus[i].surface;
    result.patches.insert(result.patches.end(), patches.begin(), patches.end());
    first[i + 1] = result.patches.size();
  }
  std::vector<PatchPair> positives;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    // Next cloud of the same surface, if any.
    std::size_t j = i + 1;
    while (j < corpus.size() && corpus[j].surface != corpus[i].surface) ++j;
    if (j == corpus.size() || first[j] == first[j + 1]) continue;
    for (std::size_t a = first[i]; a < first[i + 1]; ++a)
      positives.push_back({static_cast<Index>(a), nearest_center(result.patches, first[j], first[j + 1],
                                                                 result.patches[a].center), true});
  }
  const auto& patches = result.patches;
  bool has_cross = false;
  for (const auto& p : patches) has_cross = has_cross || p.surface != patches.front().surface;
  const Index negatives = has_cross ? (cfg.negatives_per_epoch > 0 ? cfg.negatives_per_epoch
                                                                   : static_cast<Index>(positives.size()))
                                    : 0;
  if (positives.empty() && negatives == 0) throw ValidationError("training corpus yields no patch pairs");

  const Eigen::MatrixXd input = patch_matrix(patches);
  Mlp net = Mlp::init(input.rows(), cfg.width, cfg.layers, sub_seed(cfg.seed, "nfs-init"), cfg.slope);
  Adam adam(net, cfg.adam);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  const auto count = static_cast<std::uint64_t>(patches.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<PatchPair> pairs = positives;
    Rng rng(sub_seed(cfg.seed, "nfs-negatives", static_cast<std::uint64_t>(epoch)));
    while (static_cast<Index>(pairs.size()) < static_cast<Index>(positives.size()) + negatives) {
      const auto a = static_cast<Index>(rng.below(count)), b = static_cast<Index>(rng.below(count));
      if (patches[a].surface != patches[b].surface) pairs.push_back({a, b, false});
    }
    const double loss = loss_and_gradient(net, input, pairs, &gw, &gb);
    if (!std::isfinite(loss)) throw ValidationError("non-finite training loss at epoch " + std::to_string(epoch));
    result.loss.push_back(loss);
    adam.step(net, gw, gb, learning_rate(cfg, epoch));
  }
  result.model = {std::move(net), cfg.patches};
  return result;
}

double nfs(const NfsModel& model, const PointCloud& p, const PointCloud& q, std::uint64_t seed) {
  model.net.check();
  const auto pp = extract_patches(p, model.patches, seed);
  const auto qp = extract_patches(q, model.patches, seed);
  if (pp.empty() || qp.empty()) throw ValidationError("no patch could be extracted for the similarity");
  const Eigen::MatrixXd fp = model.net.forward(patch_matrix(pp));
  const Eigen::MatrixXd fq = model.net.forward(patch_matrix(qp));
  auto direction = [](const std::vector<Patch>& from, const Eigen::MatrixXd& ff, const std::vector<Patch>& to,
                      const Eigen::MatrixXd& ft) {
    double sum = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      const Index j = nearest_center(to, 0, to.size(), from[i].center);
      sum += cosine(ff.col(static_cast<Index>(i)), ft.col(j));
    }
    return sum / static_cast<double>(from.size());
  };
  const double forward = direction(pp, fp, qp, fq);
  const double backward = direction(qp, fq, pp, fp);
  return std::clamp(0.5 * (forward + backward), -1.0, 1.0);
}

namespace {

constexpr char kMagic[8] = {'S', 'B', 'N', 'F', 'S', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError("truncated model checkpoint");
  return value;
}

}  // namespace

void write_model(const std::filesystem::path& path, const NfsModel& model) {
  model.net.check();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(model.patches.points_per_patch));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(model.patches.patch_count));
  put<double>(out, model.patches.radius_fraction);
  put<double>(out, model.net.slope);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.net.layer_count()));
  for (int l = 0; l < model.net.layer_count(); ++l) {
    const auto& w = model.net.weights[l];
    put<std::uint64_t>(out, static_cast<std::uint64_t>(w.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(w.cols()));
    for (Index r = 0; r < w.rows(); ++r)
      for (Index c = 0; c < w.cols(); ++c) put<double>(out, w(r, c));
    for (Index r = 0; r < w.rows(); ++r) put<double>(out, model.net.biases[l][r]);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

NfsModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw IoError(path.string() + " is not a model checkpoint");
  if (get<std::uint32_t>(in) != kVersion) throw IoError("unsupported checkpoint version in " + path.string());
  NfsModel model;
  model.patches.points_per_patch = static_cast<Index>(get<std::uint64_t>(in));
  model.patches.patch_count = static_cast<Index>(get<std::uint64_t>(in));
  model.patches.radius_fraction = get<double>(in);
  model.net.slope = get<double>(in);
  const auto layers = get<std::uint32_t>(in);
  if (layers == 0 || layers > 1024) throw IoError("implausible layer count in " + path.string());
  for (std::uint32_t l = 0; l < layers; ++l) {
    const auto rows = get<std::uint64_t>(in), cols = get<std::uint64_t>(in);
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) throw IoError("implausible layer shape");
    Eigen::MatrixXd w(rows, cols);
    for (Index r = 0; r < w.rows(); ++r)
      for (Index c = 0; c < w.cols(); ++c) w(r, c) = get<double>(in);
    Eigen::VectorXd b(rows);
    for (Index r = 0; r < b.size(); ++r) b[r] = get<double>(in);
    model.net.weights.push_back(std::move(w));
    model.net.biases.push_back(std::move(b));
  }
  model.net.check();
  model.patches.check();
  return model;
}

}  // namespace surfbench
