#pragma once

#include "surfbench/point_cloud.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace surfbench {

struct PatchParams {
  Index points_per_patch = 256;
  Index patch_count = 64;
  /// Patch radius as a fraction of the cloud's bounding-sphere radius.
  double radius_fraction = 0.1;
  void check() const;
};

/// m points in a canonical frame: centroid at the origin, principal axes in
/// descending variance, each axis signed so the third moment is non-negative,
/// max norm 1, rows sorted lexicographically.
struct Patch {
  PointsT<double> points;
  Vector3d center;  ///< source point the patch was grown around (input frame)
  int surface = 0;
};

/// Canonicalizes an arbitrary point set (at least 3 points).
PointsT<double> canonicalize_patch(const Points& points);

/// Centers by FPS, then m seeded-random points inside the radius of each.
/// Centers with fewer than m points in range are skipped and listed.
std::vector<Patch> extract_patches(const PointCloud& cloud, const PatchParams& params, std::uint64_t seed,
                                   std::vector<Index>* skipped_centers = nullptr);

/// Plain fully connected network; LeakyReLU after every layer but the last.
/// Samples are columns.
class Mlp {
 public:
  Mlp() = default;
  static Mlp init(Index input_dim, Index width, int layers, std::uint64_t seed, double slope = 0.01);

  int layer_count() const { return static_cast<int>(weights.size()); }
  Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
  Index output_dim() const { return weights.empty() ? 0 : weights.back().rows(); }
  Index parameter_count() const;
  void check() const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;

  /// Forward pass keeping pre-activations, then backward from dL/d(output).
  struct Tape {
    std::vector<Eigen::MatrixXd> inputs;  ///< input of each layer
    std::vector<Eigen::MatrixXd> pre;     ///< pre-activation of each layer
    Eigen::MatrixXd output;
  };
  Tape forward_tape(const Eigen::MatrixXd& input) const;
  /// Gradients laid out like the parameters.
  void backward(const Tape& tape, const Eigen::MatrixXd& grad_output, std::vector<Eigen::MatrixXd>& grad_w,
                std::vector<Eigen::VectorXd>& grad_b) const;

  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  double slope = 0.01;
};

/// Flattens patches to columns (x0 y0 z0 x1 ...).
Eigen::MatrixXd patch_matrix(const std::vector<Patch>& patches);

/// Feature of one patch; throws ValidationError on a zero feature.
Eigen::VectorXd feature(const Mlp& net, const Patch& patch);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct PatchPair {
  Index a, b;
  bool same_surface;
};

/// sum over same-surface pairs of |cos - 1| plus sum over other pairs of |cos|.
double contrastive_loss(const Eigen::MatrixXd& features, const std::vector<PatchPair>& pairs,
                        Eigen::MatrixXd* grad = nullptr);

/// Loss and parameter gradient for a batch of patch columns.
double loss_and_gradient(const Mlp& net, const Eigen::MatrixXd& patches, const std::vector<PatchPair>& pairs,
                         std::vector<Eigen::MatrixXd>* grad_w, std::vector<Eigen::VectorXd>* grad_b);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(const Mlp& net, AdamConfig config = {});
  void step(Mlp& net, const std::vector<Eigen::MatrixXd>& grad_w, const std::vector<Eigen::VectorXd>& grad_b,
            double lr);
  long steps() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
  long t_ = 0;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int halving_period = 200;
  int epochs = 1000;
  AdamConfig adam;
  Index width = 256;
  int layers = 6;
  double slope = 0.01;
  PatchParams patches;
  /// Cross-surface pairs drawn per epoch; 0 means as many as same-surface pairs.
  Index negatives_per_epoch = 0;
  std::uint64_t seed = 0;
  void check() const;
};

/// Learning rate at a zero-based epoch.
double learning_rate(const TrainConfig& cfg, int epoch);

/// One cloud of a training surface; several clouds may share a surface id
/// (independent resamplings).
struct TrainingCloud {
  int surface;
  PointCloud cloud;
};

struct NfsModel {
  Mlp net;
  PatchParams patches;
};

struct TrainResult {
  NfsModel model;
  std::vector<double> loss;  ///< per epoch, before the step
  std::vector<Patch> patches;
};

/// Same-surface pairs match patches of consecutive clouds of one surface by
/// nearest center; cross-surface pairs are redrawn every epoch. One full-batch
/// Adam step per epoch. Throws ValidationError on a non-finite loss.
TrainResult train_nfs(const std::vector<TrainingCloud>& corpus, const TrainConfig& cfg);

/// Bidirectional nearest-center pairing of patches; mean of both directions'
/// mean cosine. Both clouds use the same extraction seed.
double nfs(const NfsModel& model, const PointCloud& p, const PointCloud& q, std::uint64_t seed);

void write_model(const std::filesystem::path& path, const NfsModel& model);
NfsModel read_model(const std::filesystem::path& path);

}  // namespace surfbench
