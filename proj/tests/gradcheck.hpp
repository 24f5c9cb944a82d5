#pragma once

#include "surfbench/nfs.hpp"
#include "surfbench/rng.hpp"

#include <algorithm>
#include <cmath>

namespace test {

using namespace surfbench;

struct GradCheck {
  double max_rel_error = 0.0;
  double max_abs_gradient = 0.0;
  Index checked = 0;
  Index kinks = 0;  ///< probes whose interval crosses a LeakyReLU kink (excluded)
};

/// Sign pattern of every hidden pre-activation.
inline std::vector<bool> activation_pattern(const Mlp& net, const Eigen::MatrixXd& input) {
  const auto tape = net.forward_tape(input);
  std::vector<bool> out;
  for (std::size_t l = 0; l + 1 < tape.pre.size(); ++l)
    for (Index i = 0; i < tape.pre[l].size(); ++i) out.push_back(tape.pre[l].data()[i] > 0.0);
  return out;
}

/// Central differences of the contrastive loss against the analytic gradient.
/// Checks every parameter when `samples` covers them all, else a seeded subset.
/// Relative error is |a - n| / max(|a|, |n|, floor). A difference quotient
/// across a LeakyReLU kink does not approximate the derivative; such probes
/// are counted and left out.
inline GradCheck gradient_check(const Mlp& net, const Eigen::MatrixXd& patches, const std::vector<PatchPair>& pairs,
                                double h, Index samples, std::uint64_t seed, double floor = 1e-7) {
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  loss_and_gradient(net, patches, pairs, &gw, &gb);
  Mlp probe = net;
  GradCheck out;
  auto check_one = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss_and_gradient(probe, patches, pairs, nullptr, nullptr);
    const auto up_pattern = activation_pattern(probe, patches);
    param = saved - h;
    const double down = loss_and_gradient(probe, patches, pairs, nullptr, nullptr);
    const bool kink = activation_pattern(probe, patches) != up_pattern;
    param = saved;
    if (kink) {
      ++out.kinks;
      return;
    }
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic - numeric) / scale);
    out.max_abs_gradient = std::max(out.max_abs_gradient, std::abs(analytic));
    ++out.checked;
  };
  const Index total = net.parameter_count();
  if (samples >= total) {
    for (int l = 0; l < net.layer_count(); ++l) {
      for (Index i = 0; i < probe.weights[l].size(); ++i) check_one(probe.weights[l].data()[i], gw[l].data()[i]);
      for (Index i = 0; i < probe.biases[l].size(); ++i) check_one(probe.biases[l][i], gb[l][i]);
    }
    return out;
  }
  Rng rng(seed);
  for (Index s = 0; s < samples; ++s) {
    const int l = static_cast<int>(rng.below(static_cast<std::uint64_t>(net.layer_count())));
    const Index nw = probe.weights[l].size();
    const Index pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(nw + probe.biases[l].size())));
    if (pick < nw) check_one(probe.weights[l].data()[pick], gw[l].data()[pick]);
    else check_one(probe.biases[l][pick - nw], gb[l][pick - nw]);
  }
  return out;
}

}  // namespace test
