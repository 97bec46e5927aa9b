#pragma once

// Central finite-difference check of the Unet gradient.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ftir/nn/train.hpp"

namespace testing {

struct GradCheck {
  std::size_t checked = 0;
  double max_rel_error = 0.0;
};

inline double fd_loss(const ftir::nn::ModelParams& p, const ftir::nn::Tensor& x, const ftir::nn::Tensor& t) {
  return ftir::nn::mse_loss(ftir::nn::unet_forward(p, p.config, x), t);
}

/// Relative error |a - n| / max(|a|, |n|, floor) at `n_params` parameters
/// drawn uniformly over all tensors.
inline GradCheck unet_gradient_check(const ftir::nn::UnetConfig& cfg, std::size_t batch, std::size_t length,
                                     std::size_t n_params, std::uint64_t seed, double h = 1e-4,
                                     double floor = 1e-6) {
  using namespace ftir::nn;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelParams params = init_params(cfg);
  // Nonzero biases so every unit is exercised away from its initial state.
  for (auto& t : params.tensors)
    if (t.value.rank() == 1)
      for (auto& v : t.value.vec()) v = 0.1 * u(rng);
  Tensor x({batch, length, 1}), target({batch, length, 1});
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(0.2 * static_cast<double>(i)) + 0.3 * u(rng);
    target[i] = u(rng);
  }
  const LossAndGrads lg = loss_and_grads(params, x, target);

  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t ti = 0; ti < params.tensors.size(); ++ti)
    for (std::size_t j = 0; j < params.tensors[ti].value.size(); ++j) all.emplace_back(ti, j);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(n_params, all.size()));

  GradCheck r;
  for (auto [ti, j] : all) {
    ModelParams p = params;
    double& w = p.tensors[ti].value[j];
    const double w0 = w;
    w = w0 + h;
    const double lp = fd_loss(p, x, target);
    w = w0 - h;
    const double lm = fd_loss(p, x, target);
    const double numeric = (lp - lm) / (2.0 * h);
    const double analytic = lg.grads[ti][j];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    r.max_rel_error = std::max(r.max_rel_error, std::abs(analytic - numeric) / denom);
    ++r.checked;
  }
  return r;
}

}  // namespace testing
