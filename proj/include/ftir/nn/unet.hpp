#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftir/nn/tape.hpp"
#include "ftir/nn/tensor.hpp"

namespace ftir::nn {

struct UnetConfig {
  int depth = 3;
  int base_channels = 8;
  int kernel = 3;
  bool residual_bottleneck = true;
  bool channel_attention = false;
  /// Adds the network input to the output (the net learns a correction).
  bool input_residual = false;
  std::uint64_t seed = 0;

  bool operator==(const UnetConfig&) const = default;
};

void validate(const UnetConfig& cfg);

/// FNV-1a over the architecture fields. The seed only changes the initial
/// values, so it is not part of the fingerprint.
std::uint64_t fingerprint(const UnetConfig& cfg);
std::string fingerprint_hex(const UnetConfig& cfg);

struct ParamSpec {
  std::string name;
  std::vector<std::size_t> shape;
};

/// Ordered parameter list; weights are (K, Cin, Cout), biases (Cout).
std::vector<ParamSpec> param_layout(const UnetConfig& cfg);
std::size_t param_count(const UnetConfig& cfg);

struct NamedTensor {
  std::string name;
  Tensor value;

  bool operator==(const NamedTensor&) const = default;
};

struct ModelParams {
  UnetConfig config;
  std::vector<NamedTensor> tensors;

  std::size_t count() const;
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  bool operator==(const ModelParams&) const = default;
};

/// Glorot-uniform weights, zero biases, drawn from cfg.seed.
ModelParams init_params(const UnetConfig& cfg);
ModelParams zero_params(const UnetConfig& cfg);

/// Throws ConfigFingerprintMismatch unless params were built for cfg's
/// architecture, ShapeMismatch if a tensor deviates from the layout.
void check_params(const ModelParams& params, const UnetConfig& cfg);

/// Places every parameter on the tape, as leaves when trainable.
std::vector<Var> bind_params(Tape& tape, const ModelParams& params, bool trainable);

/// Records the network on `tape`; x is (B, L, 1) with L divisible by 2^depth.
Var unet_graph(Tape& tape, const UnetConfig& cfg, const std::vector<Var>& params, Var x);

/// Inference without gradient bookkeeping.
Tensor unet_forward(const ModelParams& params, const UnetConfig& cfg, const Tensor& batch);

double mse_loss(const Tensor& pred, const Tensor& target);

struct AdadeltaConfig {
  double lr = 0.05;
  double rho = 0.95;
  double eps = 1e-6;
  /// When true the E[dx^2] accumulator sees the lr-scaled step; otherwise
  /// it sees the unit-free update before lr scaling.
  bool scale_accumulator = false;

  bool operator==(const AdadeltaConfig&) const = default;
};

struct OptimState {
  AdadeltaConfig hp;
  std::vector<Tensor> eg2;
  std::vector<Tensor> edx2;

  bool operator==(const OptimState&) const = default;
};

OptimState make_optim_state(const ModelParams& params, const AdadeltaConfig& hp = {});
void adadelta_step(ModelParams& params, const std::vector<Tensor>& grads, OptimState& state);

}  // namespace ftir::nn
