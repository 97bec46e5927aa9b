#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ftir/nn/unet.hpp"

namespace ftir::nn {

/// Aligned (N, L, 1) input and target tensors.
struct Dataset {
  Tensor inputs;
  Tensor targets;

  std::size_t size() const { return inputs.rank() ? inputs.dim(0) : 0; }
  std::size_t length() const { return inputs.rank() ? inputs.dim(1) : 0; }
};

Dataset make_dataset(const std::vector<std::vector<double>>& inputs, const std::vector<std::vector<double>>& targets);
Dataset subset(const Dataset& d, const std::vector<std::size_t>& rows);
/// Rows `rows` of an (N, L, C) tensor.
Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& rows);

/// Seeded (train_rows, val_rows) partition of n rows, both sorted; each
/// side keeps at least one row.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_rows(std::size_t n, double fraction,
                                                                            std::uint64_t seed);

/// Seeded disjoint split; each side keeps at least one row when N >= 2.
std::pair<Dataset, Dataset> split_validation(const Dataset& d, double fraction, std::uint64_t seed);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t patience = 30;
  std::size_t max_epochs = 500;
  std::uint64_t shuffle_seed = 0;
  double val_fraction = 0.15;
  AdadeltaConfig optim;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  ModelParams params;  // weights from the best validation epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
};

struct LossAndGrads {
  double loss = 0.0;
  std::vector<Tensor> grads;  // aligned with params.tensors
};

LossAndGrads loss_and_grads(const ModelParams& params, const Tensor& inputs, const Tensor& targets);

/// Batched inference over an (N, L, 1) tensor.
Tensor predict(const ModelParams& params, const Tensor& inputs, std::size_t batch_size = 64);

/// Mean squared error over every element of the dataset.
double dataset_loss(const ModelParams& params, const Dataset& d, std::size_t batch_size = 64);

TrainResult train(const UnetConfig& cfg, const Dataset& train_set, const Dataset& val_set, const TrainConfig& tcfg);

/// Continues from given weights instead of a fresh initialization.
TrainResult train_from(ModelParams start, const Dataset& train_set, const Dataset& val_set, const TrainConfig& tcfg);

}  // namespace ftir::nn
