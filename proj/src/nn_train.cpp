#include "ftir/nn/train.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <numeric>

#include "ftir/rng.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace ftir::nn {

namespace {

void permute(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// Activation buffers are large and short-lived; served by mmap they cost a
// page-fault storm per step.
void keep_buffers_in_heap() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
  });
#endif
}

void check_dataset(const Dataset& d, const char* what) {
  if (d.size() == 0) fail(ErrorCode::EmptyDataset, std::string(what) + " set is empty");
  if (d.inputs.shape() != d.targets.shape())
    fail(ErrorCode::ShapeMismatch, std::string(what) + " inputs " + shape_string(d.inputs.shape()) +
                                       " vs targets " + shape_string(d.targets.shape()));
}

}  // namespace

Dataset make_dataset(const std::vector<std::vector<double>>& inputs,
                     const std::vector<std::vector<double>>& targets) {
  if (inputs.size() != targets.size())
    fail(ErrorCode::LengthMismatch, "inputs and targets differ in count");
  if (inputs.empty()) fail(ErrorCode::EmptyDataset, "no spectra");
  const std::size_t n = inputs.size(), len = inputs.front().size();
  Dataset d{Tensor({n, len, 1}), Tensor({n, len, 1})};
  for (std::size_t i = 0; i < n; ++i) {
    if (inputs[i].size() != len || targets[i].size() != len)
      fail(ErrorCode::LengthMismatch, "spectrum " + std::to_string(i) + " has a different length");
    std::copy(inputs[i].begin(), inputs[i].end(), d.inputs.data() + i * len);
    std::copy(targets[i].begin(), targets[i].end(), d.targets.data() + i * len);
  }
  return d;
}

Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> shape = t.shape();
  const std::size_t stride = t.size() / shape.at(0);
  shape[0] = rows.size();
  Tensor out(shape);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= t.dim(0)) fail(ErrorCode::ShapeMismatch, "row index out of range");
    std::copy(t.data() + rows[r] * stride, t.data() + (rows[r] + 1) * stride, out.data() + r * stride);
  }
  return out;
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& rows) {
  return {gather_rows(d.inputs, rows), gather_rows(d.targets, rows)};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_rows(std::size_t n, double fraction,
                                                                            std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorCode::InvalidConfig, "validation fraction must be in (0, 1)");
  if (n < 2) fail(ErrorCode::EmptyDataset, "need at least 2 spectra to hold out a validation set");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(seed, Stream::split);
  permute(idx, rng);
  auto n_val = static_cast<std::size_t>(static_cast<double>(n) * fraction + 0.5);
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  std::vector<std::size_t> val(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> tr(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(val.begin(), val.end());
  std::sort(tr.begin(), tr.end());
  return {tr, val};
}

std::pair<Dataset, Dataset> split_validation(const Dataset& d, double fraction, std::uint64_t seed) {
  check_dataset(d, "split");
  const auto [tr, val] = validation_rows(d.size(), fraction, seed);
  return {subset(d, tr), subset(d, val)};
}

LossAndGrads loss_and_grads(const ModelParams& params, const Tensor& inputs, const Tensor& targets) {
  Tape tape;
  const auto vars = bind_params(tape, params, true);
  const Var x = tape.constant(inputs);
  const Var t = tape.constant(targets);
  const Var y = unet_graph(tape, params.config, vars, x);
  const Var loss = tape.mse(y, t);
  LossAndGrads out;
  out.loss = tape.value(loss)[0];
  tape.backward(loss);
  out.grads.reserve(vars.size());
  for (const Var v : vars) out.grads.push_back(tape.grad(v));
  return out;
}

Tensor predict(const ModelParams& params, const Tensor& inputs, std::size_t batch_size) {
  check_params(params, params.config);
  if (inputs.rank() != 3) fail(ErrorCode::ShapeMismatch, "predict expects (N, L, 1)");
  const std::size_t n = inputs.dim(0);
  Tensor out(inputs.shape());
  const std::size_t stride = inputs.size() / std::max<std::size_t>(n, 1);
  batch_size = std::max<std::size_t>(batch_size, 1);
  for (std::size_t s = 0; s < n; s += batch_size) {
    std::vector<std::size_t> rows(std::min(batch_size, n - s));
    std::iota(rows.begin(), rows.end(), s);
    const Tensor y = unet_forward(params, params.config, gather_rows(inputs, rows));
    std::copy(y.data(), y.data() + y.size(), out.data() + s * stride);
  }
  return out;
}

double dataset_loss(const ModelParams& params, const Dataset& d, std::size_t batch_size) {
  check_dataset(d, "evaluation");
  const Tensor y = predict(params, d.inputs, batch_size);
  return mse_loss(y, d.targets);
}

TrainResult train(const UnetConfig& cfg, const Dataset& train_set, const Dataset& val_set, const TrainConfig& tcfg) {
  return train_from(init_params(cfg), train_set, val_set, tcfg);
}

TrainResult train_from(ModelParams start, const Dataset& train_set, const Dataset& val_set, const TrainConfig& tcfg) {
  check_dataset(train_set, "training");
  check_dataset(val_set, "validation");
  if (tcfg.batch_size < 1) fail(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (tcfg.patience < 1) fail(ErrorCode::InvalidConfig, "patience must be >= 1");
  if (tcfg.max_epochs < 1) fail(ErrorCode::InvalidConfig, "max_epochs must be >= 1");

  keep_buffers_in_heap();
  ModelParams params = std::move(start);
  OptimState state = make_optim_state(params, tcfg.optim);
  TrainResult result;
  result.params = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(tcfg.shuffle_seed, Stream::shuffle, epoch);
    permute(order, rng);

    double weighted = 0.0;
    for (std::size_t s = 0; s < n; s += tcfg.batch_size) {
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(s),
                                          order.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + tcfg.batch_size)));
      const Dataset batch = subset(train_set, rows);
      const LossAndGrads lg = loss_and_grads(params, batch.inputs, batch.targets);
      weighted += lg.loss * static_cast<double>(rows.size());
      adadelta_step(params, lg.grads, state);
    }

    EpochRecord rec{epoch, weighted / static_cast<double>(n), dataset_loss(params, val_set)};
    result.history.push_back(rec);
    if (tcfg.on_epoch) tcfg.on_epoch(rec);

    if (rec.val_loss < result.best_val_loss) {
      result.best_val_loss = rec.val_loss;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= tcfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace ftir::nn
