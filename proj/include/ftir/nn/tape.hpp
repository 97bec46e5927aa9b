#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ftir/nn/tensor.hpp"

namespace ftir::nn {

class Tape;

/// Handle to a node on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode differentiation over tensor ops. Every op appends a node;
/// backward() walks the nodes in reverse creation order, so gradient
/// accumulation order is fixed. A tape built with record = false only
/// computes values (inference).
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf that receives a gradient.
  Var leaf(Tensor value);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  /// Gradient of the last backward() target w.r.t. v (zeros if unreached).
  const Tensor& grad(Var v) const;

  /// 'same' zero-padded 1-D convolution, stride 1.
  /// x: (B, L, Cin), w: (K, Cin, Cout), b: (Cout) -> (B, L, Cout).
  Var conv1d(Var x, Var w, Var b);
  Var relu(Var x);
  Var sigmoid(Var x);
  /// Max over non-overlapping pairs along the length axis.
  Var maxpool2(Var x);
  /// Nearest-neighbour x2 along the length axis.
  Var upsample2(Var x);
  /// Channel-wise concatenation.
  Var concat(Var a, Var b);
  Var add(Var a, Var b);
  /// (B, L, C) -> (B, 1, C) mean over length.
  Var mean_length(Var x);
  /// x (B, L, C) scaled by g (B, 1, C).
  Var scale_channels(Var x, Var g);
  /// Mean squared error, scalar of shape (1).
  Var mse(Var pred, Var target);

  /// Seeds d(loss)/d(loss) = 1 and propagates. A tape can be consumed once.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    std::function<void()> backward;
  };

  Var push(Tensor value, bool needs_grad);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  Tensor& grad_ref(Var v);

  bool record_;
  bool consumed_ = false;
  std::vector<Node> nodes_;
};

}  // namespace ftir::nn
