#include "ftir/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Core>

namespace ftir::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

void expect_rank3(const Tensor& t, const char* op) {
  if (t.rank() != 3) fail(ErrorCode::ShapeMismatch, std::string(op) + " expects (B, L, C), got " + shape_string(t.shape()));
}

// col[(b, l), k * Cin + ci] = x[b, l + k - K/2, ci], zero outside [0, L).
void im2col(const Tensor& x, std::size_t K, std::vector<double>& col) {
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  const auto half = static_cast<std::ptrdiff_t>(K / 2);
  col.assign(B * L * K * C, 0.0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t l = 0; l < L; ++l) {
      double* row = col.data() + (b * L + l) * K * C;
      for (std::size_t k = 0; k < K; ++k) {
        const auto src = static_cast<std::ptrdiff_t>(l) + static_cast<std::ptrdiff_t>(k) - half;
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(L)) continue;
        const double* in = x.data() + (b * L + static_cast<std::size_t>(src)) * C;
        std::copy(in, in + C, row + k * C);
      }
    }
}

void col2im_add(const std::vector<double>& dcol, std::size_t K, Tensor& dx) {
  const std::size_t B = dx.dim(0), L = dx.dim(1), C = dx.dim(2);
  const auto half = static_cast<std::ptrdiff_t>(K / 2);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t l = 0; l < L; ++l) {
      const double* row = dcol.data() + (b * L + l) * K * C;
      for (std::size_t k = 0; k < K; ++k) {
        const auto dst = static_cast<std::ptrdiff_t>(l) + static_cast<std::ptrdiff_t>(k) - half;
        if (dst < 0 || dst >= static_cast<std::ptrdiff_t>(L)) continue;
        double* out = dx.data() + (b * L + static_cast<std::size_t>(dst)) * C;
        for (std::size_t c = 0; c < C; ++c) out[c] += row[k * C + c];
      }
    }
}

}  // namespace

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ')';
  return os.str();
}

Var Tape::push(Tensor value, bool needs_grad) {
  nodes_.push_back(Node{std::move(value), Tensor(), needs_grad && record_, nullptr});
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Tensor value) { return push(std::move(value), false); }

Var Tape::leaf(Tensor value) { return push(std::move(value), true); }

Tensor& Tape::grad_ref(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

const Tensor& Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad.size() != n.value.size()) {
    auto& self = const_cast<Node&>(n);
    self.grad = Tensor(n.value.shape(), 0.0);
  }
  return n.grad;
}

Var Tape::conv1d(Var xv, Var wv, Var bv) {
  const Tensor& x = value(xv);
  const Tensor& w = value(wv);
  const Tensor& bias = value(bv);
  expect_rank3(x, "conv1d");
  if (w.rank() != 3 || w.dim(1) != x.dim(2) || bias.size() != w.dim(2) || w.dim(0) % 2 == 0)
    fail(ErrorCode::ShapeMismatch, "conv1d weight " + shape_string(w.shape()) + " incompatible with input " +
                                       shape_string(x.shape()));
  const std::size_t B = x.dim(0), L = x.dim(1), Cin = x.dim(2), K = w.dim(0), Cout = w.dim(2);
  const std::size_t rows = B * L;

  auto col = std::make_shared<std::vector<double>>();
  const double* col_ptr = x.data();
  if (K != 1) {
    im2col(x, K, *col);
    col_ptr = col->data();
  }
  Tensor y({B, L, Cout});
  MapMat Y(y.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(Cout));
  CMapMat X(col_ptr, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(K * Cin));
  CMapMat W(w.data(), static_cast<Eigen::Index>(K * Cin), static_cast<Eigen::Index>(Cout));
  Y.noalias() = X * W;
  Eigen::Map<const Eigen::RowVectorXd> bb(bias.data(), static_cast<Eigen::Index>(Cout));
  Y.rowwise() += bb;

  const bool ng = needs(xv) || needs(wv) || needs(bv);
  Var out = push(std::move(y), ng);
  if (!nodes_[out.id].needs_grad) return out;
  if (K == 1) col.reset();  // input tensor is the column matrix
  nodes_[out.id].backward = [this, xv, wv, bv, out, col, B, L, Cin, K, Cout, rows]() {
    const Tensor& dy = nodes_[out.id].grad;
    CMapMat dY(dy.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(Cout));
    const double* cp = col ? col->data() : nodes_[xv.id].value.data();
    CMapMat X(cp, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(K * Cin));
    if (needs(wv)) {
      Tensor& dw = grad_ref(wv);
      MapMat dW(dw.data(), static_cast<Eigen::Index>(K * Cin), static_cast<Eigen::Index>(Cout));
      dW.noalias() += X.transpose() * dY;
    }
    if (needs(bv)) {
      // Plain loop: Eigen's vectorized reduction order depends on buffer
      // alignment, which would make the sum vary between runs.
      Tensor& db = grad_ref(bv);
      const double* g = dy.data();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < Cout; ++c) db[c] += g[r * Cout + c];
    }
    if (needs(xv)) {
      const Tensor& w = nodes_[wv.id].value;
      CMapMat W(w.data(), static_cast<Eigen::Index>(K * Cin), static_cast<Eigen::Index>(Cout));
      Tensor& dx = grad_ref(xv);
      if (K == 1) {
        MapMat dX(dx.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(Cin));
        dX.noalias() += dY * W.transpose();
      } else {
        std::vector<double> dcol(rows * K * Cin);
        MapMat dC(dcol.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(K * Cin));
        dC.noalias() = dY * W.transpose();
        col2im_add(dcol, K, dx);
      }
    }
  };
  return out;
}

Var Tape::relu(Var xv) {
  const Tensor& x = value(xv);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  Var out = push(std::move(y), needs(xv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, xv, out]() {
    const Tensor& x = nodes_[xv.id].value;
    const Tensor& dy = nodes_[out.id].grad;
    Tensor& dx = grad_ref(xv);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > 0.0) dx[i] += dy[i];
  };
  return out;
}

Var Tape::sigmoid(Var xv) {
  const Tensor& x = value(xv);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
  Var out = push(std::move(y), needs(xv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, xv, out]() {
    const Tensor& y = nodes_[out.id].value;
    const Tensor& dy = nodes_[out.id].grad;
    Tensor& dx = grad_ref(xv);
    for (std::size_t i = 0; i < y.size(); ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
  };
  return out;
}

Var Tape::maxpool2(Var xv) {
  const Tensor& x = value(xv);
  expect_rank3(x, "maxpool2");
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  if (L % 2 != 0) fail(ErrorCode::ShapeMismatch, "maxpool2 needs an even length, got " + std::to_string(L));
  const std::size_t Lh = L / 2;
  Tensor y({B, Lh, C});
  auto arg = std::make_shared<std::vector<std::size_t>>(y.size());
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t l = 0; l < Lh; ++l)
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i0 = (b * L + 2 * l) * C + c;
        const std::size_t i1 = i0 + C;
        const std::size_t o = (b * Lh + l) * C + c;
        const std::size_t pick = x[i1] > x[i0] ? i1 : i0;
        y[o] = x[pick];
        (*arg)[o] = pick;
      }
  Var out = push(std::move(y), needs(xv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, xv, out, arg]() {
    const Tensor& dy = nodes_[out.id].grad;
    Tensor& dx = grad_ref(xv);
    for (std::size_t o = 0; o < dy.size(); ++o) dx[(*arg)[o]] += dy[o];
  };
  return out;
}

Var Tape::upsample2(Var xv) {
  const Tensor& x = value(xv);
  expect_rank3(x, "upsample2");
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  Tensor y({B, 2 * L, C});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t l = 0; l < L; ++l) {
      const double* in = x.data() + (b * L + l) * C;
      double* o0 = y.data() + (b * 2 * L + 2 * l) * C;
      std::copy(in, in + C, o0);
      std::copy(in, in + C, o0 + C);
    }
  Var out = push(std::move(y), needs(xv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, xv, out, B, L, C]() {
    const Tensor& dy = nodes_[out.id].grad;
    Tensor& dx = grad_ref(xv);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t l = 0; l < L; ++l) {
        double* d = dx.data() + (b * L + l) * C;
        const double* g0 = dy.data() + (b * 2 * L + 2 * l) * C;
        for (std::size_t c = 0; c < C; ++c) d[c] += g0[c] + g0[C + c];
      }
  };
  return out;
}

Var Tape::concat(Var av, Var bv) {
  const Tensor& a = value(av);
  const Tensor& b = value(bv);
  expect_rank3(a, "concat");
  expect_rank3(b, "concat");
  if (a.dim(0) != b.dim(0) || a.dim(1) != b.dim(1))
    fail(ErrorCode::ShapeMismatch, "concat " + shape_string(a.shape()) + " with " + shape_string(b.shape()));
  const std::size_t rows = a.dim(0) * a.dim(1), Ca = a.dim(2), Cb = b.dim(2);
  Tensor y({a.dim(0), a.dim(1), Ca + Cb});
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(a.data() + r * Ca, a.data() + (r + 1) * Ca, y.data() + r * (Ca + Cb));
    std::copy(b.data() + r * Cb, b.data() + (r + 1) * Cb, y.data() + r * (Ca + Cb) + Ca);
  }
  Var out = push(std::move(y), needs(av) || needs(bv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, av, bv, out, rows, Ca, Cb]() {
    const Tensor& dy = nodes_[out.id].grad;
    if (needs(av)) {
      Tensor& da = grad_ref(av);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < Ca; ++c) da[r * Ca + c] += dy[r * (Ca + Cb) + c];
    }
    if (needs(bv)) {
      Tensor& db = grad_ref(bv);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < Cb; ++c) db[r * Cb + c] += dy[r * (Ca + Cb) + Ca + c];
    }
  };
  return out;
}

Var Tape::add(Var av, Var bv) {
  const Tensor& a = value(av);
  const Tensor& b = value(bv);
  if (a.shape() != b.shape())
    fail(ErrorCode::ShapeMismatch, "add " + shape_string(a.shape()) + " + " + shape_string(b.shape()));
  Tensor y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  Var out = push(std::move(y), needs(av) || needs(bv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, av, bv, out]() {
    const Tensor& dy = nodes_[out.id].grad;
    if (needs(av)) {
      Tensor& da = grad_ref(av);
      for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
    }
    if (needs(bv)) {
      Tensor& db = grad_ref(bv);
      for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i];
    }
  };
  return out;
}

Var Tape::mean_length(Var xv) {
  const Tensor& x = value(xv);
  expect_rank3(x, "mean_length");
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  Tensor y({B, 1, C});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t c = 0; c < C; ++c) y[b * C + c] += x[(b * L + l) * C + c];
    for (std::size_t c = 0; c < C; ++c) y[b * C + c] /= static_cast<double>(L);
  }
  Var out = push(std::move(y), needs(xv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, xv, out, B, L, C]() {
    const Tensor& dy = nodes_[out.id].grad;
    Tensor& dx = grad_ref(xv);
    const double inv = 1.0 / static_cast<double>(L);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t c = 0; c < C; ++c) dx[(b * L + l) * C + c] += dy[b * C + c] * inv;
  };
  return out;
}

Var Tape::scale_channels(Var xv, Var gv) {
  const Tensor& x = value(xv);
  const Tensor& g = value(gv);
  expect_rank3(x, "scale_channels");
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  if (g.shape() != std::vector<std::size_t>{B, 1, C})
    fail(ErrorCode::ShapeMismatch, "scale_channels gate " + shape_string(g.shape()));
  Tensor y(x.shape());
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t c = 0; c < C; ++c) y[(b * L + l) * C + c] = x[(b * L + l) * C + c] * g[b * C + c];
  Var out = push(std::move(y), needs(xv) || needs(gv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, xv, gv, out, B, L, C]() {
    const Tensor& dy = nodes_[out.id].grad;
    const Tensor& x = nodes_[xv.id].value;
    const Tensor& g = nodes_[gv.id].value;
    if (needs(xv)) {
      Tensor& dx = grad_ref(xv);
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t c = 0; c < C; ++c) dx[(b * L + l) * C + c] += dy[(b * L + l) * C + c] * g[b * C + c];
    }
    if (needs(gv)) {
      Tensor& dg = grad_ref(gv);
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t c = 0; c < C; ++c) dg[b * C + c] += dy[(b * L + l) * C + c] * x[(b * L + l) * C + c];
    }
  };
  return out;
}

Var Tape::mse(Var pv, Var tv) {
  const Tensor& p = value(pv);
  const Tensor& t = value(tv);
  if (p.shape() != t.shape())
    fail(ErrorCode::ShapeMismatch, "mse " + shape_string(p.shape()) + " vs " + shape_string(t.shape()));
  if (p.size() == 0) fail(ErrorCode::ShapeMismatch, "mse of empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
  Tensor y({1}, s / static_cast<double>(p.size()));
  Var out = push(std::move(y), needs(pv) || needs(tv));
  if (!nodes_[out.id].needs_grad) return out;
  nodes_[out.id].backward = [this, pv, tv, out]() {
    const double g = nodes_[out.id].grad[0];
    const Tensor& p = nodes_[pv.id].value;
    const Tensor& t = nodes_[tv.id].value;
    const double k = 2.0 * g / static_cast<double>(p.size());
    if (needs(pv)) {
      Tensor& dp = grad_ref(pv);
      for (std::size_t i = 0; i < p.size(); ++i) dp[i] += k * (p[i] - t[i]);
    }
    if (needs(tv)) {
      Tensor& dt = grad_ref(tv);
      for (std::size_t i = 0; i < p.size(); ++i) dt[i] -= k * (p[i] - t[i]);
    }
  };
  return out;
}

void Tape::backward(Var loss) {
  if (consumed_) fail(ErrorCode::GraphConsumed, "backward() already ran on this tape");
  if (!record_) fail(ErrorCode::GraphConsumed, "tape was built without recording");
  if (value(loss).size() != 1) fail(ErrorCode::ShapeMismatch, "backward() needs a scalar loss");
  consumed_ = true;
  grad_ref(loss)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() != n.value.size()) continue;
    n.backward();
    n.backward = nullptr;
  }
}

}  // namespace ftir::nn
