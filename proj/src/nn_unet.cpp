#include "ftir/nn/unet.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "ftir/rng.hpp"

namespace ftir::nn {

namespace {

std::size_t level_channels(const UnetConfig& cfg, int level) {
  return static_cast<std::size_t>(cfg.base_channels) << level;
}

std::size_t gate_hidden(std::size_t c) { return std::max<std::size_t>(1, c / 2); }

void add_conv(std::vector<ParamSpec>& out, const std::string& name, std::size_t k, std::size_t cin,
              std::size_t cout) {
  out.push_back({name + ".w", {k, cin, cout}});
  out.push_back({name + ".b", {cout}});
}

// Consumes bound parameters in layout order.
class Cursor {
 public:
  explicit Cursor(const std::vector<Var>& p) : p_(p) {}
  std::pair<Var, Var> conv() {
    if (i_ + 2 > p_.size()) fail(ErrorCode::ShapeMismatch, "parameter list shorter than the layout");
    const Var w = p_[i_], b = p_[i_ + 1];
    i_ += 2;
    return {w, b};
  }
  bool done() const { return i_ == p_.size(); }

 private:
  const std::vector<Var>& p_;
  std::size_t i_ = 0;
};

Var conv(Tape& t, Var x, Cursor& c) {
  const auto [w, b] = c.conv();
  return t.conv1d(x, w, b);
}

}  // namespace

void validate(const UnetConfig& cfg) {
  if (cfg.depth < 1 || cfg.depth > 8) fail(ErrorCode::InvalidConfig, "unet depth must be in [1, 8]");
  if (cfg.base_channels < 1) fail(ErrorCode::InvalidConfig, "base_channels must be >= 1");
  if (cfg.kernel < 1 || cfg.kernel % 2 == 0) fail(ErrorCode::InvalidConfig, "kernel must be a positive odd integer");
}

std::uint64_t fingerprint(const UnetConfig& cfg) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "unet1d;depth=%d;base=%d;kernel=%d;res=%d;att=%d;inres=%d", cfg.depth,
                cfg.base_channels, cfg.kernel, cfg.residual_bottleneck ? 1 : 0, cfg.channel_attention ? 1 : 0,
                cfg.input_residual ? 1 : 0);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fingerprint_hex(const UnetConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint(cfg)));
  return buf;
}

std::vector<ParamSpec> param_layout(const UnetConfig& cfg) {
  validate(cfg);
  const auto k = static_cast<std::size_t>(cfg.kernel);
  std::vector<ParamSpec> out;
  for (int i = 0; i < cfg.depth; ++i) {
    const std::size_t cin = i == 0 ? 1 : level_channels(cfg, i - 1);
    const std::size_t c = level_channels(cfg, i);
    const std::string p = "enc" + std::to_string(i);
    add_conv(out, p + ".conv1", k, cin, c);
    add_conv(out, p + ".conv2", k, c, c);
  }
  const std::size_t cb = level_channels(cfg, cfg.depth);
  add_conv(out, "bottleneck.conv", k, level_channels(cfg, cfg.depth - 1), cb);
  if (cfg.residual_bottleneck) {
    add_conv(out, "bottleneck.res1", k, cb, cb);
    add_conv(out, "bottleneck.res2", k, cb, cb);
  }
  for (int i = cfg.depth - 1; i >= 0; --i) {
    const std::size_t c = level_channels(cfg, i);
    const std::size_t below = level_channels(cfg, i + 1);
    const std::string p = "dec" + std::to_string(i);
    add_conv(out, p + ".up", k, below, c);
    add_conv(out, p + ".conv", k, 2 * c, c);
    if (cfg.channel_attention) {
      add_conv(out, p + ".gate1", 1, c, gate_hidden(c));
      add_conv(out, p + ".gate2", 1, gate_hidden(c), c);
    }
  }
  add_conv(out, "out", 1, level_channels(cfg, 0), 1);
  return out;
}

std::size_t param_count(const UnetConfig& cfg) {
  std::size_t n = 0;
  for (const auto& p : param_layout(cfg)) n += Tensor::count(p.shape);
  return n;
}

std::size_t ModelParams::count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.value.size();
  return n;
}

const Tensor& ModelParams::at(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  fail(ErrorCode::ShapeMismatch, "no parameter named " + name);
}

Tensor& ModelParams::at(const std::string& name) {
  return const_cast<Tensor&>(static_cast<const ModelParams&>(*this).at(name));
}

ModelParams zero_params(const UnetConfig& cfg) {
  ModelParams m;
  m.config = cfg;
  for (auto& spec : param_layout(cfg)) m.tensors.push_back({spec.name, Tensor(spec.shape, 0.0)});
  return m;
}

ModelParams init_params(const UnetConfig& cfg) {
  ModelParams m = zero_params(cfg);
  for (std::size_t i = 0; i < m.tensors.size(); ++i) {
    Tensor& t = m.tensors[i].value;
    if (t.rank() != 3) continue;
    // A residual net starts as the identity map.
    if (cfg.input_residual && m.tensors[i].name == "out.w") continue;
    const double fan_in = static_cast<double>(t.dim(0) * t.dim(1));
    const double fan_out = static_cast<double>(t.dim(0) * t.dim(2));
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Rng rng = make_rng(cfg.seed, Stream::init, i);
    std::uniform_real_distribution<double> u(-a, a);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = u(rng);
  }
  return m;
}

void check_params(const ModelParams& params, const UnetConfig& cfg) {
  if (fingerprint(params.config) != fingerprint(cfg))
    fail(ErrorCode::ConfigFingerprintMismatch,
         "model fingerprint " + fingerprint_hex(params.config) + " does not match " + fingerprint_hex(cfg));
  const auto layout = param_layout(cfg);
  if (layout.size() != params.tensors.size())
    fail(ErrorCode::ShapeMismatch, "parameter list has " + std::to_string(params.tensors.size()) +
                                       " tensors, layout expects " + std::to_string(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].name != params.tensors[i].name || layout[i].shape != params.tensors[i].value.shape())
      fail(ErrorCode::ShapeMismatch, "parameter " + params.tensors[i].name + " " +
                                         shape_string(params.tensors[i].value.shape()) + " expected " +
                                         layout[i].name + " " + shape_string(layout[i].shape));
}

std::vector<Var> bind_params(Tape& tape, const ModelParams& params, bool trainable) {
  std::vector<Var> vars;
  vars.reserve(params.tensors.size());
  for (const auto& t : params.tensors) vars.push_back(trainable ? tape.leaf(t.value) : tape.constant(t.value));
  return vars;
}

Var unet_graph(Tape& t, const UnetConfig& cfg, const std::vector<Var>& params, Var x) {
  validate(cfg);
  const Tensor& xv = t.value(x);
  const std::size_t mult = std::size_t{1} << cfg.depth;
  if (xv.rank() != 3 || xv.dim(2) != 1)
    fail(ErrorCode::ShapeMismatch, "unet input must be (B, L, 1), got " + shape_string(xv.shape()));
  if (xv.dim(1) == 0 || xv.dim(1) % mult != 0)
    fail(ErrorCode::ShapeMismatch,
         "length " + std::to_string(xv.dim(1)) + " is not divisible by 2^depth = " + std::to_string(mult));

  Cursor cur(params);
  std::vector<Var> skips;
  Var h = x;
  for (int i = 0; i < cfg.depth; ++i) {
    h = t.relu(conv(t, h, cur));
    h = t.relu(conv(t, h, cur));
    skips.push_back(h);
    h = t.maxpool2(h);
  }
  h = t.relu(conv(t, h, cur));
  if (cfg.residual_bottleneck) {
    Var r = t.relu(conv(t, h, cur));
    r = conv(t, r, cur);
    h = t.relu(t.add(h, r));
  }
  for (int i = cfg.depth - 1; i >= 0; --i) {
    Var u = conv(t, t.upsample2(h), cur);
    h = t.relu(conv(t, t.concat(u, skips[static_cast<std::size_t>(i)]), cur));
    if (cfg.channel_attention) {
      Var g = t.relu(conv(t, t.mean_length(h), cur));
      g = t.sigmoid(conv(t, g, cur));
      h = t.scale_channels(h, g);
    }
  }
  Var y = conv(t, h, cur);
  if (!cur.done()) fail(ErrorCode::ShapeMismatch, "parameter list longer than the layout");
  if (cfg.input_residual) y = t.add(y, x);
  return y;
}

Tensor unet_forward(const ModelParams& params, const UnetConfig& cfg, const Tensor& batch) {
  check_params(params, cfg);
  Tape tape(false);
  const auto vars = bind_params(tape, params, false);
  const Var x = tape.constant(batch);
  const Var y = unet_graph(tape, cfg, vars, x);
  return tape.value(y);
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape())
    fail(ErrorCode::ShapeMismatch, "mse " + shape_string(pred.shape()) + " vs " + shape_string(target.shape()));
  if (pred.size() == 0) fail(ErrorCode::ShapeMismatch, "mse of empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

OptimState make_optim_state(const ModelParams& params, const AdadeltaConfig& hp) {
  if (!(hp.lr >= 0.0) || !(hp.rho >= 0.0 && hp.rho < 1.0) || !(hp.eps > 0.0))
    fail(ErrorCode::InvalidConfig, "adadelta needs lr >= 0, 0 <= rho < 1, eps > 0");
  OptimState s;
  s.hp = hp;
  for (const auto& t : params.tensors) {
    s.eg2.emplace_back(t.value.shape(), 0.0);
    s.edx2.emplace_back(t.value.shape(), 0.0);
  }
  return s;
}

void adadelta_step(ModelParams& params, const std::vector<Tensor>& grads, OptimState& state) {
  const std::size_t n = params.tensors.size();
  if (grads.size() != n || state.eg2.size() != n || state.edx2.size() != n)
    fail(ErrorCode::ShapeMismatch, "adadelta: parameter, gradient and state counts differ");
  const auto& hp = state.hp;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor& p = params.tensors[i].value;
    const Tensor& g = grads[i];
    Tensor& eg2 = state.eg2[i];
    Tensor& edx2 = state.edx2[i];
    if (g.shape() != p.shape() || eg2.shape() != p.shape() || edx2.shape() != p.shape())
      fail(ErrorCode::ShapeMismatch, "adadelta: shape mismatch for " + params.tensors[i].name);
    for (std::size_t j = 0; j < p.size(); ++j) {
      eg2[j] = hp.rho * eg2[j] + (1.0 - hp.rho) * g[j] * g[j];
      const double u = std::sqrt(edx2[j] + hp.eps) / std::sqrt(eg2[j] + hp.eps) * g[j];
      const double delta = -hp.lr * u;
      const double acc = hp.scale_accumulator ? delta : u;
      edx2[j] = hp.rho * edx2[j] + (1.0 - hp.rho) * acc * acc;
      p[j] += delta;
    }
  }
}

}  // namespace ftir::nn
