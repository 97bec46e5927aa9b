#include "ftir/pipelines.hpp"

#include <algorithm>
#include <functional>

#include "ftir/nn/model_io.hpp"
#include "ftir/transform.hpp"

namespace ftir::pipelines {

namespace fs = std::filesystem;

namespace {

Spectrum raw_copy(const Spectrum& s, std::vector<double> values) {
  return Spectrum(s.axis_ptr(), std::move(values), s.scan_count(), s.origin());
}

std::vector<std::vector<double>> values_of(std::span<const Spectrum> s) {
  std::vector<std::vector<double>> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(x.vector());
  return out;
}

void require_norm(const Spectrum& s, const char* what) {
  if (s.domain() != Domain::minmax01 || !s.stats() || !s.stats()->snv || !s.stats()->range)
    fail(ErrorCode::DomainTagMismatch, std::string(what) + " expects normalized input with SNV and min-max stats, got " +
                                           std::string(to_string(s.domain())));
}

// Bridge output for one spectrum, after SNV (before the stage-2 min-max).
Spectrum bridge_snv(const Spectrum& lq_norm, const std::vector<double>& stage1_out, const dsp::SnipParams& snip) {
  const Spectrum s1 = lq_norm.with_values(stage1_out, lq_norm.stats());
  const Spectrum raw = transform::bridge_invert(s1, *lq_norm.stats());
  std::vector<double> corrected = dsp::snip_correct(raw.values(), snip);
  if (std::adjacent_find(corrected.begin(), corrected.end(), std::not_equal_to<>()) == corrected.end()) {
    // A collapsed stage-1 output (a constant) has no scale to normalize;
    // it is centred only.
    std::fill(corrected.begin(), corrected.end(), 0.0);
    return lq_norm.with_values(std::move(corrected), NormStats{SnvStats{}, std::nullopt, Domain::snv});
  }
  return transform::snv(raw_copy(lq_norm, std::move(corrected))).first;
}

// Min-max range of the bridge outputs; a unit span around the value when
// every output is the same constant.
MinMax bridge_range(const std::vector<std::vector<double>>& bridged) {
  double lo = bridged.front().front(), hi = lo;
  for (const auto& v : bridged)
    for (double x : v) lo = std::min(lo, x), hi = std::max(hi, x);
  if (hi > lo) return {lo, hi};
  return {lo - 0.5, lo + 0.5};
}

nn::Dataset padded_dataset(const std::vector<std::vector<double>>& in, const std::vector<std::vector<double>>& tgt,
                           const std::vector<std::size_t>& rows, std::size_t multiple) {
  std::vector<std::vector<double>> a, b;
  for (std::size_t r : rows) {
    a.push_back(pad_to_multiple(in[r], multiple));
    b.push_back(pad_to_multiple(tgt[r], multiple));
  }
  return nn::make_dataset(a, b);
}

Stage fit_stage(const std::vector<std::vector<double>>& in, const std::vector<std::vector<double>>& tgt,
                const std::vector<std::size_t>& tr, const std::vector<std::size_t>& val, const NetTrainConfig& cfg,
                std::vector<nn::EpochRecord>& history) {
  const std::size_t mult = std::size_t{1} << cfg.unet.depth;
  auto res = nn::train(cfg.unet, padded_dataset(in, tgt, tr, mult), padded_dataset(in, tgt, val, mult), cfg.train);
  history = std::move(res.history);
  return Stage::unet(std::move(res.params));
}

void check_aligned(std::span<const Spectrum> lq, const TrainingTargets& t) {
  if (lq.empty()) fail(ErrorCode::EmptyDataset, "no training spectra");
  if (lq.size() != t.target_a.size() || lq.size() != t.target_b.size())
    fail(ErrorCode::LengthMismatch, "inputs and targets are not aligned");
}

}  // namespace

PreparedSample prepare_pair(const HyperspectralCube& lq, const HyperspectralCube& hq, const prep::TrimSpec& trim) {
  if (lq.height() != hq.height() || lq.width() != hq.width() || !(lq.axis() == hq.axis()))
    fail(ErrorCode::ShapeMismatch, "LQ and HQ cubes of " + hq.sample_id() + " differ in shape or axis");
  const auto mask = prep::foreground_mask(hq);
  const auto lq_t = prep::trim(prep::subtract_background(lq, mask), trim);
  const auto hq_t = prep::trim(prep::subtract_background(hq, mask), trim);
  return {hq.sample_id(), prep::foreground_spectra(lq_t, mask), prep::foreground_spectra(hq_t, mask)};
}

Stage Stage::identity() { return Stage(); }

Stage Stage::savgol(const dsp::SgParams& p) {
  Stage s;
  s.kind_ = Kind::sg;
  s.sg_ = p;
  return s;
}

Stage Stage::unet(nn::ModelParams params) {
  nn::check_params(params, params.config);
  Stage s;
  s.kind_ = Kind::unet;
  s.model_ = std::make_shared<const nn::ModelParams>(std::move(params));
  return s;
}

const nn::ModelParams& Stage::model() const {
  if (!model_) fail(ErrorCode::InvalidConfig, "stage has no network");
  return *model_;
}

std::string to_string(Stage::Kind k) {
  switch (k) {
    case Stage::Kind::identity: return "identity";
    case Stage::Kind::sg: return "sg";
    case Stage::Kind::unet: return "unet";
  }
  return "?";
}

std::vector<double> pad_to_multiple(std::span<const double> v, std::size_t multiple) {
  const std::size_t n = v.size();
  if (multiple == 0 || n % multiple == 0) return {v.begin(), v.end()};
  if (n < 2) fail(ErrorCode::TooFewPoints, "cannot reflect-pad fewer than 2 points");
  const std::size_t total = (n / multiple + 1) * multiple;
  const std::size_t period = 2 * (n - 1);
  std::vector<double> out(v.begin(), v.end());
  out.reserve(total);
  for (std::size_t j = n; j < total; ++j) {
    std::size_t r = j % period;
    if (r >= n) r = period - r;
    out.push_back(v[r]);
  }
  return out;
}

std::vector<std::vector<double>> Stage::apply(const std::vector<std::vector<double>>& batch) const {
  switch (kind_) {
    case Kind::identity: return batch;
    case Kind::sg: {
      std::vector<std::vector<double>> out;
      out.reserve(batch.size());
      for (const auto& v : batch) out.push_back(dsp::sg_smooth(v, sg_));
      return out;
    }
    case Kind::unet: break;
  }
  if (batch.empty()) return {};
  const std::size_t n = batch.front().size();
  const std::size_t mult = std::size_t{1} << model_->config.depth;
  std::vector<std::vector<double>> padded;
  padded.reserve(batch.size());
  for (const auto& v : batch) {
    if (v.size() != n) fail(ErrorCode::LengthMismatch, "stage batch mixes spectrum lengths");
    padded.push_back(pad_to_multiple(v, mult));
  }
  const std::size_t lp = padded.front().size();
  nn::Tensor x({batch.size(), lp, 1});
  for (std::size_t i = 0; i < padded.size(); ++i) std::copy(padded[i].begin(), padded[i].end(), x.data() + i * lp);
  const nn::Tensor y = nn::predict(*model_, x);
  std::vector<std::vector<double>> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out[i].assign(y.data() + i * lp, y.data() + i * lp + n);
  return out;
}

MinMax fit_global_range(std::span<const Spectrum> lq, std::span<const Spectrum> hq, const dsp::SnipParams& snip) {
  std::vector<std::vector<double>> all;
  all.reserve(lq.size() + 2 * hq.size());
  for (const auto& s : lq) all.push_back(transform::snv(s).first.vector());
  for (const auto& s : hq) {
    all.push_back(transform::snv(s).first.vector());
    all.push_back(transform::snv(raw_copy(s, dsp::snip_correct(s.values(), snip))).first.vector());
  }
  return transform::minmax_fit(std::span<const std::vector<double>>(all));
}

std::vector<Spectrum> normalize_all(std::span<const Spectrum> raw, const MinMax& range) {
  std::vector<Spectrum> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.push_back(transform::normalize(s, range));
  return out;
}

TrainingTargets build_targets(std::span<const Spectrum> hq, const dsp::SnipParams& snip, const MinMax& range) {
  TrainingTargets t;
  t.range = range;
  for (const auto& s : hq) {
    t.target_a.push_back(transform::normalize(s, range));
    t.target_b.push_back(transform::normalize(raw_copy(s, dsp::snip_correct(s.values(), snip)), range));
  }
  return t;
}

std::vector<Spectrum> raw_reference(std::span<const Spectrum> lq_raw, const dsp::SnipParams& snip,
                                    const MinMax& range) {
  std::vector<Spectrum> out;
  out.reserve(lq_raw.size());
  for (const auto& s : lq_raw) out.push_back(transform::normalize(raw_copy(s, dsp::snip_correct(s.values(), snip)), range));
  return out;
}

Spectrum traditional_restore(const Spectrum& lq_norm, const dsp::SgParams& sg, const dsp::SnipParams& snip,
                             const MinMax& range) {
  require_norm(lq_norm, "traditional_restore");
  const Spectrum smooth = dsp::sg_smooth(lq_norm, sg);
  const Spectrum raw = transform::bridge_invert(smooth, *lq_norm.stats());
  return transform::normalize(raw_copy(lq_norm, dsp::snip_correct(raw.values(), snip)), range);
}

std::vector<Spectrum> traditional_restore(std::span<const Spectrum> lq_norm, const dsp::SgParams& sg,
                                          const dsp::SnipParams& snip, const MinMax& range) {
  std::vector<Spectrum> out;
  out.reserve(lq_norm.size());
  for (const auto& s : lq_norm) out.push_back(traditional_restore(s, sg, snip, range));
  return out;
}

std::vector<Spectrum> single_unet_restore(std::span<const Spectrum> lq_norm, const Stage& model,
                                          const MinMax& range) {
  for (const auto& s : lq_norm) require_norm(s, "single_unet_restore");
  const auto y = model.apply(values_of(lq_norm));
  std::vector<Spectrum> out;
  out.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out.push_back(lq_norm[i].with_values(y[i], NormStats{std::nullopt, range, Domain::minmax01}));
  return out;
}

std::vector<Spectrum> cascade_bridge(std::span<const Spectrum> lq_norm, const std::vector<std::vector<double>>& stage1_out,
                                     const CascadeModel& m, Bridge bridge) {
  if (stage1_out.size() != lq_norm.size()) fail(ErrorCode::LengthMismatch, "stage 1 output count differs from input");
  std::vector<Spectrum> out;
  out.reserve(lq_norm.size());
  for (std::size_t i = 0; i < lq_norm.size(); ++i) {
    if (bridge == Bridge::bypass) {
      out.push_back(lq_norm[i].with_values(stage1_out[i], NormStats{std::nullopt, m.range, Domain::minmax01}));
      continue;
    }
    out.push_back(transform::minmax_apply(bridge_snv(lq_norm[i], stage1_out[i], m.snip), m.stage2_norm));
  }
  return out;
}

std::vector<Spectrum> cascade_infer(std::span<const Spectrum> lq_norm, const CascadeModel& m, Bridge bridge) {
  for (const auto& s : lq_norm) require_norm(s, "cascade_infer");
  const auto mid = cascade_bridge(lq_norm, m.stage1.apply(values_of(lq_norm)), m, bridge);
  const auto y = m.stage2.apply(values_of(mid));
  std::vector<Spectrum> out;
  out.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out.push_back(lq_norm[i].with_values(y[i], NormStats{std::nullopt, m.range, Domain::minmax01}));
  return out;
}

namespace {

double pooled_mse(const std::vector<std::vector<double>>& a, std::span<const Spectrum> b) {
  if (a.size() != b.size() || a.empty()) fail(ErrorCode::LengthMismatch, "loss inputs are not aligned");
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) fail(ErrorCode::LengthMismatch, "loss inputs differ in length");
    for (std::size_t j = 0; j < a[i].size(); ++j) s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
    n += a[i].size();
  }
  return s / static_cast<double>(n);
}

}  // namespace

double stage1_loss(const CascadeModel& m, std::span<const Spectrum> lq_norm, std::span<const Spectrum> target_a) {
  return pooled_mse(m.stage1.apply(values_of(lq_norm)), target_a);
}

double stage2_loss(const CascadeModel& m, std::span<const Spectrum> lq_norm, std::span<const Spectrum> target_b) {
  return pooled_mse(values_of(cascade_infer(lq_norm, m)), target_b);
}

SingleTrainResult single_unet_train(std::span<const Spectrum> lq_norm, const TrainingTargets& targets,
                                    const NetTrainConfig& cfg) {
  check_aligned(lq_norm, targets);
  const auto [tr, val] = nn::validation_rows(lq_norm.size(), cfg.train.val_fraction, cfg.train.shuffle_seed);
  SingleTrainResult r;
  r.model = fit_stage(values_of(lq_norm), values_of(targets.target_b), tr, val, cfg, r.history);
  return r;
}

CascadeTrainResult cascade_train(std::span<const Spectrum> lq_norm, const TrainingTargets& targets,
                                 const CascadeTrainConfig& cfg) {
  check_aligned(lq_norm, targets);
  const auto [tr, val] = nn::validation_rows(lq_norm.size(), cfg.stage1.train.val_fraction, cfg.stage1.train.shuffle_seed);
  const auto inputs = values_of(lq_norm);

  CascadeTrainResult r;
  CascadeModel& m = r.model;
  m.snip = cfg.snip;
  m.range = targets.range;
  m.stage1 = fit_stage(inputs, values_of(targets.target_a), tr, val, cfg.stage1, r.history1);

  const auto s1 = m.stage1.apply(inputs);
  std::vector<std::vector<double>> bridged;
  bridged.reserve(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) bridged.push_back(bridge_snv(lq_norm[i], s1[i], cfg.snip).vector());
  m.stage2_norm = bridge_range(bridged);
  for (auto& v : bridged) transform::minmax_inplace(v, m.stage2_norm);

  m.stage2 = fit_stage(bridged, values_of(targets.target_b), tr, val, cfg.stage2, r.history2);
  return r;
}

Json to_json(const dsp::SnipParams& p) {
  return {{"iterations", p.iterations}, {"decreasing_window", p.decreasing_window}, {"lls_transform", p.lls_transform}};
}

dsp::SnipParams snip_params_from_json(const Json& j) {
  dsp::SnipParams p;
  try {
    p.iterations = j.value("iterations", p.iterations);
    p.decreasing_window = j.value("decreasing_window", p.decreasing_window);
    p.lls_transform = j.value("lls_transform", p.lls_transform);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("snip params: ") + e.what());
  }
  return p;
}

Json to_json(const dsp::SgParams& p) { return {{"window", p.window}, {"order", p.order}}; }

dsp::SgParams sg_params_from_json(const Json& j) {
  dsp::SgParams p;
  try {
    p.window = j.value("window", p.window);
    p.order = j.value("order", p.order);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("sg params: ") + e.what());
  }
  return p;
}

Json to_json(const MinMax& r) { return {{"min", r.min}, {"max", r.max}}; }

MinMax minmax_from_json(const Json& j) {
  try {
    return {j.at("min").get<double>(), j.at("max").get<double>()};
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("min-max range: ") + e.what());
  }
}

void save_stage(const Stage& s, const fs::path& dir) {
  Json j{{"kind", to_string(s.kind())}};
  if (s.kind() == Stage::Kind::sg) j["sg"] = to_json(s.sg());
  if (s.kind() == Stage::Kind::unet) nn::save_model(s.model(), dir);
  write_json(j, dir / "stage.json");
}

Stage load_stage(const fs::path& dir) {
  const Json j = read_json(dir / "stage.json");
  const std::string kind = j.value("kind", std::string());
  if (kind == "identity") return Stage::identity();
  if (kind == "sg") return Stage::savgol(sg_params_from_json(j.at("sg")));
  if (kind == "unet") return Stage::unet(nn::load_model(dir));
  fail(ErrorCode::InvalidConfig, "unknown stage kind '" + kind + "' in " + (dir / "stage.json").string());
}

void save_cascade(const CascadeModel& m, const fs::path& dir) {
  save_stage(m.stage1, dir / "stage1");
  save_stage(m.stage2, dir / "stage2");
  write_json(to_json(m.snip), dir / "snip.json");
  write_json(to_json(m.range), dir / "norm.json");
  write_json(to_json(m.stage2_norm), dir / "stage2_norm.json");
}

CascadeModel load_cascade(const fs::path& dir) {
  CascadeModel m;
  m.stage1 = load_stage(dir / "stage1");
  m.stage2 = load_stage(dir / "stage2");
  m.snip = snip_params_from_json(read_json(dir / "snip.json"));
  m.range = minmax_from_json(read_json(dir / "norm.json"));
  m.stage2_norm = minmax_from_json(read_json(dir / "stage2_norm.json"));
  return m;
}

}  // namespace ftir::pipelines
