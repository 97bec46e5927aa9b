#include "ftir/synthgen.hpp"

#include <cmath>
#include <numbers>

namespace ftir::synth {

namespace {

constexpr int kFeaturesPerComponent = 16;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double pixel_thickness(const SynthConfig& cfg, std::size_t pixel) {
  Rng rng = make_rng(cfg.seed, Stream::thickness, pixel);
  if (cfg.thickness_max <= cfg.thickness_min) return cfg.thickness_min;
  return uniform(rng, cfg.thickness_min, cfg.thickness_max);
}

std::vector<double> scatter_baseline(const SynthConfig& cfg, const WavenumberAxis& axis,
                                     std::size_t pixel, double thickness) {
  const ScatterModel& s = cfg.scatter;
  Rng rng = make_rng(cfg.seed, Stream::baseline, pixel);
  BaselineModel b;
  b.kind = BaselineModel::Kind::sum;
  b.poly = {uniform(rng, 0.0, s.offset_max), uniform(rng, -s.slope_max, s.slope_max),
            uniform(rng, -s.curvature_max, s.curvature_max)};
  b.sigmoid_amp = uniform(rng, 0.0, s.sigmoid_amp_max);
  b.sigmoid_center_cm = uniform(rng, s.sigmoid_center_lo_cm, s.sigmoid_center_hi_cm);
  b.sigmoid_width_cm = s.sigmoid_width_cm;
  b.scale = thickness;
  return b.evaluate(axis);
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> BaselineModel::evaluate(const WavenumberAxis& axis) const {
  const double x0 = axis.front();
  const double x1 = axis.back();
  std::vector<double> out(axis.size(), 0.0);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double x = axis.at(i);
    double v = 0.0;
    if (kind != Kind::sigmoid) {
      const double t = 2.0 * (x - x0) / (x1 - x0) - 1.0;
      double tp = 1.0;
      for (double c : poly) {
        v += c * tp;
        tp *= t;
      }
    }
    if (kind != Kind::polynomial && sigmoid_amp != 0.0)
      v += sigmoid_amp / (1.0 + std::exp(-(x - sigmoid_center_cm) / sigmoid_width_cm));
    out[i] = scale * v;
  }
  return out;
}

double peak_value(const PeakModel& p, double x_cm) {
  const double d = (x_cm - p.center_cm) / p.width_cm;
  if (p.shape == PeakShape::gaussian) return p.height * std::exp(-4.0 * std::numbers::ln2 * d * d);
  return p.height / (1.0 + 4.0 * d * d);
}

Spectrum gen_clean(std::span<const PeakModel> peaks, const AxisPtr& axis) {
  if (peaks.empty()) fail(ErrorCode::PeakOutOfRange, "empty peak list");
  const double step = axis->mean_step();
  for (const auto& p : peaks) {
    if (p.center_cm < axis->front() || p.center_cm > axis->back())
      fail(ErrorCode::PeakOutOfRange, "peak centre " + std::to_string(p.center_cm) + " outside axis");
    if (!(p.height > 0.0)) fail(ErrorCode::InvalidPeak, "peak height must be > 0");
    if (!(p.width_cm >= 2.0 * step))
      fail(ErrorCode::InvalidPeak, "peak FWHM " + std::to_string(p.width_cm) +
                                       " below two axis steps");
  }
  std::vector<double> v(axis->size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = axis->at(i);
    for (const auto& p : peaks) v[i] += peak_value(p, x);
  }
  return Spectrum(axis, std::move(v));
}

std::vector<double> smooth_random_profile(const WavenumberAxis& axis,
                                          std::span<const DriftComponent> components, Rng& rng) {
  std::vector<double> out(axis.size(), 0.0);
  const auto xs = axis.points();
  for (const auto& c : components) {
    if (c.amplitude == 0.0) continue;
    std::normal_distribution<double> freq(0.0, 1.0 / c.correlation_cm);
    const double a = c.amplitude * std::sqrt(2.0 / kFeaturesPerComponent);
    for (int k = 0; k < kFeaturesPerComponent; ++k) {
      const double w = freq(rng);
      const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * std::cos(w * xs[i] + phase);
    }
  }
  return out;
}

Spectrum simulate_scans(const Spectrum& clean, std::span<const double> baseline, double sigma,
                        int n_scans, const PixelDrift* drift, Rng& rng) {
  if (n_scans < 1) fail(ErrorCode::InvalidConfig, "scan count must be >= 1");
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidConfig, "noise sigma must be >= 0");
  const std::size_t L = clean.size();
  if (baseline.size() != L) fail(ErrorCode::LengthMismatch, "baseline length");

  // Sum of the zero-mean per-scan parts; the deterministic parts are added
  // once so that sigma = 0 reproduces clean + baseline exactly.
  std::vector<double> acc(L, 0.0);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (int k = 0; k < n_scans; ++k)
      for (std::size_t i = 0; i < L; ++i) acc[i] += noise(rng);
  }
  const bool fluctuates = drift && drift->model && drift->model->scan_fraction > 0.0;
  if (fluctuates) {
    std::vector<DriftComponent> comps = drift->model->components;
    for (auto& c : comps) c.amplitude *= drift->model->scan_fraction;
    for (int k = 0; k < n_scans; ++k) {
      Rng r = make_rng(drift->scan_seed, Stream::drift_scan, static_cast<std::uint64_t>(n_scans),
                       static_cast<std::uint64_t>(k));
      const auto f = smooth_random_profile(clean.axis(), comps, r);
      for (std::size_t i = 0; i < L; ++i) acc[i] += f[i];
    }
  }

  std::vector<double> out(L);
  const double inv = 1.0 / n_scans;
  for (std::size_t i = 0; i < L; ++i) {
    double det = clean[i] + baseline[i];
    if (drift && !drift->mean_profile.empty()) det += drift->mean_profile[i];
    out[i] = det + acc[i] * inv;
  }
  return Spectrum(clean.axis_ptr(), std::move(out), n_scans, clean.origin());
}

// ---------------------------------------------------------------------------

void validate(const SynthConfig& cfg) {
  if (cfg.height == 0 || cfg.width == 0) fail(ErrorCode::InvalidConfig, "grid must be non-empty");
  if (cfg.regions.empty()) fail(ErrorCode::InvalidConfig, "at least one peak library required");
  for (const auto& r : cfg.regions)
    if (r.empty()) fail(ErrorCode::PeakOutOfRange, "empty peak library");
  if (!(cfg.noise_sigma >= 0.0)) fail(ErrorCode::InvalidConfig, "noise sigma must be >= 0");
  if (cfg.scan_counts.empty()) fail(ErrorCode::InvalidConfig, "no scan counts");
  for (int n : cfg.scan_counts)
    if (n < 1) fail(ErrorCode::InvalidConfig, "scan counts must be positive");
  if (cfg.layout.blob_count < 0 || cfg.layout.radius_min_px <= 0 ||
      cfg.layout.radius_max_px < cfg.layout.radius_min_px)
    fail(ErrorCode::InvalidConfig, "invalid blob layout");
  if (cfg.thickness_min <= 0 || cfg.thickness_max < cfg.thickness_min)
    fail(ErrorCode::InvalidConfig, "invalid thickness range");
}

std::vector<int> realize_layout(const SynthConfig& cfg) {
  struct Blob {
    double cx, cy, r;
  };
  const auto H = static_cast<double>(cfg.height);
  const auto W = static_cast<double>(cfg.width);
  if (2.0 * cfg.layout.radius_min_px + 1.0 > std::min(H, W))
    fail(ErrorCode::LayoutOverflow, "blob radius exceeds grid");
  Rng rng = make_rng(cfg.seed, Stream::layout);
  std::vector<Blob> blobs;
  // Greedy placement; a dead end restarts the whole layout.
  for (int restart = 0; restart < 200; ++restart) {
    blobs.clear();
    for (int b = 0; b < cfg.layout.blob_count; ++b) {
      bool placed = false;
      for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
        const double r = uniform(rng, cfg.layout.radius_min_px, cfg.layout.radius_max_px);
        if (2.0 * r + 1.0 > std::min(H, W)) continue;
        const double cx = uniform(rng, r, W - 1.0 - r);
        const double cy = uniform(rng, r, H - 1.0 - r);
        bool clear = true;
        for (const auto& o : blobs)
          if (std::hypot(cx - o.cx, cy - o.cy) < r + o.r + 1.0) clear = false;
        if (clear) {
          blobs.push_back({cx, cy, r});
          placed = true;
        }
      }
      if (!placed) break;
    }
    if (blobs.size() == static_cast<std::size_t>(cfg.layout.blob_count)) break;
  }
  if (blobs.size() != static_cast<std::size_t>(cfg.layout.blob_count))
    fail(ErrorCode::LayoutOverflow, "cannot place blob " + std::to_string(blobs.size()));
  std::vector<int> region(cfg.height * cfg.width, -1);
  for (std::size_t y = 0; y < cfg.height; ++y)
    for (std::size_t x = 0; x < cfg.width; ++x)
      for (std::size_t b = 0; b < blobs.size(); ++b) {
        const double dx = static_cast<double>(x) - blobs[b].cx;
        const double dy = static_cast<double>(y) - blobs[b].cy;
        if (dx * dx + dy * dy <= blobs[b].r * blobs[b].r)
          region[y * cfg.width + x] = static_cast<int>(b % cfg.regions.size());
      }
  return region;
}

std::vector<PeakModel> pixel_peaks(const SynthConfig& cfg, std::size_t x, std::size_t y, int region) {
  if (region < 0 || static_cast<std::size_t>(region) >= cfg.regions.size())
    fail(ErrorCode::InvalidConfig, "pixel region out of range");
  const std::size_t pixel = y * cfg.width + x;
  const double t = pixel_thickness(cfg, pixel);
  Rng rng = make_rng(cfg.seed, Stream::peaks, pixel);
  std::vector<PeakModel> out = cfg.regions[static_cast<std::size_t>(region)];
  for (auto& p : out) {
    p.height *= t * (1.0 + cfg.jitter.height_frac * uniform(rng, -1.0, 1.0));
    p.center_cm += cfg.jitter.center_cm * uniform(rng, -1.0, 1.0);
    p.width_cm *= 1.0 + cfg.jitter.width_frac * uniform(rng, -1.0, 1.0);
  }
  return out;
}

SynthOutput gen_cube(const SynthConfig& cfg) {
  validate(cfg);
  const AxisPtr axis = share(make_axis(cfg.axis_start_cm, cfg.axis_end_cm, cfg.axis_points));
  const std::size_t L = axis->size();
  const std::size_t P = cfg.height * cfg.width;
  const auto region = realize_layout(cfg);
  const auto common = cfg.baseline.evaluate(*axis);

  std::map<int, std::vector<double>> scan_data;
  for (int n : cfg.scan_counts) scan_data[n].assign(P * L, 0.0);
  std::vector<double> clean_data(P * L, 0.0);
  std::vector<double> base_data(P * L, 0.0);
  std::vector<std::uint8_t> mask(P, 0);
  const std::vector<double> zeros(L, 0.0);

  for (std::size_t y = 0; y < cfg.height; ++y) {
    for (std::size_t x = 0; x < cfg.width; ++x) {
      const std::size_t px = y * cfg.width + x;
      const bool fg = region[px] >= 0;
      mask[px] = fg;

      std::vector<double> base = common;
      Spectrum clean(axis, zeros);
      if (fg) {
        clean = gen_clean(pixel_peaks(cfg, x, y, region[px]), axis);
        const auto sc = scatter_baseline(cfg, *axis, px, pixel_thickness(cfg, px));
        for (std::size_t i = 0; i < L; ++i) base[i] += sc[i];
      }

      std::optional<PixelDrift> drift;
      if (cfg.drift) {
        drift.emplace();
        drift->model = &*cfg.drift;
        drift->scan_seed = derive_seed(cfg.seed, Stream::drift_scan, cfg.drift->stream_id, px);
        if (cfg.drift->nonzero_mean) {
          Rng r = make_rng(cfg.seed, Stream::drift, cfg.drift->stream_id, px);
          drift->mean_profile = smooth_random_profile(*axis, cfg.drift->components, r);
        }
      }

      for (int n : cfg.scan_counts) {
        Rng rng = make_rng(cfg.seed, Stream::noise, px, static_cast<std::uint64_t>(n));
        const Spectrum s = simulate_scans(clean, base, cfg.noise_sigma, n,
                                          drift ? &*drift : nullptr, rng);
        std::copy(s.values().begin(), s.values().end(), scan_data[n].begin() + px * L);
      }
      std::copy(clean.values().begin(), clean.values().end(), clean_data.begin() + px * L);
      for (std::size_t i = 0; i < L; ++i) {
        double b = base[i];
        if (drift && !drift->mean_profile.empty()) b += drift->mean_profile[i];
        base_data[px * L + i] = b;
      }
    }
  }

  SynthOutput out{
      {},
      HyperspectralCube(cfg.height, cfg.width, axis, std::move(clean_data), cfg.sample_id, 1, mask),
      HyperspectralCube(cfg.height, cfg.width, axis, std::move(base_data), cfg.sample_id, 1, mask),
      mask,
      region};
  for (auto& [n, data] : scan_data)
    out.scans.emplace(n, HyperspectralCube(cfg.height, cfg.width, axis, std::move(data),
                                           cfg.sample_id, n));
  return out;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::vector<PeakModel>> default_peak_library() {
  using S = PeakShape;
  // Cytoplasm-like: protein and lipid dominated.
  std::vector<PeakModel> cyto{
      {1080, 0.08, 34, S::gaussian},  {1240, 0.10, 40, S::gaussian},
      {1398, 0.07, 30, S::gaussian},  {1456, 0.09, 26, S::gaussian},
      {1545, 0.24, 36, S::lorentzian}, {1655, 0.40, 34, S::lorentzian},
      {1740, 0.06, 22, S::gaussian},  {2852, 0.09, 18, S::gaussian},
      {2925, 0.17, 24, S::gaussian},  {2960, 0.11, 18, S::gaussian},
      {3070, 0.05, 40, S::gaussian},  {3290, 0.20, 70, S::gaussian},
  };
  // Nucleus-like: stronger phosphate bands, weaker lipid.
  std::vector<PeakModel> nucleus{
      {1085, 0.18, 30, S::gaussian},  {1240, 0.17, 36, S::gaussian},
      {1398, 0.06, 30, S::gaussian},  {1456, 0.06, 26, S::gaussian},
      {1545, 0.20, 36, S::lorentzian}, {1655, 0.34, 34, S::lorentzian},
      {2852, 0.04, 18, S::gaussian},  {2925, 0.09, 24, S::gaussian},
      {2960, 0.08, 18, S::gaussian},  {3290, 0.17, 70, S::gaussian},
  };
  return {cyto, nucleus};
}

SynthConfig reference_config(std::uint64_t seed) {
  SynthConfig c;
  c.sample_id = "reference";
  c.height = 32;
  c.width = 32;
  c.layout = {6, 3.0, 5.0};
  c.regions = default_peak_library();
  c.baseline.kind = BaselineModel::Kind::sum;
  c.baseline.poly = {0.05, 0.02, 0.01};
  c.baseline.sigmoid_amp = 0.02;
  c.baseline.sigmoid_center_cm = 2600.0;
  c.baseline.sigmoid_width_cm = 400.0;
  c.scatter = {0.05, 0.02, 0.02, 0.04, 2000.0, 3200.0, 350.0};
  c.noise_sigma = 0.02;
  c.seed = seed;
  return c;
}

DriftModel drift_preset() {
  DriftModel d;
  d.components = {{0.02, 250.0}, {0.0075, 25.0}};
  d.nonzero_mean = true;
  d.scan_fraction = 0.0;
  d.stream_id = 3;
  return d;
}

SynthConfig drift_config(std::uint64_t seed) {
  SynthConfig c = reference_config(seed);
  c.sample_id = "reference_drift";
  c.drift = drift_preset();
  return c;
}

DatasetConfig benchmark_dataset(std::uint64_t seed) {
  DatasetConfig d;
  // Shared-baseline variants: each field of view gets its own continuum.
  const std::vector<std::vector<double>> polys{
      {0.05, 0.02, 0.01}, {0.07, -0.01, 0.02}, {0.04, 0.03, -0.01}, {0.06, 0.00, 0.015}};
  const std::vector<double> sig_amp{0.02, 0.00, 0.04, 0.01};
  for (int k = 0; k < 4; ++k) {
    SynthConfig c = reference_config(derive_seed(seed, Stream::bench, static_cast<std::uint64_t>(k)));
    c.sample_id = "sample" + std::to_string(k + 1);
    c.axis_points = 425;
    c.height = 16;
    c.width = 16;
    c.layout = {4, 2.5, 3.5};
    c.baseline.poly = polys[static_cast<std::size_t>(k)];
    c.baseline.sigmoid_amp = sig_amp[static_cast<std::size_t>(k)];
    if (k == 2) c.drift = drift_preset();
    d.samples.push_back(std::move(c));
  }
  return d;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string shape_name(PeakShape s) { return s == PeakShape::gaussian ? "gaussian" : "lorentzian"; }

PeakShape shape_from(const std::string& s) {
  if (s == "gaussian") return PeakShape::gaussian;
  if (s == "lorentzian") return PeakShape::lorentzian;
  fail(ErrorCode::InvalidConfig, "unknown peak shape '" + s + "'");
}

std::string kind_name(BaselineModel::Kind k) {
  switch (k) {
    case BaselineModel::Kind::polynomial: return "polynomial";
    case BaselineModel::Kind::sigmoid: return "sigmoid";
    case BaselineModel::Kind::sum: return "sum";
  }
  return "sum";
}

BaselineModel::Kind kind_from(const std::string& s) {
  if (s == "polynomial") return BaselineModel::Kind::polynomial;
  if (s == "sigmoid") return BaselineModel::Kind::sigmoid;
  if (s == "sum") return BaselineModel::Kind::sum;
  fail(ErrorCode::InvalidConfig, "unknown baseline kind '" + s + "'");
}

Json drift_to_json(const DriftModel& d) {
  Json comps = Json::array();
  for (const auto& c : d.components)
    comps.push_back({{"amplitude", c.amplitude}, {"correlation_cm", c.correlation_cm}});
  return {{"components", comps},
          {"nonzero_mean", d.nonzero_mean},
          {"scan_fraction", d.scan_fraction},
          {"stream_id", d.stream_id}};
}

DriftModel drift_from_json(const Json& j) {
  DriftModel d;
  for (const auto& c : j.value("components", Json::array()))
    d.components.push_back({c.at("amplitude").get<double>(), c.at("correlation_cm").get<double>()});
  d.nonzero_mean = j.value("nonzero_mean", true);
  d.scan_fraction = j.value("scan_fraction", 0.0);
  d.stream_id = j.value("stream_id", std::uint64_t{0});
  return d;
}

}  // namespace

Json to_json(const SynthConfig& c) {
  Json regions = Json::array();
  for (const auto& lib : c.regions) {
    Json peaks = Json::array();
    for (const auto& p : lib)
      peaks.push_back({{"center_cm", p.center_cm},
                       {"height", p.height},
                       {"width_cm", p.width_cm},
                       {"shape", shape_name(p.shape)}});
    regions.push_back(peaks);
  }
  Json j{
      {"sample_id", c.sample_id},
      {"axis", {{"start_cm", c.axis_start_cm}, {"end_cm", c.axis_end_cm}, {"n_points", c.axis_points}}},
      {"shape", {c.height, c.width}},
      {"layout",
       {{"blob_count", c.layout.blob_count},
        {"radius_min_px", c.layout.radius_min_px},
        {"radius_max_px", c.layout.radius_max_px}}},
      {"regions", regions},
      {"jitter",
       {{"height_frac", c.jitter.height_frac},
        {"center_cm", c.jitter.center_cm},
        {"width_frac", c.jitter.width_frac}}},
      {"thickness", {c.thickness_min, c.thickness_max}},
      {"baseline",
       {{"kind", kind_name(c.baseline.kind)},
        {"poly", c.baseline.poly},
        {"sigmoid_amp", c.baseline.sigmoid_amp},
        {"sigmoid_center_cm", c.baseline.sigmoid_center_cm},
        {"sigmoid_width_cm", c.baseline.sigmoid_width_cm},
        {"scale", c.baseline.scale}}},
      {"scatter",
       {{"offset_max", c.scatter.offset_max},
        {"slope_max", c.scatter.slope_max},
        {"curvature_max", c.scatter.curvature_max},
        {"sigmoid_amp_max", c.scatter.sigmoid_amp_max},
        {"sigmoid_center_lo_cm", c.scatter.sigmoid_center_lo_cm},
        {"sigmoid_center_hi_cm", c.scatter.sigmoid_center_hi_cm},
        {"sigmoid_width_cm", c.scatter.sigmoid_width_cm}}},
      {"noise_sigma", c.noise_sigma},
      {"scan_counts", c.scan_counts},
      {"seed", c.seed},
  };
  j["drift"] = c.drift ? drift_to_json(*c.drift) : Json(nullptr);
  return j;
}

SynthConfig synth_config_from_json(const Json& j) {
  SynthConfig c = reference_config();
  try {
    c.sample_id = j.value("sample_id", c.sample_id);
    if (j.contains("axis")) {
      const auto& a = j["axis"];
      c.axis_start_cm = a.value("start_cm", c.axis_start_cm);
      c.axis_end_cm = a.value("end_cm", c.axis_end_cm);
      c.axis_points = a.value("n_points", c.axis_points);
    }
    if (j.contains("shape")) {
      c.height = j["shape"].at(0).get<std::size_t>();
      c.width = j["shape"].at(1).get<std::size_t>();
    }
    if (j.contains("layout")) {
      const auto& l = j["layout"];
      c.layout.blob_count = l.value("blob_count", c.layout.blob_count);
      c.layout.radius_min_px = l.value("radius_min_px", c.layout.radius_min_px);
      c.layout.radius_max_px = l.value("radius_max_px", c.layout.radius_max_px);
    }
    if (j.contains("regions")) {
      c.regions.clear();
      for (const auto& lib : j["regions"]) {
        std::vector<PeakModel> peaks;
        for (const auto& p : lib)
          peaks.push_back({p.at("center_cm").get<double>(), p.at("height").get<double>(),
                           p.at("width_cm").get<double>(), shape_from(p.value("shape", "gaussian"))});
        c.regions.push_back(std::move(peaks));
      }
    }
    if (j.contains("jitter")) {
      const auto& q = j["jitter"];
      c.jitter.height_frac = q.value("height_frac", c.jitter.height_frac);
      c.jitter.center_cm = q.value("center_cm", c.jitter.center_cm);
      c.jitter.width_frac = q.value("width_frac", c.jitter.width_frac);
    }
    if (j.contains("thickness")) {
      c.thickness_min = j["thickness"].at(0).get<double>();
      c.thickness_max = j["thickness"].at(1).get<double>();
    }
    if (j.contains("baseline")) {
      const auto& b = j["baseline"];
      c.baseline.kind = kind_from(b.value("kind", kind_name(c.baseline.kind)));
      c.baseline.poly = b.value("poly", c.baseline.poly);
      c.baseline.sigmoid_amp = b.value("sigmoid_amp", c.baseline.sigmoid_amp);
      c.baseline.sigmoid_center_cm = b.value("sigmoid_center_cm", c.baseline.sigmoid_center_cm);
      c.baseline.sigmoid_width_cm = b.value("sigmoid_width_cm", c.baseline.sigmoid_width_cm);
      c.baseline.scale = b.value("scale", c.baseline.scale);
    }
    if (j.contains("scatter")) {
      const auto& s = j["scatter"];
      c.scatter.offset_max = s.value("offset_max", c.scatter.offset_max);
      c.scatter.slope_max = s.value("slope_max", c.scatter.slope_max);
      c.scatter.curvature_max = s.value("curvature_max", c.scatter.curvature_max);
      c.scatter.sigmoid_amp_max = s.value("sigmoid_amp_max", c.scatter.sigmoid_amp_max);
      c.scatter.sigmoid_center_lo_cm = s.value("sigmoid_center_lo_cm", c.scatter.sigmoid_center_lo_cm);
      c.scatter.sigmoid_center_hi_cm = s.value("sigmoid_center_hi_cm", c.scatter.sigmoid_center_hi_cm);
      c.scatter.sigmoid_width_cm = s.value("sigmoid_width_cm", c.scatter.sigmoid_width_cm);
    }
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.scan_counts = j.value("scan_counts", c.scan_counts);
    c.seed = j.value("seed", c.seed);
    if (j.contains("drift") && !j["drift"].is_null()) c.drift = drift_from_json(j["drift"]);
    else c.drift.reset();
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("malformed synth config: ") + e.what());
  }
  validate(c);
  return c;
}

Json to_json(const DatasetConfig& cfg) {
  Json samples = Json::array();
  for (const auto& s : cfg.samples) samples.push_back(to_json(s));
  return {{"samples", samples}};
}

DatasetConfig dataset_config_from_json(const Json& j) {
  DatasetConfig d;
  if (!j.contains("samples") || !j["samples"].is_array())
    fail(ErrorCode::InvalidConfig, "dataset config needs a 'samples' array");
  for (const auto& s : j["samples"]) d.samples.push_back(synth_config_from_json(s));
  return d;
}

void write_sample(const SynthOutput& out, const std::filesystem::path& dir) {
  for (const auto& [n, cube] : out.scans) save_cube(cube, dir / ("scan_" + std::to_string(n)));
  save_cube(out.clean, dir / "truth" / "clean");
  save_cube(out.baseline, dir / "truth" / "baseline");
  save_mask(out.mask_truth, out.clean.height(), out.clean.width(), dir / "truth" / "mask.json");
}

void write_dataset(const DatasetConfig& cfg, const std::filesystem::path& dir) {
  for (const auto& c : cfg.samples) validate(c);
  for (std::size_t i = 0; i < cfg.samples.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (cfg.samples[i].sample_id == cfg.samples[j].sample_id)
        fail(ErrorCode::InvalidConfig, "duplicate sample_id '" + cfg.samples[i].sample_id + "'");
  write_json(to_json(cfg), dir / "dataset.json");
  for (const auto& c : cfg.samples) write_sample(gen_cube(c), dir / c.sample_id);
}

}  // namespace ftir::synth
