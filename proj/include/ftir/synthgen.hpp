#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftir/core.hpp"
#include "ftir/json_io.hpp"
#include "ftir/rng.hpp"

namespace ftir::synth {

enum class PeakShape { gaussian, lorentzian };

struct PeakModel {
  double center_cm = 1650.0;
  double height = 1.0;    // absorbance, > 0
  double width_cm = 30.0;  // FWHM, >= 2 axis steps
  PeakShape shape = PeakShape::gaussian;
};

/// Smooth background continuum. Polynomial coefficients are in the reduced
/// coordinate t in [-1, 1] spanning the axis; the sigmoid rises towards high
/// wavenumber.
struct BaselineModel {
  enum class Kind { polynomial, sigmoid, sum };
  Kind kind = Kind::sum;
  std::vector<double> poly;
  double sigmoid_amp = 0.0;
  double sigmoid_center_cm = 2500.0;
  double sigmoid_width_cm = 400.0;
  double scale = 1.0;

  std::vector<double> evaluate(const WavenumberAxis& axis) const;
};

/// Per-pixel scattering baseline drawn on top of the shared baseline for
/// foreground pixels. Each term is drawn uniformly from [0, max] (offset,
/// sigmoid) or [-max, max] (slope, curvature) and scaled by thickness.
struct ScatterModel {
  double offset_max = 0.0;
  double slope_max = 0.0;
  double curvature_max = 0.0;
  double sigmoid_amp_max = 0.0;
  double sigmoid_center_lo_cm = 2000.0;
  double sigmoid_center_hi_cm = 3200.0;
  double sigmoid_width_cm = 350.0;
};

struct DriftComponent {
  double amplitude = 0.0;       // std of the realized profile
  double correlation_cm = 50.0;  // squared-exponential length scale
};

/// Environmental drift. With `nonzero_mean`, each pixel carries a persistent
/// drift profile shared by all of its scans (it survives averaging); each
/// scan additionally draws a fresh fluctuation scaled by `scan_fraction`.
struct DriftModel {
  std::vector<DriftComponent> components;
  bool nonzero_mean = true;
  double scan_fraction = 0.0;
  std::uint64_t stream_id = 0;
};

struct LayoutModel {
  int blob_count = 6;
  double radius_min_px = 3.0;
  double radius_max_px = 5.0;
};

struct PeakJitter {
  double height_frac = 0.15;
  double center_cm = 2.0;
  double width_frac = 0.10;
};

struct SynthConfig {
  std::string sample_id = "sample";
  double axis_start_cm = 950.0;
  double axis_end_cm = 4000.0;
  std::size_t axis_points = 1584;
  std::size_t height = 32;
  std::size_t width = 32;
  LayoutModel layout;
  std::vector<std::vector<PeakModel>> regions;  // one peak library per region
  PeakJitter jitter;
  double thickness_min = 0.6;
  double thickness_max = 1.0;
  BaselineModel baseline;
  ScatterModel scatter;
  double noise_sigma = 0.02;
  std::vector<int> scan_counts{1, 8, 32};
  std::optional<DriftModel> drift;
  std::uint64_t seed = 1;
};

struct DatasetConfig {
  std::vector<SynthConfig> samples;
};

struct SynthOutput {
  std::map<int, HyperspectralCube> scans;  // keyed by scan count
  HyperspectralCube clean;                 // peaks only
  HyperspectralCube baseline;              // everything non-averageable except peaks
  std::vector<std::uint8_t> mask_truth;
  std::vector<int> region;  // per pixel, -1 for background
};

double peak_value(const PeakModel& p, double x_cm);

/// Pointwise sum of peak shapes on the axis.
Spectrum gen_clean(std::span<const PeakModel> peaks, const AxisPtr& axis);

/// Per-pixel persistent drift and per-scan fluctuation source.
struct PixelDrift {
  const DriftModel* model = nullptr;
  std::vector<double> mean_profile;  // zeros when !nonzero_mean
  std::uint64_t scan_seed = 0;
};

/// Mean over n_scans realizations of clean + baseline + drift_k + noise_k
/// with noise_k ~ N(0, sigma) i.i.d. per point.
Spectrum simulate_scans(const Spectrum& clean, std::span<const double> baseline, double sigma,
                        int n_scans, const PixelDrift* drift, Rng& rng);

/// Smooth random profile (random Fourier features for a squared-exponential
/// kernel) with the given component amplitudes.
std::vector<double> smooth_random_profile(const WavenumberAxis& axis,
                                          std::span<const DriftComponent> components, Rng& rng);

/// Region index per pixel (-1 = background). Deterministic in cfg.seed.
std::vector<int> realize_layout(const SynthConfig& cfg);

/// The jittered, thickness-scaled peak library of one foreground pixel.
std::vector<PeakModel> pixel_peaks(const SynthConfig& cfg, std::size_t x, std::size_t y, int region);

SynthOutput gen_cube(const SynthConfig& cfg);

void validate(const SynthConfig& cfg);

// Presets.
std::vector<std::vector<PeakModel>> default_peak_library();
/// Drift-free single-sample reference config.
SynthConfig reference_config(std::uint64_t seed = 7);
/// Environmental-drift stress preset. On drift_config(7) the 1->32
/// silent-window noise ratio is ~3.7.
DriftModel drift_preset();
SynthConfig drift_config(std::uint64_t seed = 7);
/// Four-sample desk-scale benchmark dataset; sample 3 carries the drift preset.
DatasetConfig benchmark_dataset(std::uint64_t seed = 2024);

// JSON
Json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const Json& j);
Json to_json(const DatasetConfig& cfg);
DatasetConfig dataset_config_from_json(const Json& j);

/// Writes scan_<N>/ cubes and truth/{clean,baseline}/ + truth/mask.json.
void write_sample(const SynthOutput& out, const std::filesystem::path& dir);

/// dir/dataset.json plus one write_sample directory per sample_id.
void write_dataset(const DatasetConfig& cfg, const std::filesystem::path& dir);

}  // namespace ftir::synth
