#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftir/error.hpp"
#include "ftir/norm_stats.hpp"

namespace ftir {

/// Spectral axis in cm^-1. Either uniform (start, step, n) or an explicit,
/// strictly increasing point list (used after trimming). Uniform index
/// arithmetic is refused on explicit axes.
class WavenumberAxis {
 public:
  static WavenumberAxis uniform(double start_cm, double step_cm, std::size_t n_points);
  static WavenumberAxis explicit_points(std::vector<double> points_cm);

  bool is_uniform() const noexcept { return points_.empty(); }
  std::size_t size() const noexcept { return is_uniform() ? n_ : points_.size(); }

  /// Uniform axes only.
  double start() const;
  double step() const;

  double at(std::size_t i) const;
  double front() const { return at(0); }
  double back() const { return at(size() - 1); }

  /// Nearest grid index for a wavenumber. Uniform axes only.
  std::size_t index_of(double wavenumber_cm) const;

  /// Mean spacing, valid for both representations.
  double mean_step() const { return (back() - front()) / static_cast<double>(size() - 1); }

  std::vector<double> points() const;

  bool operator==(const WavenumberAxis& other) const;

 private:
  WavenumberAxis() = default;

  double start_ = 0.0;
  double step_ = 1.0;
  std::size_t n_ = 0;
  std::vector<double> points_;
};

using AxisPtr = std::shared_ptr<const WavenumberAxis>;

WavenumberAxis make_axis(double start_cm, double end_cm, std::size_t n_points);
AxisPtr share(WavenumberAxis axis);

struct SpectrumOrigin {
  std::string sample_id;
  int x = 0;
  int y = 0;

  bool operator==(const SpectrumOrigin&) const = default;
};

/// One absorbance trace bound to an axis. Immutable; values are finite and
/// match the axis length.
class Spectrum {
 public:
  Spectrum(AxisPtr axis, std::vector<double> values, int scan_count = 1,
           std::optional<SpectrumOrigin> origin = std::nullopt,
           std::optional<NormStats> stats = std::nullopt);

  const WavenumberAxis& axis() const { return *axis_; }
  const AxisPtr& axis_ptr() const { return axis_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  int scan_count() const { return scan_count_; }
  const std::optional<SpectrumOrigin>& origin() const { return origin_; }
  const std::optional<NormStats>& stats() const { return stats_; }
  Domain domain() const { return stats_ ? stats_->domain : Domain::raw; }

  /// Same axis and provenance, new values and stats.
  Spectrum with_values(std::vector<double> values, std::optional<NormStats> stats) const;

 private:
  AxisPtr axis_;
  std::vector<double> values_;
  int scan_count_ = 1;
  std::optional<SpectrumOrigin> origin_;
  std::optional<NormStats> stats_;
};

/// H x W grid of spectra, C-order over (y, x, lambda).
class HyperspectralCube {
 public:
  HyperspectralCube(std::size_t height, std::size_t width, AxisPtr axis, std::vector<double> data,
                    std::string sample_id, int scan_count,
                    std::optional<std::vector<std::uint8_t>> mask = std::nullopt);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t bands() const { return axis_->size(); }
  std::size_t pixel_count() const { return height_ * width_; }
  const WavenumberAxis& axis() const { return *axis_; }
  const AxisPtr& axis_ptr() const { return axis_; }
  std::span<const double> data() const { return data_; }
  const std::string& sample_id() const { return sample_id_; }
  int scan_count() const { return scan_count_; }
  const std::optional<std::vector<std::uint8_t>>& mask() const { return mask_; }

  std::span<const double> pixel(std::size_t x, std::size_t y) const;
  Spectrum spectrum(std::size_t x, std::size_t y) const;

  HyperspectralCube with_mask(std::optional<std::vector<std::uint8_t>> mask) const;

 private:
  std::size_t height_;
  std::size_t width_;
  AxisPtr axis_;
  std::vector<double> data_;
  std::string sample_id_;
  int scan_count_;
  std::optional<std::vector<std::uint8_t>> mask_;
};

/// Trapezoidal integral over the axis points inside [lo_cm, hi_cm].
double integrate_band(const WavenumberAxis& axis, std::span<const double> values, double lo_cm,
                      double hi_cm);
double integrate_band(const Spectrum& s, double lo_cm, double hi_cm);

inline constexpr const char* kCubeFormatVersion = "ftir-cube-v1";

void save_cube(const HyperspectralCube& cube, const std::filesystem::path& dir);
HyperspectralCube load_cube(const std::filesystem::path& dir);

void save_mask(std::span<const std::uint8_t> mask, std::size_t height, std::size_t width,
               const std::filesystem::path& file);
std::vector<std::uint8_t> load_mask(const std::filesystem::path& file, std::size_t height,
                                    std::size_t width);

/// Two-column CSV with header `wavenumber_cm,value`.
void write_spectrum_csv(const WavenumberAxis& axis, std::span<const double> values,
                        const std::filesystem::path& file);
std::pair<std::vector<double>, std::vector<double>> read_spectrum_csv(
    const std::filesystem::path& file);

}  // namespace ftir
