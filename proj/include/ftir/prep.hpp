#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ftir/core.hpp"

namespace ftir::prep {

struct Band {
  double lo_cm = 0.0;
  double hi_cm = 0.0;
};

inline constexpr Band kFingerprintBand{950.0, 1800.0};
inline constexpr Band kChStretchBand{2800.0, 3000.0};
inline constexpr Band kSilentBand{2250.0, 2401.0};

struct TrimSpec {
  std::size_t drop_low = 10;
  std::size_t drop_high = 10;
  std::vector<Band> drop_ranges{kSilentBand};
};

/// Otsu threshold over a 256-bin histogram spanning [min, max]. Returns the
/// bin edge that maximizes between-class variance; the lowest edge wins ties.
double otsu_threshold(std::span<const double> values);

/// Per-pixel integrated fingerprint + C-H intensity.
std::vector<double> mask_scores(const HyperspectralCube& cube, Band fingerprint, Band ch);

/// score > otsu_threshold(scores); 1 = foreground.
std::vector<std::uint8_t> foreground_mask(const HyperspectralCube& cube, Band fingerprint = kFingerprintBand,
                                          Band ch = kChStretchBand);

/// Pointwise mean over mask == 0 pixels.
std::vector<double> background_spectrum(const HyperspectralCube& cube,
                                        std::span<const std::uint8_t> mask);

/// Subtracts the mean background spectrum from every foreground pixel.
/// Background pixels are left as they are. The result carries `mask`.
HyperspectralCube subtract_background(const HyperspectralCube& cube,
                                      std::span<const std::uint8_t> mask);

/// Indices of the axis points kept by `spec`. Edge points are only dropped on
/// uniform axes (an explicit axis has already been trimmed), which makes trim
/// idempotent.
std::vector<std::size_t> kept_indices(const WavenumberAxis& axis, const TrimSpec& spec);
AxisPtr trim_axis(const WavenumberAxis& axis, const TrimSpec& spec);

Spectrum trim(const Spectrum& s, const TrimSpec& spec);
HyperspectralCube trim(const HyperspectralCube& cube, const TrimSpec& spec);

/// Foreground spectra in row-major pixel order, each tagged with its origin.
std::vector<Spectrum> foreground_spectra(const HyperspectralCube& cube,
                                         std::span<const std::uint8_t> mask);

double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace ftir::prep
