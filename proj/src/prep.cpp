#include "ftir/prep.hpp"

#include <algorithm>
#include <cmath>

namespace ftir::prep {

double otsu_threshold(std::span<const double> values) {
  constexpr int kBins = 256;
  if (values.size() < 2) fail(ErrorCode::DegenerateDistribution, "Otsu needs at least 2 values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) fail(ErrorCode::DegenerateDistribution, "all values are equal");

  const double width = (hi - lo) / kBins;
  std::vector<double> hist(kBins, 0.0);
  for (double v : values) {
    auto b = static_cast<int>(std::floor((v - lo) / (hi - lo) * kBins));
    hist[static_cast<std::size_t>(std::clamp(b, 0, kBins - 1))] += 1.0;
  }

  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += hist[b] * (b + 0.5);

  // Candidate k splits bins [0, k) | [k, 256); threshold = lo + k * width.
  double w0 = 0.0, sum0 = 0.0;
  double best = -1.0;
  int best_k = 1;
  for (int k = 1; k < kBins; ++k) {
    w0 += hist[k - 1];
    sum0 += hist[k - 1] * (k - 0.5);
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = (w0 / total) * (w1 / total) * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return lo + best_k * width;
}

std::vector<double> mask_scores(const HyperspectralCube& cube, Band fingerprint, Band ch) {
  std::vector<double> scores(cube.pixel_count());
  for (std::size_t y = 0; y < cube.height(); ++y)
    for (std::size_t x = 0; x < cube.width(); ++x) {
      const auto px = cube.pixel(x, y);
      scores[y * cube.width() + x] =
          integrate_band(cube.axis(), px, fingerprint.lo_cm, fingerprint.hi_cm) +
          integrate_band(cube.axis(), px, ch.lo_cm, ch.hi_cm);
    }
  return scores;
}

std::vector<std::uint8_t> foreground_mask(const HyperspectralCube& cube, Band fingerprint, Band ch) {
  const auto scores = mask_scores(cube, fingerprint, ch);
  const double t = otsu_threshold(scores);
  std::vector<std::uint8_t> mask(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) mask[i] = scores[i] > t;
  return mask;
}

std::vector<double> background_spectrum(const HyperspectralCube& cube,
                                        std::span<const std::uint8_t> mask) {
  if (mask.size() != cube.pixel_count()) fail(ErrorCode::ShapeMismatch, "mask shape");
  const std::size_t L = cube.bands();
  std::vector<double> bg(L, 0.0);
  std::size_t n_bg = 0;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (mask[p]) continue;
    ++n_bg;
    const auto px = cube.data().subspan(p * L, L);
    for (std::size_t i = 0; i < L; ++i) bg[i] += px[i];
  }
  if (n_bg == 0) fail(ErrorCode::NoBackgroundPixels, "mask has no background pixel");
  for (double& v : bg) v /= static_cast<double>(n_bg);
  return bg;
}

HyperspectralCube subtract_background(const HyperspectralCube& cube,
                                      std::span<const std::uint8_t> mask) {
  if (mask.size() != cube.pixel_count()) fail(ErrorCode::ShapeMismatch, "mask shape");
  if (std::none_of(mask.begin(), mask.end(), [](auto m) { return m != 0; }))
    fail(ErrorCode::NoForegroundPixels, "mask has no foreground pixel");
  const auto bg = background_spectrum(cube, mask);
  const std::size_t L = cube.bands();
  std::vector<double> data(cube.data().begin(), cube.data().end());
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    for (std::size_t i = 0; i < L; ++i) data[p * L + i] -= bg[i];
  }
  return HyperspectralCube(cube.height(), cube.width(), cube.axis_ptr(), std::move(data),
                           cube.sample_id(), cube.scan_count(),
                           std::vector<std::uint8_t>(mask.begin(), mask.end()));
}

std::vector<std::size_t> kept_indices(const WavenumberAxis& axis, const TrimSpec& spec) {
  const std::size_t n = axis.size();
  std::size_t first = 0, last = n;  // [first, last)
  if (axis.is_uniform()) {
    if (spec.drop_low + spec.drop_high + 2 > n)
      fail(ErrorCode::EmptyAfterTrim, "edge trim leaves fewer than 2 points");
    first = spec.drop_low;
    last = n - spec.drop_high;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = first; i < last; ++i) {
    const double x = axis.at(i);
    const bool dropped = std::any_of(spec.drop_ranges.begin(), spec.drop_ranges.end(),
                                     [x](const Band& b) { return x >= b.lo_cm && x <= b.hi_cm; });
    if (!dropped) kept.push_back(i);
  }
  if (kept.size() < 2) fail(ErrorCode::EmptyAfterTrim, "trim leaves fewer than 2 points");
  return kept;
}

AxisPtr trim_axis(const WavenumberAxis& axis, const TrimSpec& spec) {
  const auto kept = kept_indices(axis, spec);
  std::vector<double> pts;
  pts.reserve(kept.size());
  for (auto i : kept) pts.push_back(axis.at(i));
  return share(WavenumberAxis::explicit_points(std::move(pts)));
}

Spectrum trim(const Spectrum& s, const TrimSpec& spec) {
  const auto kept = kept_indices(s.axis(), spec);
  std::vector<double> pts, vals;
  for (auto i : kept) {
    pts.push_back(s.axis().at(i));
    vals.push_back(s[i]);
  }
  return Spectrum(share(WavenumberAxis::explicit_points(std::move(pts))), std::move(vals),
                  s.scan_count(), s.origin(), s.stats());
}

HyperspectralCube trim(const HyperspectralCube& cube, const TrimSpec& spec) {
  const auto kept = kept_indices(cube.axis(), spec);
  std::vector<double> pts;
  for (auto i : kept) pts.push_back(cube.axis().at(i));
  const std::size_t L = cube.bands();
  std::vector<double> data;
  data.reserve(cube.pixel_count() * kept.size());
  for (std::size_t p = 0; p < cube.pixel_count(); ++p)
    for (auto i : kept) data.push_back(cube.data()[p * L + i]);
  return HyperspectralCube(cube.height(), cube.width(),
                           share(WavenumberAxis::explicit_points(std::move(pts))), std::move(data),
                           cube.sample_id(), cube.scan_count(), cube.mask());
}

std::vector<Spectrum> foreground_spectra(const HyperspectralCube& cube,
                                         std::span<const std::uint8_t> mask) {
  if (mask.size() != cube.pixel_count()) fail(ErrorCode::ShapeMismatch, "mask shape");
  std::vector<Spectrum> out;
  for (std::size_t y = 0; y < cube.height(); ++y)
    for (std::size_t x = 0; x < cube.width(); ++x)
      if (mask[y * cube.width() + x]) out.push_back(cube.spectrum(x, y));
  return out;
}

double jaccard(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "mask sizes differ");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]);
    uni += (a[i] || b[i]);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace ftir::prep
