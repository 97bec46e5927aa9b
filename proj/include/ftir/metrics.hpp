#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ftir/core.hpp"
#include "ftir/prep.hpp"

namespace ftir::metrics {

double rmse(std::span<const double> a, std::span<const double> b);
double mae(std::span<const double> a, std::span<const double> b);
/// Spectral angle in radians.
double sam(std::span<const double> a, std::span<const double> b);
double pcc(std::span<const double> a, std::span<const double> b);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

/// 1-based average ranks (ties share the mean of their positions).
std::vector<double> average_ranks(std::span<const double> v);

struct PeakConfig {
  double prominence_frac = 0.05;
  double min_sep_cm = 8.0;
  double match_window_cm = 16.0;
  /// When non-empty, only detected peaks within match_window_cm of one of
  /// these positions take part in matching.
  std::vector<double> bands_cm;
};

/// Strict interior local maxima whose prominence reaches
/// prominence_frac * (max - min); within min_sep_cm the taller peak wins
/// (lower index on equal height). Sorted by index.
std::vector<std::size_t> detect_peaks(std::span<const double> values, const WavenumberAxis& axis,
                                      double prominence_frac = 0.05, double min_sep_cm = 8.0);

/// Height above the higher of the two flanking minima, each taken up to the
/// nearest strictly taller point (or the edge).
double prominence(std::span<const double> values, std::size_t peak);

struct PeakMatch {
  std::size_t truth = 0;  // index into the spectrum
  std::size_t pred = 0;
  double error_cm = 0.0;
};

struct PeakMatching {
  std::vector<PeakMatch> matches;  // sorted by truth index
  std::size_t hallucinated = 0;    // unmatched predicted peaks
  std::size_t missed = 0;          // unmatched truth peaks
};

/// Greedy nearest matching: candidate pairs within the window are taken in
/// order of distance (ties by truth, then pred index), each peak used once.
PeakMatching match_peaks(std::span<const std::size_t> pred_peaks, std::span<const std::size_t> truth_peaks,
                         const WavenumberAxis& axis, double match_window_cm = 16.0);

PeakMatching peak_position_error(std::span<const double> pred, std::span<const double> truth,
                                 const WavenumberAxis& axis, const PeakConfig& cfg = {});

/// height_pred - height_truth for every match; NoMatches when empty.
std::vector<double> peak_height_bias(std::span<const double> pred, std::span<const double> truth,
                                     const std::vector<PeakMatch>& matches);

/// Linear interpolation between closest ranks, q in [0, 100].
double percentile(std::span<const double> values, double q);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample std, 0 for n < 2
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double iqr = 0.0;
};

Summary summarize(std::span<const double> values);

/// Sample std inside the band after removing a least-squares line.
double silent_region_noise(const WavenumberAxis& axis, std::span<const double> values,
                           prep::Band band = prep::kSilentBand);
double silent_region_noise(const Spectrum& s, prep::Band band = prep::kSilentBand);

/// 100 * (1 - e_method / e_raw).
double reduction_percent(double e_raw, double e_method);

struct MetricSet {
  double rmse = 0.0;
  double mae = 0.0;
  double sam = 0.0;
  double pcc = 0.0;
  double spearman = 0.0;
  std::vector<double> peak_pos_errors;
  std::vector<double> peak_height_errors;
  std::size_t hallucinated_peaks = 0;
  std::size_t missed_peaks = 0;
};

/// Both spectra must be in the minmax01 domain.
MetricSet compute_metrics(const Spectrum& pred, const Spectrum& truth, const PeakConfig& cfg = {});

}  // namespace ftir::metrics
