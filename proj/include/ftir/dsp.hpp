#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ftir/core.hpp"

namespace ftir::dsp {

struct SgParams {
  int window = 11;  // odd, >= 3
  int order = 3;    // 0 <= order < window

  bool operator==(const SgParams&) const = default;
};

struct SnipParams {
  int iterations = 40;            // max clipping half-window m, in points
  bool decreasing_window = true;  // m -> 1 when true, 1 -> m otherwise
  bool lls_transform = true;      // log-log-sqrt compression around clipping

  bool operator==(const SnipParams&) const = default;
};

/// Least-squares polynomial convolution weights, length `window`, indexed
/// from offset -half to +half. For derivative d the weights return the d-th
/// derivative in index units.
std::vector<double> sg_coefficients(const SgParams& p, int derivative = 0);

/// Convolution with the SG kernel; mirror reflection at the edges
/// (x[-k] = x[k], no edge repeat). Output length equals input length.
std::vector<double> sg_smooth(std::span<const double> values, const SgParams& p);
Spectrum sg_smooth(const Spectrum& s, const SgParams& p);

/// SNIP peak-clipping baseline estimate.
std::vector<double> snip_baseline(std::span<const double> values, const SnipParams& p);
Spectrum snip_baseline(const Spectrum& s, const SnipParams& p);

/// values - snip_baseline(values).
std::vector<double> snip_correct(std::span<const double> values, const SnipParams& p);
Spectrum snip_correct(const Spectrum& s, const SnipParams& p);

struct SgSearchSpace {
  std::vector<int> windows;
  std::vector<int> orders;
};

/// Windows 5..41 step 2, orders 2..5.
SgSearchSpace default_sg_space();

struct SgGridCell {
  SgParams params;
  double objective = 0.0;
};

struct SgSearchResult {
  SgParams best;
  double objective = 0.0;
  std::vector<SgGridCell> grid;  // every valid cell, in evaluation order
};

/// Mean over pairs of MSE(sg_smooth(lq), hq).
double sg_objective(std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
                    const SgParams& p);

/// Exhaustive grid search. Invalid cells (order >= window, window > length)
/// are skipped. Objectives within 1e-12 (relative) are ties; ties go to the
/// smaller window, then the smaller order.
SgSearchResult optimize_sg(std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
                           const SgSearchSpace& space);

/// Seeded random subset of the grid (without replacement), same tie-break.
SgSearchResult optimize_sg_random(
    std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
    const SgSearchSpace& space, std::size_t n_trials, std::uint64_t seed);

}  // namespace ftir::dsp
