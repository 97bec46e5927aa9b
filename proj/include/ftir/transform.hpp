#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ftir/core.hpp"
#include "ftir/norm_stats.hpp"

namespace ftir::transform {

/// Standard Normal Variate with the sample (n-1) standard deviation.
/// Refuses spectra already tagged snv/minmax01.
std::pair<Spectrum, NormStats> snv(const Spectrum& s);

/// s * std + mean. The stats must carry SNV parameters.
Spectrum inverse_snv(const Spectrum& s, const NormStats& stats);

/// Global min/max over every point of every spectrum.
MinMax minmax_fit(std::span<const Spectrum> dataset);
MinMax minmax_fit(std::span<const std::vector<double>> dataset);

/// (s - min) / (max - min); no clipping.
Spectrum minmax_apply(const Spectrum& s, const MinMax& range);
Spectrum minmax_invert(const Spectrum& s, const MinMax& range);

/// snv then minmax_apply. The result carries the full NormStats.
Spectrum normalize(const Spectrum& s, const MinMax& range);

/// The Physics Bridge: inverse min-max followed by inverse SNV, returning a
/// raw-domain (absorbance) spectrum.
Spectrum bridge_invert(const Spectrum& s_norm, const NormStats& stats);

// Span-level kernels used by the pipelines.
SnvStats snv_stats(std::span<const double> v);
void snv_inplace(std::span<double> v, const SnvStats& st);
void minmax_inplace(std::span<double> v, const MinMax& r);

}  // namespace ftir::transform
