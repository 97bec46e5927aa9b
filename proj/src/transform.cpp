#include "ftir/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftir::transform {

SnvStats snv_stats(std::span<const double> v) {
  if (v.size() < 2) fail(ErrorCode::DegenerateSpectrum, "SNV needs at least 2 points");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  if (!(sd > 0.0)) fail(ErrorCode::DegenerateSpectrum, "spectrum has zero variance");
  return {mean, sd};
}

void snv_inplace(std::span<double> v, const SnvStats& st) {
  for (double& x : v) x = (x - st.mean) / st.std;
}

void minmax_inplace(std::span<double> v, const MinMax& r) {
  const double span = r.max - r.min;
  for (double& x : v) x = (x - r.min) / span;
}

namespace {

void check_range(const MinMax& r) {
  if (!(r.max > r.min)) fail(ErrorCode::DegenerateRange, "min-max range has max <= min");
}

}  // namespace

std::pair<Spectrum, NormStats> snv(const Spectrum& s) {
  if (s.domain() != Domain::raw)
    fail(ErrorCode::DomainTagMismatch, "snv applied to a spectrum already in domain " +
                                           std::string(to_string(s.domain())));
  const SnvStats st = snv_stats(s.values());
  std::vector<double> out(s.values().begin(), s.values().end());
  snv_inplace(out, st);
  NormStats stats{st, std::nullopt, Domain::snv};
  return {s.with_values(std::move(out), stats), stats};
}

Spectrum inverse_snv(const Spectrum& s, const NormStats& stats) {
  if (!stats.snv) fail(ErrorCode::MissingStats, "inverse_snv without SNV statistics");
  if (s.stats() && s.domain() == Domain::minmax01)
    fail(ErrorCode::DomainTagMismatch, "inverse_snv on a min-max scaled spectrum");
  std::vector<double> out(s.values().begin(), s.values().end());
  for (double& x : out) x = x * stats.snv->std + stats.snv->mean;
  NormStats after = stats;
  after.domain = Domain::raw;
  return s.with_values(std::move(out), after);
}

MinMax minmax_fit(std::span<const std::vector<double>> dataset) {
  if (dataset.empty()) fail(ErrorCode::DegenerateRange, "empty dataset");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : dataset) {
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!(hi > lo)) fail(ErrorCode::DegenerateRange, "all dataset values are equal");
  return {lo, hi};
}

MinMax minmax_fit(std::span<const Spectrum> dataset) {
  std::vector<std::vector<double>> vs;
  vs.reserve(dataset.size());
  for (const auto& s : dataset) vs.push_back(s.vector());
  return minmax_fit(std::span<const std::vector<double>>(vs));
}

Spectrum minmax_apply(const Spectrum& s, const MinMax& range) {
  check_range(range);
  if (s.domain() == Domain::minmax01)
    fail(ErrorCode::DomainTagMismatch, "min-max applied twice");
  std::vector<double> out(s.values().begin(), s.values().end());
  minmax_inplace(out, range);
  NormStats stats = s.stats().value_or(NormStats{});
  stats.range = range;
  stats.domain = Domain::minmax01;
  return s.with_values(std::move(out), stats);
}

Spectrum minmax_invert(const Spectrum& s, const MinMax& range) {
  check_range(range);
  if (s.stats() && s.domain() != Domain::minmax01)
    fail(ErrorCode::DomainTagMismatch, "minmax_invert on a spectrum not in minmax01");
  std::vector<double> out(s.values().begin(), s.values().end());
  const double span = range.max - range.min;
  for (double& x : out) x = x * span + range.min;
  NormStats stats = s.stats().value_or(NormStats{});
  stats.range = range;
  stats.domain = stats.snv ? Domain::snv : Domain::raw;
  return s.with_values(std::move(out), stats);
}

Spectrum normalize(const Spectrum& s, const MinMax& range) {
  return minmax_apply(snv(s).first, range);
}

Spectrum bridge_invert(const Spectrum& s_norm, const NormStats& stats) {
  if (stats.domain != Domain::minmax01)
    fail(ErrorCode::DomainTagMismatch, "bridge expects stats in the minmax01 domain, got " +
                                           std::string(to_string(stats.domain)));
  if (s_norm.stats() && s_norm.domain() != Domain::minmax01)
    fail(ErrorCode::DomainTagMismatch, "bridge input is tagged " +
                                           std::string(to_string(s_norm.domain())));
  if (!stats.range || !stats.snv) fail(ErrorCode::MissingStats, "bridge needs SNV and min-max stats");
  check_range(*stats.range);
  const double span = stats.range->max - stats.range->min;
  std::vector<double> out(s_norm.values().begin(), s_norm.values().end());
  for (double& x : out) x = (x * span + stats.range->min) * stats.snv->std + stats.snv->mean;
  NormStats after = stats;
  after.domain = Domain::raw;
  return s_norm.with_values(std::move(out), after);
}

}  // namespace ftir::transform
