#include "ftir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

namespace ftir::metrics {

namespace {

void same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorCode::ShapeMismatch, "lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  if (a.empty()) fail(ErrorCode::ShapeMismatch, "empty input");
}

}  // namespace

double rmse(std::span<const double> a, std::span<const double> b) {
  same_length(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

double mae(std::span<const double> a, std::span<const double> b) {
  same_length(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double sam(std::span<const double> a, std::span<const double> b) {
  same_length(a, b);
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) fail(ErrorCode::ZeroVector, "spectral angle of a zero vector");
  return std::acos(std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0));
}

double pcc(std::span<const double> a, std::span<const double> b) {
  same_length(a, b);
  if (a.size() < 2) fail(ErrorCode::DegenerateVariance, "correlation needs at least 2 points");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) fail(ErrorCode::DegenerateVariance, "correlation with a constant input");
  return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> r(v.size());
  for (std::size_t s = 0; s < idx.size();) {
    std::size_t e = s + 1;
    while (e < idx.size() && v[idx[e]] == v[idx[s]]) ++e;
    const double avg = 0.5 * static_cast<double>(s + e - 1) + 1.0;
    for (std::size_t k = s; k < e; ++k) r[idx[k]] = avg;
    s = e;
  }
  return r;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  same_length(a, b);
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pcc(ra, rb);
}

double prominence(std::span<const double> v, std::size_t peak) {
  const double h = v[peak];
  double left_min = h;
  for (std::size_t i = peak; i-- > 0;) {
    if (v[i] > h) break;
    left_min = std::min(left_min, v[i]);
  }
  double right_min = h;
  for (std::size_t i = peak + 1; i < v.size(); ++i) {
    if (v[i] > h) break;
    right_min = std::min(right_min, v[i]);
  }
  return h - std::max(left_min, right_min);
}

std::vector<std::size_t> detect_peaks(std::span<const double> v, const WavenumberAxis& axis, double prominence_frac,
                                      double min_sep_cm) {
  if (v.size() != axis.size()) fail(ErrorCode::LengthMismatch, "values and axis differ in length");
  if (v.size() < 3) return {};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double need = prominence_frac * (*hi - *lo);
  std::vector<std::size_t> cand;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1] && prominence(v, i) >= need) cand.push_back(i);

  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t c : cand) {
    const bool clash = std::any_of(kept.begin(), kept.end(),
                                   [&](std::size_t k) { return std::abs(axis.at(k) - axis.at(c)) < min_sep_cm; });
    if (!clash) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

PeakMatching match_peaks(std::span<const std::size_t> pred, std::span<const std::size_t> truth,
                         const WavenumberAxis& axis, double window) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;  // distance, truth pos, pred pos
  for (std::size_t t = 0; t < truth.size(); ++t)
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double d = std::abs(axis.at(pred[p]) - axis.at(truth[t]));
      if (d <= window) pairs.emplace_back(d, t, p);
    }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> t_used(truth.size(), false), p_used(pred.size(), false);
  PeakMatching out;
  for (const auto& [d, t, p] : pairs) {
    if (t_used[t] || p_used[p]) continue;
    t_used[t] = p_used[p] = true;
    out.matches.push_back({truth[t], pred[p], d});
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const PeakMatch& a, const PeakMatch& b) { return a.truth < b.truth; });
  out.missed = truth.size() - out.matches.size();
  out.hallucinated = pred.size() - out.matches.size();
  return out;
}

PeakMatching peak_position_error(std::span<const double> pred, std::span<const double> truth,
                                 const WavenumberAxis& axis, const PeakConfig& cfg) {
  auto pp = detect_peaks(pred, axis, cfg.prominence_frac, cfg.min_sep_cm);
  auto tp = detect_peaks(truth, axis, cfg.prominence_frac, cfg.min_sep_cm);
  if (!cfg.bands_cm.empty()) {
    auto off_band = [&](std::size_t i) {
      return std::none_of(cfg.bands_cm.begin(), cfg.bands_cm.end(),
                          [&](double b) { return std::abs(axis.at(i) - b) <= cfg.match_window_cm; });
    };
    std::erase_if(pp, off_band);
    std::erase_if(tp, off_band);
  }
  return match_peaks(pp, tp, axis, cfg.match_window_cm);
}

std::vector<double> peak_height_bias(std::span<const double> pred, std::span<const double> truth,
                                     const std::vector<PeakMatch>& matches) {
  if (matches.empty()) fail(ErrorCode::NoMatches, "no matched peaks");
  std::vector<double> out;
  out.reserve(matches.size());
  for (const auto& m : matches) out.push_back(pred[m.pred] - truth[m.truth]);
  return out;
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) fail(ErrorCode::EmptyDataset, "percentile of an empty list");
  if (!(q >= 0.0 && q <= 100.0)) fail(ErrorCode::InvalidParams, "percentile must be in [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : values) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.p25 = percentile(values, 25.0);
  s.p50 = percentile(values, 50.0);
  s.p75 = percentile(values, 75.0);
  s.iqr = s.p75 - s.p25;
  return s;
}

double silent_region_noise(const WavenumberAxis& axis, std::span<const double> values, prep::Band band) {
  if (values.size() != axis.size()) fail(ErrorCode::LengthMismatch, "values and axis differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double w = axis.at(i);
    if (w >= band.lo_cm && w <= band.hi_cm) {
      x.push_back(w);
      y.push_back(values[i]);
    }
  }
  if (x.size() < 3)
    fail(ErrorCode::EmptyBand, "fewer than 3 points in [" + std::to_string(band.lo_cm) + ", " +
                                   std::to_string(band.hi_cm) + "]");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss += r * r;
  }
  return std::sqrt(ss / (n - 1.0));
}

double silent_region_noise(const Spectrum& s, prep::Band band) {
  return silent_region_noise(s.axis(), s.values(), band);
}

double reduction_percent(double e_raw, double e_method) {
  if (!(e_raw > 0.0)) fail(ErrorCode::ZeroBaselineError, "raw error must be positive");
  return 100.0 * (1.0 - e_method / e_raw);
}

MetricSet compute_metrics(const Spectrum& pred, const Spectrum& truth, const PeakConfig& cfg) {
  if (pred.domain() != Domain::minmax01 || truth.domain() != Domain::minmax01)
    fail(ErrorCode::DomainTagMismatch, "metrics compare normalized spectra only (got " +
                                           std::string(to_string(pred.domain())) + " vs " +
                                           std::string(to_string(truth.domain())) + ")");
  MetricSet m;
  m.rmse = rmse(pred.values(), truth.values());
  m.mae = mae(pred.values(), truth.values());
  try {
    m.sam = sam(pred.values(), truth.values());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVector) throw;
    m.sam = std::numbers::pi / 2;
  }
  try {
    m.pcc = pcc(pred.values(), truth.values());
    m.spearman = spearman(pred.values(), truth.values());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateVariance) throw;
    m.pcc = m.spearman = 0.0;
  }
  const auto pm = peak_position_error(pred.values(), truth.values(), truth.axis(), cfg);
  for (const auto& x : pm.matches) {
    m.peak_pos_errors.push_back(x.error_cm);
    m.peak_height_errors.push_back(pred[x.pred] - truth[x.truth]);
  }
  m.hallucinated_peaks = pm.hallucinated;
  m.missed_peaks = pm.missed;
  return m;
}

}  // namespace ftir::metrics
