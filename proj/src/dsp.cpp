#include "ftir/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace ftir::dsp {

namespace {

void validate(const SgParams& p) {
  if (p.window < 3 || p.window % 2 == 0)
    fail(ErrorCode::InvalidParams, "SG window must be odd and >= 3");
  if (p.order < 0 || p.order >= p.window)
    fail(ErrorCode::InvalidParams, "SG order must satisfy 0 <= order < window");
}

double lls_forward(double y) { return std::log(std::log(std::sqrt(y + 1.0) + 1.0) + 1.0); }

double lls_inverse(double v) {
  const double t = std::exp(std::exp(v) - 1.0) - 1.0;
  return t * t - 1.0;
}

// Orders 2k and 2k+1 share one smoothing kernel, so their objectives differ
// only by rounding; objectives this close count as ties.
constexpr double kTieTolerance = 1e-12;

bool better(const SgGridCell& a, const SgGridCell& b) {
  const double tol = kTieTolerance * std::max(std::abs(a.objective), std::abs(b.objective));
  if (std::abs(a.objective - b.objective) > tol) return a.objective < b.objective;
  if (a.params.window != b.params.window) return a.params.window < b.params.window;
  return a.params.order < b.params.order;
}

std::size_t shortest(std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs) {
  std::size_t n = pairs.front().first.size();
  for (const auto& [lq, hq] : pairs) {
    if (lq.size() != hq.size()) fail(ErrorCode::LengthMismatch, "LQ/HQ pair length mismatch");
    n = std::min(n, lq.size());
  }
  return n;
}

SgSearchResult search(std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
                      const std::vector<SgParams>& cells) {
  if (cells.empty()) fail(ErrorCode::EmptySpace, "no valid (window, order) cell to evaluate");
  SgSearchResult r;
  r.grid.reserve(cells.size());
  for (const auto& p : cells) r.grid.push_back({p, sg_objective(pairs, p)});
  const SgGridCell* best = &r.grid.front();
  for (const auto& c : r.grid)
    if (better(c, *best)) best = &c;
  r.best = best->params;
  r.objective = best->objective;
  return r;
}

std::vector<SgParams> valid_cells(const SgSearchSpace& space, std::size_t length) {
  std::vector<SgParams> cells;
  for (int w : space.windows) {
    for (int o : space.orders) {
      if (w < 3 || w % 2 == 0 || o < 0 || o >= w || static_cast<std::size_t>(w) > length) continue;
      cells.push_back({w, o});
    }
  }
  return cells;
}

}  // namespace

std::vector<double> sg_coefficients(const SgParams& p, int derivative) {
  validate(p);
  if (derivative < 0 || derivative > p.order)
    fail(ErrorCode::InvalidParams, "derivative must lie in [0, order]");
  const int half = p.window / 2;
  // On a symmetric window the fit of order o and o + 1 share the d-th
  // derivative weights when o - d is even; use one of them for both so the
  // pair is bit-identical.
  const int order = (p.order - derivative) % 2 == 1 ? p.order - 1 : p.order;
  Eigen::MatrixXd A(p.window, order + 1);
  for (int i = -half; i <= half; ++i) {
    double xp = 1.0;
    for (int j = 0; j <= order; ++j) {
      A(i + half, j) = xp;
      xp *= i;
    }
  }
  // Row `derivative` of the pseudo-inverse maps samples to the fitted
  // polynomial's coefficient of x^d; scaling by d! gives the derivative at 0.
  const Eigen::MatrixXd pinv =
      A.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(p.window, p.window));
  double fact = 1.0;
  for (int k = 2; k <= derivative; ++k) fact *= k;
  std::vector<double> w(p.window);
  for (int i = 0; i < p.window; ++i) w[i] = fact * pinv(derivative, i);
  // Even derivatives have symmetric weights, odd ones antisymmetric.
  const double sign = derivative % 2 == 0 ? 1.0 : -1.0;
  for (int i = 0; i < half; ++i) {
    const double m = 0.5 * (w[i] * sign + w[p.window - 1 - i]);
    w[p.window - 1 - i] = m;
    w[i] = sign * m;
  }
  if (derivative % 2 == 1) w[half] = 0.0;
  return w;
}

namespace {

std::vector<double> convolve_mirror(std::span<const double> values, std::span<const double> w) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const auto window = static_cast<std::ptrdiff_t>(w.size());
  if (window > n) fail(ErrorCode::InvalidParams, "SG window longer than the spectrum");
  const std::ptrdiff_t half = window / 2;
  auto reflect = [n](std::ptrdiff_t i) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
  };
  std::vector<double> out(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i >= half && i + half < n) {
      for (std::ptrdiff_t k = -half; k <= half; ++k) acc += w[k + half] * values[i + k];
    } else {
      for (std::ptrdiff_t k = -half; k <= half; ++k) acc += w[k + half] * values[reflect(i + k)];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> sg_smooth(std::span<const double> values, const SgParams& p) {
  return convolve_mirror(values, sg_coefficients(p));
}

Spectrum sg_smooth(const Spectrum& s, const SgParams& p) {
  return s.with_values(sg_smooth(s.values(), p), s.stats());
}

std::vector<double> snip_baseline(std::span<const double> values, const SnipParams& p) {
  const std::size_t n = values.size();
  if (p.iterations < 1) fail(ErrorCode::InvalidParams, "SNIP iterations must be >= 1");
  if (2 * static_cast<std::size_t>(p.iterations) >= n)
    fail(ErrorCode::InvalidParams, "SNIP iterations must be < length / 2");

  std::vector<double> v(values.begin(), values.end());
  double shift = 0.0;
  if (p.lls_transform) {
    const double lo = *std::min_element(v.begin(), v.end());
    if (lo < 0.0) shift = -lo;
    for (double& x : v) x = lls_forward(x + shift);
  }

  std::vector<double> next(v);
  auto pass = [&](std::size_t half) {
    for (std::size_t i = half; i + half < n; ++i)
      next[i] = std::min(v[i], 0.5 * (v[i - half] + v[i + half]));
    std::copy(next.begin() + half, next.end() - half, v.begin() + half);
  };
  const auto m = static_cast<std::size_t>(p.iterations);
  if (p.decreasing_window) {
    for (std::size_t half = m; half >= 1; --half) pass(half);
  } else {
    for (std::size_t half = 1; half <= m; ++half) pass(half);
  }

  if (p.lls_transform) {
    for (std::size_t i = 0; i < n; ++i) {
      // The round trip can overshoot the input by an ulp; the baseline never
      // exceeds the data.
      v[i] = std::min(lls_inverse(v[i]) - shift, values[i]);
    }
  }
  return v;
}

Spectrum snip_baseline(const Spectrum& s, const SnipParams& p) {
  return s.with_values(snip_baseline(s.values(), p), s.stats());
}

std::vector<double> snip_correct(std::span<const double> values, const SnipParams& p) {
  auto b = snip_baseline(values, p);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = values[i] - b[i];
  return b;
}

Spectrum snip_correct(const Spectrum& s, const SnipParams& p) {
  return s.with_values(snip_correct(s.values(), p), s.stats());
}

SgSearchSpace default_sg_space() {
  SgSearchSpace s;
  for (int w = 5; w <= 41; w += 2) s.windows.push_back(w);
  for (int o = 2; o <= 5; ++o) s.orders.push_back(o);
  return s;
}

double sg_objective(std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
                    const SgParams& p) {
  if (pairs.empty()) fail(ErrorCode::EmptyDataset, "no LQ/HQ pairs");
  const auto kernel = sg_coefficients(p);
  double total = 0.0;
  for (const auto& [lq, hq] : pairs) {
    if (lq.size() != hq.size()) fail(ErrorCode::LengthMismatch, "LQ/HQ pair length mismatch");
    const auto sm = convolve_mirror(lq, kernel);
    double se = 0.0;
    for (std::size_t i = 0; i < sm.size(); ++i) se += (sm[i] - hq[i]) * (sm[i] - hq[i]);
    total += se / static_cast<double>(sm.size());
  }
  return total / static_cast<double>(pairs.size());
}

SgSearchResult optimize_sg(std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
                           const SgSearchSpace& space) {
  if (space.windows.empty() || space.orders.empty()) fail(ErrorCode::EmptySpace, "empty search space");
  if (pairs.empty()) fail(ErrorCode::EmptyDataset, "no LQ/HQ pairs");
  return search(pairs, valid_cells(space, shortest(pairs)));
}

SgSearchResult optimize_sg_random(
    std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
    const SgSearchSpace& space, std::size_t n_trials, std::uint64_t seed) {
  if (space.windows.empty() || space.orders.empty()) fail(ErrorCode::EmptySpace, "empty search space");
  if (pairs.empty()) fail(ErrorCode::EmptyDataset, "no LQ/HQ pairs");
  auto cells = valid_cells(space, shortest(pairs));
  std::mt19937_64 rng(seed);
  std::shuffle(cells.begin(), cells.end(), rng);
  if (cells.size() > n_trials) cells.resize(n_trials);
  return search(pairs, cells);
}

}  // namespace ftir::dsp
