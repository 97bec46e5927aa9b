#pragma once

// Reference implementations written independently of the library, used as
// test oracles.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

/// Least-squares smoothing weights from the normal equations
/// (A^T A) c = A^T e_j, solved by Gaussian elimination in long double.
/// Returns the weights for the fitted polynomial's d-th derivative at 0.
inline std::vector<double> sg_kernel(int window, int order, int derivative = 0) {
  const int half = window / 2;
  const int m = order + 1;
  // Normal matrix N(a, b) = sum_i i^(a+b).
  std::vector<std::vector<long double>> N(m, std::vector<long double>(m, 0.0L));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = -half; i <= half; ++i) N[a][b] += std::pow(static_cast<long double>(i), a + b);
  std::vector<double> w(window);
  for (int j = -half; j <= half; ++j) {
    // Right-hand side A^T e_j = (j^0, j^1, ..., j^order).
    std::vector<std::vector<long double>> M = N;
    std::vector<long double> rhs(m);
    for (int a = 0; a < m; ++a) rhs[a] = std::pow(static_cast<long double>(j), a);
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r)
        if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
      std::swap(M[col], M[piv]);
      std::swap(rhs[col], rhs[piv]);
      for (int r = col + 1; r < m; ++r) {
        const long double f = M[r][col] / M[col][col];
        for (int c = col; c < m; ++c) M[r][c] -= f * M[col][c];
        rhs[r] -= f * rhs[col];
      }
    }
    std::vector<long double> c(m);
    for (int r = m - 1; r >= 0; --r) {
      long double acc = rhs[r];
      for (int k = r + 1; k < m; ++k) acc -= M[r][k] * c[k];
      c[r] = acc / M[r][r];
    }
    long double fact = 1.0L;
    for (int k = 2; k <= derivative; ++k) fact *= k;
    w[j + half] = static_cast<double>(fact * c[derivative]);
  }
  return w;
}

/// Convolution with mirror reflection x[-k] = x[k], x[n-1+k] = x[n-1-k].
inline std::vector<double> mirror_convolve(std::span<const double> x, std::span<const double> w) {
  const long n = static_cast<long>(x.size());
  const long half = static_cast<long>(w.size()) / 2;
  std::vector<double> out(x.size());
  for (long i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (long k = -half; k <= half; ++k) {
      long j = i + k;
      if (j < 0) j = -j;
      if (j >= n) j = 2 * (n - 1) - j;
      acc += static_cast<long double>(w[k + half]) * x[j];
    }
    out[i] = static_cast<double>(acc);
  }
  return out;
}

struct SgChoice {
  int window = 0;
  int order = 0;
  double objective = 0.0;
};

/// Double loop over the grid in (window, order) order; a later cell replaces
/// the incumbent only when it is better by more than 1e-12 relative.
inline SgChoice sg_argmin(const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
                          std::vector<int> windows, std::vector<int> orders) {
  std::sort(windows.begin(), windows.end());
  std::sort(orders.begin(), orders.end());
  SgChoice best{0, 0, 0.0};
  bool have = false;
  for (int w : windows)
    for (int o : orders) {
      if (w < 3 || w % 2 == 0 || o < 0 || o >= w) continue;
      bool fits = true;
      for (const auto& p : pairs) fits = fits && static_cast<std::size_t>(w) <= p.first.size();
      if (!fits) continue;
      const auto k = sg_kernel(w, o);
      long double total = 0.0L;
      for (const auto& [lq, hq] : pairs) {
        const auto sm = mirror_convolve(lq, k);
        long double se = 0.0L;
        for (std::size_t i = 0; i < sm.size(); ++i) se += std::pow(static_cast<long double>(sm[i]) - hq[i], 2);
        total += se / sm.size();
      }
      const double obj = static_cast<double>(total / pairs.size());
      if (!have || obj < best.objective - 1e-12 * std::max(std::abs(obj), std::abs(best.objective))) {
        best = {w, o, obj};
        have = true;
      }
    }
  return best;
}

/// Percentile by sorting and interpolating between closest ranks.
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

}  // namespace oracle
