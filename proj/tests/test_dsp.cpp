#include <doctest.h>

#include <cmath>
#include <functional>

#include "ftir/dsp.hpp"
#include "ftir/synthgen.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ftir;
using namespace ftir::dsp;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no ftir::Error thrown");
  return ErrorCode::UsageError;
}

using Pairs = std::vector<std::pair<std::vector<double>, std::vector<double>>>;

SnipParams lls_off(int m) { return {m, true, false}; }

}  // namespace

TEST_CASE("sg kernel (5, 2)") {
  const auto w = sg_coefficients({5, 2});
  const std::vector<double> expect{-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
  CHECK(testing::max_abs_diff(w, expect) < 1e-14);
  CHECK(testing::max_abs_diff(oracle::sg_kernel(5, 2), expect) < 1e-15);
}

TEST_CASE("sg kernel (3, 2) interpolates") {
  CHECK(testing::max_abs_diff(sg_coefficients({3, 2}), {0, 1, 0}) < 1e-14);
}

TEST_CASE("sg first derivative kernel") {
  CHECK(testing::max_abs_diff(sg_coefficients({5, 2}, 1), {-0.2, -0.1, 0, 0.1, 0.2}) < 1e-14);
  CHECK(code_of([] { sg_coefficients({5, 2}, 3); }) == ErrorCode::InvalidParams);
}

TEST_CASE("sg kernels match the normal-equation oracle and preserve DC") {
  for (int w = 3; w <= 41; w += 2)
    for (int o = 0; o <= std::min(5, w - 1); ++o) {
      const auto k = sg_coefficients({w, o});
      REQUIRE(testing::max_abs_diff(k, oracle::sg_kernel(w, o)) < 1e-10);
      double sum = 0.0;
      for (double v : k) sum += v;
      REQUIRE(std::abs(sum - 1.0) < 1e-12);
      if (o >= 1) REQUIRE(testing::max_abs_diff(sg_coefficients({w, o}, 1), oracle::sg_kernel(w, o, 1)) < 1e-10);
    }
}

TEST_CASE("sg reproduces polynomials of degree <= order at interior points") {
  std::mt19937_64 rng(1);
  const auto space = default_sg_space();
  const std::size_t n = 200;
  for (int w : space.windows)
    for (int o : space.orders) {
      if (o >= w) continue;
      for (int deg = 0; deg <= o; ++deg) {
        const auto c = testing::random_values(rng, deg + 1, -2, 2);
        std::vector<double> s(n);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double t = (static_cast<double>(i) - 100.0) / 100.0;
          double v = 0.0, tp = 1.0;
          for (double ck : c) v += ck * tp, tp *= t;
          s[i] = v;
          norm = std::max(norm, std::abs(v));
        }
        const auto out = sg_smooth(s, {w, o});
        const std::size_t half = static_cast<std::size_t>(w / 2);
        double err = 0.0;
        for (std::size_t i = half; i + half < n; ++i) err = std::max(err, std::abs(out[i] - s[i]));
        REQUIRE(err < 1e-10 * norm);
      }
    }
}

TEST_CASE("sg impulse and constant") {
  std::vector<double> imp(21, 0.0);
  imp[10] = 1.0;
  const auto out = sg_smooth(imp, {5, 2});
  CHECK(out[10] == doctest::Approx(17.0 / 35.0).epsilon(1e-14));
  CHECK(out[8] == doctest::Approx(-3.0 / 35.0).epsilon(1e-13));
  const std::vector<double> c(30, 2.5);
  for (int w : {3, 7, 29})
    for (int o = 0; o < std::min(w, 6); ++o) CHECK(testing::max_abs_diff(sg_smooth(c, {w, o}), c) < 1e-12);
}

TEST_CASE("sg edges use mirror reflection") {
  std::mt19937_64 rng(7);
  const auto x = testing::random_values(rng, 40);
  for (SgParams p : {SgParams{5, 2}, SgParams{11, 3}, SgParams{39, 5}}) {
    const auto got = sg_smooth(x, p);
    const auto want = oracle::mirror_convolve(x, oracle::sg_kernel(p.window, p.order));
    REQUIRE(testing::max_abs_diff(got, want) < 1e-12);
    REQUIRE(got.size() == x.size());
  }
}

TEST_CASE("sg parameter errors") {
  const std::vector<double> x(10, 1.0);
  CHECK(code_of([&] { sg_smooth(x, {4, 2}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { sg_smooth(x, {5, 5}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { sg_smooth(x, {11, 2}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { sg_smooth(x, {1, 0}); }) == ErrorCode::InvalidParams);
}

TEST_CASE("snip constant input") {
  for (double c : {0.0, 1e-6, 0.37, 5.0, 1234.5, -2.0})
    for (int m : {1, 5, 40})
      for (bool lls : {true, false})
        for (bool dec : {true, false}) {
          const std::vector<double> v(100, c);
          const auto b = snip_baseline(v, {m, dec, lls});
          for (double x : b) REQUIRE(std::abs(x - c) <= 1e-9 * std::max(1.0, std::abs(c)));
        }
}

TEST_CASE("snip isolated narrow peak") {
  for (int m : {1, 2, 3}) {
    const auto b = snip_baseline(std::vector<double>{0, 0, 0, 7.5, 0, 0, 0}, lls_off(m));
    CHECK(b == std::vector<double>(7, 0.0));
  }
}

TEST_CASE("snip linear ramp is its own baseline") {
  std::vector<double> ramp(300);
  for (int i = 0; i < 300; ++i) ramp[i] = 3.0 * i - 41.0;
  for (bool dec : {true, false})
    for (int m : {1, 17, 40, 149}) CHECK(snip_baseline(ramp, {m, dec, false}) == ramp);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const double a = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double b = std::uniform_real_distribution<double>(-5, 5)(rng);
    std::vector<double> r(257);
    for (int i = 0; i < 257; ++i) r[i] = a * i + b;
    REQUIRE(testing::max_abs_diff(snip_baseline(r, lls_off(40)), r) < 1e-12);
  }
}

TEST_CASE("snip recovers a peak on a polynomial baseline") {
  auto ax = share(make_axis(950, 4000, 1584));
  const auto peak = synth::gen_clean(std::vector<synth::PeakModel>{{1650, 0.4, 20}}, ax);
  std::vector<double> y(1584), base(1584);
  for (std::size_t i = 0; i < 1584; ++i) {
    const double t = 2.0 * (ax->at(i) - 950.0) / 3050.0 - 1.0;
    base[i] = 0.3 + 0.1 * t + 0.08 * t * t;
    y[i] = base[i] + peak[i];
  }
  const auto corrected = snip_correct(y, SnipParams{});
  double se = 0.0;
  for (std::size_t i = 0; i < 1584; ++i) se += std::pow(corrected[i] - peak[i], 2);
  CHECK(std::sqrt(se / 1584.0) < 0.05 * 0.4);

  const auto flat = snip_correct(base, SnipParams{});
  double amp = *std::max_element(base.begin(), base.end()) - *std::min_element(base.begin(), base.end());
  for (double v : flat) REQUIRE(std::abs(v) < 0.01 * amp);
}

TEST_CASE("snip zero input and errors") {
  const std::vector<double> z(50, 0.0);
  CHECK(snip_correct(z, {10, true, true}) == z);
  CHECK(snip_correct(z, lls_off(10)) == z);
  CHECK(code_of([&] { snip_baseline(z, {0, true, true}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { snip_baseline(z, {25, true, true}); }) == ErrorCode::InvalidParams);
}

TEST_CASE("snip baseline never exceeds the input") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto v = testing::random_values(rng, 200, t % 2 ? -1.0 : 0.0, 2.0);
    for (bool lls : {true, false}) {
      const auto b = snip_baseline(v, {1 + t % 60, t % 3 != 0, lls});
      const auto c = snip_correct(v, {1 + t % 60, t % 3 != 0, lls});
      for (std::size_t i = 0; i < v.size(); ++i) {
        REQUIRE(b[i] <= v[i] + 1e-12 * std::max(1.0, std::abs(v[i])));
        REQUIRE(c[i] >= -1e-9);
      }
      REQUIRE(b.front() == doctest::Approx(v.front()).epsilon(1e-12));
      REQUIRE(b.back() == doctest::Approx(v.back()).epsilon(1e-12));
    }
  }
}

TEST_CASE("snip wider windows never raise the baseline") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    const auto v = testing::random_values(rng, 180, -1, 1);
    for (bool dec : {true, false}) {
      auto prev = snip_baseline(v, {1, dec, false});
      for (int m = 2; m < 60; ++m) {
        const auto cur = snip_baseline(v, {m, dec, false});
        for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(cur[i] <= prev[i]);
        prev = cur;
      }
    }
  }
}

TEST_CASE("snip leaves convex input unchanged") {
  // A convex sequence already satisfies v_i <= (v_{i-p} + v_{i+p}) / 2, so
  // it is a fixed point of every clipping pass.
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(160);
    const double a = std::uniform_real_distribution<double>(0, 1e-3)(rng);
    const double b = std::uniform_real_distribution<double>(-0.1, 0.1)(rng);
    for (int i = 0; i < 160; ++i) v[i] = a * (i - 80) * (i - 80) + b * i + std::exp(0.01 * i);
    const auto base = snip_baseline(v, lls_off(40));
    REQUIRE(testing::max_abs_diff(base, v) < 1e-9);
    REQUIRE(testing::max_abs_diff(snip_baseline(base, lls_off(40)), base) < 1e-9);
  }
}

TEST_CASE("optimize_sg recovers a constructed optimum") {
  std::mt19937_64 rng(31);
  Pairs pairs;
  for (int k = 0; k < 6; ++k) {
    const auto lq = testing::random_values(rng, 120);
    pairs.emplace_back(lq, sg_smooth(lq, {7, 3}));
  }
  const auto r = optimize_sg(pairs, {{5, 7, 9, 11}, {3, 4, 5}});
  CHECK(r.best == SgParams{7, 3});
  CHECK(r.objective < 1e-25);
  // Order 2 builds the same kernel as order 3; the tie goes to the lower order.
  const auto r2 = optimize_sg(pairs, default_sg_space());
  CHECK(r2.best == SgParams{7, 2});
  CHECK(r2.objective < 1e-25);
}

TEST_CASE("optimize_sg single candidate and objective re-evaluation") {
  std::mt19937_64 rng(2);
  Pairs pairs;
  for (int k = 0; k < 3; ++k) pairs.emplace_back(testing::random_values(rng, 64), testing::random_values(rng, 64));
  const auto one = optimize_sg(pairs, {{13}, {4}});
  CHECK(one.best == SgParams{13, 4});
  CHECK(one.grid.size() == 1);
  const auto r = optimize_sg(pairs, default_sg_space());
  CHECK(r.objective == sg_objective(pairs, r.best));
  CHECK(r.grid.size() == 19 * 4 - 1);  // (5, 5) is invalid
  CHECK(code_of([&] { optimize_sg(pairs, {{}, {2}}); }) == ErrorCode::EmptySpace);
  CHECK(code_of([&] { optimize_sg(pairs, {{4, 6}, {2}}); }) == ErrorCode::EmptySpace);
}

TEST_CASE("optimize_sg equals a brute-force double loop") {
  std::mt19937_64 rng(41);
  for (int inst = 0; inst < 8; ++inst) {
    Pairs pairs;
    const std::size_t n = 60 + rng() % 80;
    for (int k = 0; k < 4; ++k) {
      std::vector<double> clean(n), noisy(n);
      const double f = std::uniform_real_distribution<double>(0.02, 0.2)(rng);
      std::normal_distribution<double> noise(0.0, 0.05 + 0.05 * inst);
      for (std::size_t i = 0; i < n; ++i) {
        clean[i] = std::sin(f * i) + 0.3 * std::cos(2.3 * f * i);
        noisy[i] = clean[i] + noise(rng);
      }
      pairs.emplace_back(noisy, clean);
    }
    const std::vector<int> windows{5, 9, 7, 13, 11, 21, 31};
    const std::vector<int> orders{2, 3, 4, 5, 0};
    const auto r = optimize_sg(pairs, {windows, orders});
    const auto o = oracle::sg_argmin(pairs, windows, orders);
    REQUIRE(r.best.window == o.window);
    REQUIRE(r.best.order == o.order);
    REQUIRE(r.objective == doctest::Approx(o.objective).epsilon(1e-10));
  }
}

TEST_CASE("seeded random search evaluates a subset deterministically") {
  std::mt19937_64 rng(5);
  Pairs pairs;
  for (int k = 0; k < 3; ++k) pairs.emplace_back(testing::random_values(rng, 90), testing::random_values(rng, 90));
  const auto a = optimize_sg_random(pairs, default_sg_space(), 10, 77);
  const auto b = optimize_sg_random(pairs, default_sg_space(), 10, 77);
  CHECK(a.grid.size() == 10);
  CHECK(a.best == b.best);
  for (const auto& c : a.grid) CHECK(c.objective >= a.objective - 1e-12 * a.objective);
  const auto full = optimize_sg(pairs, default_sg_space());
  CHECK(a.objective >= full.objective - 1e-12 * full.objective);
}
