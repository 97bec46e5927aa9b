#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ftir/metrics.hpp"
#include "ftir/synthgen.hpp"
#include "support.hpp"

using namespace ftir;
using namespace ftir::synth;

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

double sample_std(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Mean detrended silent-window std over the truth foreground.
double mean_silent(const HyperspectralCube& cube, const std::vector<std::uint8_t>& mask) {
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < cube.height(); ++y)
    for (std::size_t x = 0; x < cube.width(); ++x)
      if (mask[y * cube.width() + x]) {
        total += metrics::silent_region_noise(cube.axis(), cube.pixel(x, y));
        ++n;
      }
  return total / static_cast<double>(n);
}

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c = reference_config(seed);
  c.height = 12;
  c.width = 12;
  c.axis_points = 400;
  c.layout = {2, 2.0, 3.0};
  return c;
}

}  // namespace

TEST_CASE("gen_clean single gaussian") {
  auto ax = share(make_axis(1000, 2000, 1001));  // 1 cm^-1 steps
  const PeakModel p{1500.0, 1.0, 30.0, PeakShape::gaussian};
  const auto s = gen_clean(std::span(&p, 1), ax);
  const std::size_t c = ax->index_of(1500.0);
  CHECK(s[c] == 1.0);
  for (std::size_t k = 1; k < 200; ++k) REQUIRE(s[c - k] == doctest::Approx(s[c + k]).epsilon(1e-13));
  // Half maximum at +-FWHM/2.
  CHECK(s[c + 15] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gen_clean lorentzian half maximum") {
  auto ax = share(make_axis(1000, 2000, 1001));
  const PeakModel p{1300.0, 2.0, 20.0, PeakShape::lorentzian};
  const auto s = gen_clean(std::span(&p, 1), ax);
  CHECK(s[300] == 2.0);
  CHECK(s[310] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s[290] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gen_clean two disjoint peaks keep their heights") {
  auto ax = share(make_axis(950, 4000, 3051));
  const std::vector<PeakModel> peaks{{1200, 0.7, 12, PeakShape::gaussian}, {2900, 0.25, 16, PeakShape::gaussian}};
  const auto s = gen_clean(peaks, ax);
  const auto v = s.vector();
  const auto mid = ax->index_of(2050);
  const double m1 = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  const double m2 = *std::max_element(v.begin() + static_cast<long>(mid), v.end());
  CHECK(std::abs(m1 - 0.7) < 1e-9);
  CHECK(std::abs(m2 - 0.25) < 1e-9);
}

TEST_CASE("gen_clean errors") {
  auto ax = share(make_axis(950, 4000, 1584));
  CHECK(code_of([&] { gen_clean(std::vector<PeakModel>{}, ax); }) == ErrorCode::PeakOutOfRange);
  CHECK(code_of([&] { gen_clean(std::vector<PeakModel>{{500, 1, 30}}, ax); }) == ErrorCode::PeakOutOfRange);
  CHECK(code_of([&] { gen_clean(std::vector<PeakModel>{{1500, 1, 2}}, ax); }) == ErrorCode::InvalidPeak);
  CHECK(code_of([&] { gen_clean(std::vector<PeakModel>{{1500, -1, 30}}, ax); }) == ErrorCode::InvalidPeak);
}

TEST_CASE("simulate_scans without noise is exact") {
  auto ax = share(make_axis(950, 4000, 300));
  const auto clean = gen_clean(std::vector<PeakModel>{{1650, 0.4, 30}}, ax);
  std::vector<double> base(300);
  for (int i = 0; i < 300; ++i) base[i] = 0.1 + 1e-4 * i;
  for (int n : {1, 8, 32}) {
    Rng rng(3);
    const auto s = simulate_scans(clean, base, 0.0, n, nullptr, rng);
    CHECK(s.scan_count() == n);
    for (int i = 0; i < 300; ++i) REQUIRE(s[i] == clean[i] + base[i]);
  }
  Rng rng(1);
  CHECK(code_of([&] { simulate_scans(clean, base, 0.1, 0, nullptr, rng); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { simulate_scans(clean, base, -0.1, 1, nullptr, rng); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("simulate_scans residual std follows sigma / sqrt(N)") {
  auto ax = share(make_axis(950, 4000, 400));
  const auto clean = gen_clean(std::vector<PeakModel>{{1650, 0.4, 30}}, ax);
  const std::vector<double> base(400, 0.2);
  std::vector<double> resid;
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng rng = make_rng(42, Stream::noise, k);
    const auto s = simulate_scans(clean, base, 0.01, 32, nullptr, rng);
    for (int i = 0; i < 400; ++i) resid.push_back(s[i] - clean[i] - base[i]);
  }
  const double expected = 0.01 / std::sqrt(32.0);
  CHECK(expected == doctest::Approx(1.77e-3).epsilon(0.01));
  CHECK(std::abs(sample_std(resid) / expected - 1.0) < 0.15);
}

TEST_CASE("persistent drift survives averaging") {
  auto ax = share(make_axis(950, 4000, 500));
  const auto clean = gen_clean(std::vector<PeakModel>{{1650, 0.4, 30}}, ax);
  const std::vector<double> base(500, 0.0);
  DriftModel dm;
  dm.components = {{0.02, 200.0}};
  dm.nonzero_mean = true;
  dm.scan_fraction = 0.5;
  PixelDrift pd;
  pd.model = &dm;
  pd.scan_seed = 17;
  Rng r0(5);
  pd.mean_profile = smooth_random_profile(*ax, dm.components, r0);

  auto dist_to_mean = [&](int n) {
    Rng rng(9);
    const auto s = simulate_scans(clean, base, 0.0, n, &pd, rng);
    double d = 0.0, m = 0.0;
    for (int i = 0; i < 500; ++i) {
      const double r = s[i] - clean[i];
      d += (r - pd.mean_profile[i]) * (r - pd.mean_profile[i]);
      m += pd.mean_profile[i] * pd.mean_profile[i];
    }
    return std::pair{std::sqrt(d), std::sqrt(m)};
  };
  const auto [d1, m] = dist_to_mean(1);
  const auto [d400, m2] = dist_to_mean(400);
  CHECK(m > 0.05);          // the residual does not average to zero
  CHECK(d400 < 0.15 * m);   // it converges to the mean profile
  CHECK(d400 < d1 / 8.0);   // fluctuations shrink like 1/sqrt(N) (20x expected)
}

TEST_CASE("gen_cube is deterministic in the seed") {
  const auto a = gen_cube(small_config(3));
  const auto b = gen_cube(small_config(3));
  const auto c = gen_cube(small_config(4));
  for (int n : {1, 8, 32}) {
    const auto& da = a.scans.at(n).data();
    const auto& db = b.scans.at(n).data();
    REQUIRE(std::equal(da.begin(), da.end(), db.begin(), db.end()));
  }
  CHECK(a.mask_truth == b.mask_truth);
  const auto& d1 = a.scans.at(1).data();
  const auto& d2 = c.scans.at(1).data();
  CHECK_FALSE(std::equal(d1.begin(), d1.end(), d2.begin(), d2.end()));
}

TEST_CASE("gen_cube structure") {
  const auto cfg = small_config(8);
  const auto out = gen_cube(cfg);
  REQUIRE(out.scans.size() == 3);
  std::size_t fg = 0;
  for (std::size_t y = 0; y < cfg.height; ++y)
    for (std::size_t x = 0; x < cfg.width; ++x) {
      const std::size_t px = y * cfg.width + x;
      const auto clean = out.clean.pixel(x, y);
      if (out.mask_truth[px]) {
        ++fg;
        const auto expect = gen_clean(pixel_peaks(cfg, x, y, out.region[px]), out.clean.axis_ptr());
        REQUIRE(std::equal(clean.begin(), clean.end(), expect.values().begin()));
      } else {
        REQUIRE(out.region[px] == -1);
        REQUIRE(std::all_of(clean.begin(), clean.end(), [](double v) { return v == 0.0; }));
      }
    }
  CHECK(fg > 0);
  CHECK(fg < cfg.height * cfg.width);
  for (const auto& [n, cube] : out.scans) {
    CHECK(cube.scan_count() == n);
    CHECK(cube.axis() == out.clean.axis());
    CHECK(cube.height() == cfg.height);
  }
}

TEST_CASE("noise-free cube equals clean + baseline for every scan count") {
  auto cfg = small_config(2);
  cfg.noise_sigma = 0.0;
  const auto out = gen_cube(cfg);
  const auto clean = out.clean.data();
  const auto base = out.baseline.data();
  for (const auto& [n, cube] : out.scans) {
    const auto d = cube.data();
    for (std::size_t i = 0; i < d.size(); ++i) REQUIRE(d[i] == clean[i] + base[i]);
  }
}

TEST_CASE("adding drift leaves the noise draws untouched") {
  const auto cfg = small_config(5);
  auto dcfg = cfg;
  dcfg.drift = drift_preset();
  const auto a = gen_cube(cfg);
  const auto b = gen_cube(dcfg);
  const auto la = a.scans.at(8).data(), lb = b.scans.at(8).data();
  const auto ba = a.baseline.data(), bb = b.baseline.data();
  double worst = 0.0;
  for (std::size_t i = 0; i < la.size(); ++i) worst = std::max(worst, std::abs((lb[i] - la[i]) - (bb[i] - ba[i])));
  CHECK(worst < 1e-12);
}

TEST_CASE("noise law on the drift-free reference cube") {
  const auto out = gen_cube(reference_config());
  std::size_t fg = std::accumulate(out.mask_truth.begin(), out.mask_truth.end(), std::size_t{0});
  REQUIRE(fg >= 100);
  const double n1 = mean_silent(out.scans.at(1), out.mask_truth);
  for (int n : {8, 32}) {
    const double ratio = n1 / mean_silent(out.scans.at(n), out.mask_truth);
    CHECK(ratio > 0.85 * std::sqrt(n));
    CHECK(ratio < 1.15 * std::sqrt(n));
  }
}

TEST_CASE("drift preset breaks the noise law") {
  const auto out = gen_cube(drift_config());
  const double ratio = mean_silent(out.scans.at(1), out.mask_truth) / mean_silent(out.scans.at(32), out.mask_truth);
  CHECK(ratio < 0.8 * std::sqrt(32.0));
  CHECK(ratio == doctest::Approx(3.68).epsilon(0.05));
}

TEST_CASE("reference noise level gives a raw correlation near 0.87") {
  const auto cfg = reference_config();
  const auto out = gen_cube(cfg);
  const auto& lq = out.scans.at(1);
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < cfg.height; ++y)
    for (std::size_t x = 0; x < cfg.width; ++x) {
      if (!out.mask_truth[y * cfg.width + x]) continue;
      const auto s = lq.pixel(x, y), b = out.baseline.pixel(x, y), c = out.clean.pixel(x, y);
      std::vector<double> r(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) r[i] = s[i] - b[i];
      total += metrics::pcc(r, c);
      ++n;
    }
  const double mean = total / static_cast<double>(n);
  CHECK(mean > 0.84);
  CHECK(mean < 0.90);
}

TEST_CASE("layout overflow") {
  auto cfg = small_config(1);
  cfg.layout = {40, 3.0, 4.0};
  CHECK(code_of([&] { realize_layout(cfg); }) == ErrorCode::LayoutOverflow);
  cfg.layout = {1, 7.0, 8.0};
  CHECK(code_of([&] { realize_layout(cfg); }) == ErrorCode::LayoutOverflow);
}

TEST_CASE("config validation") {
  auto cfg = small_config(1);
  cfg.noise_sigma = -1.0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidConfig);
  cfg = small_config(1);
  cfg.scan_counts = {1, 0};
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("SynthConfig JSON round trip") {
  auto cfg = drift_config(99);
  cfg.scan_counts = {1, 4};
  const Json j = to_json(cfg);
  CHECK(to_json(synth_config_from_json(j)) == j);
  const auto ds = benchmark_dataset();
  CHECK(ds.samples.size() == 4);
  CHECK(ds.samples[2].drift.has_value());
  CHECK(to_json(dataset_config_from_json(to_json(ds))) == to_json(ds));
}

TEST_CASE("write_dataset layout") {
  testing::TempDir tmp("synth_ds");
  DatasetConfig d;
  d.samples = {small_config(1), small_config(2)};
  d.samples[0].sample_id = "a";
  d.samples[1].sample_id = "b";
  write_dataset(d, tmp.path());
  CHECK(std::filesystem::exists(tmp / "dataset.json"));
  for (const char* id : {"a", "b"}) {
    for (int n : {1, 8, 32})
      CHECK(std::filesystem::exists(tmp.path() / id / ("scan_" + std::to_string(n)) / "data.f32"));
    CHECK(std::filesystem::exists(tmp.path() / id / "truth" / "mask.json"));
  }
  const auto back = load_cube(tmp.path() / "a" / "scan_8");
  const auto ref = gen_cube(d.samples[0]).scans.at(8);
  for (std::size_t i = 0; i < ref.data().size(); ++i)
    REQUIRE(back.data()[i] == static_cast<double>(static_cast<float>(ref.data()[i])));
  d.samples[1].sample_id = "a";
  CHECK(code_of([&] { write_dataset(d, tmp / "dup"); }) == ErrorCode::InvalidConfig);
}
