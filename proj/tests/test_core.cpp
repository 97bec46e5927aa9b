#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "ftir/core.hpp"
#include "ftir/f32_io.hpp"
#include "ftir/json_io.hpp"
#include "support.hpp"

using namespace ftir;

TEST_CASE("make_axis spacing") {
  CHECK(make_axis(0, 10, 11).step() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(make_axis(950, 4000, 1584).step() == doctest::Approx(3050.0 / 1583.0).epsilon(1e-15));
  CHECK(make_axis(950, 4000, 1584).step() == doctest::Approx(1.9267).epsilon(1e-4));
  const auto a = make_axis(950, 4000, 1584);
  CHECK(a.front() == 950.0);
  CHECK(a.back() == doctest::Approx(4000.0).epsilon(1e-14));
}

TEST_CASE("make_axis rejects bad spans") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::UsageError;
  };
  CHECK(code_of([] { make_axis(4000, 950, 10); }) == ErrorCode::NonPositiveSpan);
  CHECK(code_of([] { make_axis(5, 5, 10); }) == ErrorCode::NonPositiveSpan);
  CHECK(code_of([] { make_axis(0, 1, 1); }) == ErrorCode::TooFewPoints);
  CHECK(code_of([] { WavenumberAxis::explicit_points({1, 3, 2}); }) == ErrorCode::NonMonotonicAxis);
}

TEST_CASE("index_of inverts at() on uniform axes") {
  for (auto [s, e, n] : {std::tuple{950.0, 4000.0, std::size_t{1584}}, {0.0, 1.0, 2}, {-3.5, 7.25, 97}}) {
    const auto a = make_axis(s, e, n);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(a.index_of(a.at(i)) == i);
  }
}

TEST_CASE("explicit axes refuse uniform arithmetic") {
  const auto a = WavenumberAxis::explicit_points({1.0, 2.0, 4.0});
  CHECK_FALSE(a.is_uniform());
  CHECK(a.at(2) == 4.0);
  CHECK_THROWS_AS(a.step(), Error);
  CHECK_THROWS_AS(a.index_of(2.0), Error);
  CHECK(a.mean_step() == 1.5);
}

TEST_CASE("spectrum rejects non-finite values and length mismatch") {
  auto ax = testing::unit_axis(3);
  CHECK_THROWS_AS(Spectrum(ax, {1.0, NAN, 2.0}), Error);
  CHECK_THROWS_AS(Spectrum(ax, {1.0, INFINITY, 2.0}), Error);
  CHECK_THROWS_AS(Spectrum(ax, {1.0, 2.0}), Error);
  CHECK_NOTHROW(Spectrum(ax, {1.0, 2.0, 3.0}));
}

TEST_CASE("integrate_band trapezoid") {
  SUBCASE("constant on step-2 axis over 11 points") {
    auto ax = share(WavenumberAxis::uniform(100.0, 2.0, 50));
    Spectrum s(ax, std::vector<double>(50, 1.0));
    CHECK(integrate_band(s, 110.0, 130.0) == doctest::Approx(20.0).epsilon(1e-14));
  }
  SUBCASE("zero spectrum") {
    auto ax = share(make_axis(950, 4000, 1584));
    Spectrum s(ax, std::vector<double>(1584, 0.0));
    CHECK(integrate_band(s, 1000, 1800) == 0.0);
  }
  SUBCASE("index ramp over points 0..4") {
    auto ax = testing::unit_axis(10);
    std::vector<double> v(10);
    for (int i = 0; i < 10; ++i) v[i] = i;
    // (0+1)/2 + (1+2)/2 + (2+3)/2 + (3+4)/2
    CHECK(integrate_band(Spectrum(ax, v), 0.0, 4.0) == 8.0);
  }
  SUBCASE("empty band") {
    auto ax = testing::unit_axis(10);
    Spectrum s(ax, std::vector<double>(10, 1.0));
    CHECK_THROWS_AS(integrate_band(s, 20.0, 30.0), Error);
    CHECK_THROWS_AS(integrate_band(s, 2.2, 2.8), Error);
  }
}

TEST_CASE("integrate_band is linear") {
  std::mt19937_64 rng(5);
  auto ax = share(make_axis(950, 4000, 301));
  for (int t = 0; t < 100; ++t) {
    const auto f = testing::random_values(rng, 301);
    const auto g = testing::random_values(rng, 301);
    const double a = std::uniform_real_distribution<double>(-3, 3)(rng);
    const double b = std::uniform_real_distribution<double>(-3, 3)(rng);
    std::vector<double> h(301);
    for (int i = 0; i < 301; ++i) h[i] = a * f[i] + b * g[i];
    const double lhs = integrate_band(*ax, h, 1200, 3100);
    const double rhs = a * integrate_band(*ax, f, 1200, 3100) + b * integrate_band(*ax, g, 1200, 3100);
    REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("cube round trip is byte identical") {
  testing::TempDir tmp("core_cube");
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const std::size_t H = 1 + rng() % 4, W = 1 + rng() % 4, L = 2 + rng() % 9;
    auto values = testing::random_values(rng, H * W * L, -100, 100);
    for (auto& v : values) v = static_cast<float>(v);  // representable on disk
    std::optional<std::vector<std::uint8_t>> mask;
    if (t % 2) {
      mask.emplace(H * W);
      for (auto& m : *mask) m = rng() % 2;
    }
    HyperspectralCube c(H, W, share(make_axis(900, 4100, L)), values, "s" + std::to_string(t), 8, mask);
    const auto d1 = tmp / ("a" + std::to_string(t));
    const auto d2 = tmp / ("b" + std::to_string(t));
    save_cube(c, d1);
    const auto back = load_cube(d1);
    CHECK(back.height() == H);
    CHECK(back.width() == W);
    CHECK(back.axis() == c.axis());
    CHECK(back.sample_id() == c.sample_id());
    CHECK(back.scan_count() == 8);
    CHECK(back.mask() == mask);
    CHECK(std::vector<double>(back.data().begin(), back.data().end()) == values);
    save_cube(back, d2);
    CHECK(testing::file_bytes(d1 / "data.f32") == testing::file_bytes(d2 / "data.f32"));
    CHECK(testing::file_bytes(d1 / "data.f32").size() == H * W * L * 4);
  }
}

TEST_CASE("cube payload is little-endian float32 in (y, x, lambda) order") {
  testing::TempDir tmp("core_layout");
  std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};  // H=2, W=3, L=2
  HyperspectralCube c(2, 3, testing::unit_axis(2), v, "x", 1);
  CHECK(c.pixel(2, 1)[0] == 10.0);
  save_cube(c, tmp.path());
  const auto bytes = testing::file_bytes(tmp / "data.f32");
  REQUIRE(bytes.size() == 48);
  float f;
  std::memcpy(&f, bytes.data() + 4 * 10, 4);
  CHECK(f == 10.0f);
  CHECK(static_cast<unsigned char>(bytes[4 * 1 + 3]) == 0x3f);  // 1.0f = 0x3f800000, LE
}

TEST_CASE("cube load errors") {
  testing::TempDir tmp("core_err");
  HyperspectralCube c(2, 2, testing::unit_axis(4), std::vector<double>(16, 1.5), "x", 1);
  SUBCASE("truncated payload") {
    save_cube(c, tmp.path());
    std::filesystem::resize_file(tmp / "data.f32", 40);
    try {
      load_cube(tmp.path());
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
  }
  SUBCASE("unknown version") {
    save_cube(c, tmp.path());
    auto meta = read_json(tmp / "meta.json");
    meta["format_version"] = "ftir-cube-v999";
    write_json(meta, tmp / "meta.json");
    try {
      load_cube(tmp.path());
      FAIL("expected FormatVersionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FormatVersionMismatch);
    }
  }
  SUBCASE("missing directory") {
    try {
      load_cube(tmp / "nope");
      FAIL("expected IoError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IoError);
    }
  }
}

TEST_CASE("explicit axis survives a cube round trip") {
  testing::TempDir tmp("core_explicit");
  auto ax = share(WavenumberAxis::explicit_points({1000.0, 1001.5, 1010.25}));
  HyperspectralCube c(1, 1, ax, {1, 2, 3}, "e", 32);
  save_cube(c, tmp.path());
  CHECK(load_cube(tmp.path()).axis() == *ax);
}

TEST_CASE("spectrum CSV round trip") {
  testing::TempDir tmp("core_csv");
  auto ax = make_axis(950, 4000, 17);
  std::vector<double> v(17);
  for (int i = 0; i < 17; ++i) v[i] = std::sin(i) * 1e-3;
  write_spectrum_csv(ax, v, tmp / "s.csv");
  std::ifstream in(tmp / "s.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "wavenumber_cm,value");
  const auto [x, y] = read_spectrum_csv(tmp / "s.csv");
  CHECK(x == ax.points());
  CHECK(y == v);
}
