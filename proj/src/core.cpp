#include "ftir/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ftir/f32_io.hpp"
#include "ftir/json_io.hpp"

namespace ftir {

namespace fs = std::filesystem;

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::raw: return "raw";
    case Domain::snv: return "snv";
    case Domain::minmax01: return "minmax01";
  }
  return "raw";
}

Domain domain_from_string(std::string_view s) {
  if (s == "raw") return Domain::raw;
  if (s == "snv") return Domain::snv;
  if (s == "minmax01") return Domain::minmax01;
  fail(ErrorCode::DomainTagMismatch, "unknown domain tag '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// WavenumberAxis

WavenumberAxis WavenumberAxis::uniform(double start_cm, double step_cm, std::size_t n_points) {
  if (n_points < 2) fail(ErrorCode::TooFewPoints, "axis needs at least 2 points");
  if (!(step_cm > 0.0) || !std::isfinite(step_cm) || !std::isfinite(start_cm))
    fail(ErrorCode::NonPositiveSpan, "axis step must be finite and > 0");
  WavenumberAxis a;
  a.start_ = start_cm;
  a.step_ = step_cm;
  a.n_ = n_points;
  return a;
}

WavenumberAxis WavenumberAxis::explicit_points(std::vector<double> points_cm) {
  if (points_cm.size() < 2) fail(ErrorCode::TooFewPoints, "axis needs at least 2 points");
  for (std::size_t i = 0; i < points_cm.size(); ++i) {
    if (!std::isfinite(points_cm[i])) fail(ErrorCode::NonFiniteValue, "non-finite axis point");
    if (i > 0 && !(points_cm[i] > points_cm[i - 1]))
      fail(ErrorCode::NonMonotonicAxis, "explicit axis points must be strictly increasing");
  }
  WavenumberAxis a;
  a.points_ = std::move(points_cm);
  a.n_ = a.points_.size();
  return a;
}

double WavenumberAxis::start() const {
  if (!is_uniform()) fail(ErrorCode::UniformAxisRequired, "start() on explicit axis");
  return start_;
}

double WavenumberAxis::step() const {
  if (!is_uniform()) fail(ErrorCode::UniformAxisRequired, "step() on explicit axis");
  return step_;
}

double WavenumberAxis::at(std::size_t i) const {
  if (i >= size()) fail(ErrorCode::OutOfAxisRange, "axis index out of range");
  return is_uniform() ? start_ + static_cast<double>(i) * step_ : points_[i];
}

std::size_t WavenumberAxis::index_of(double wavenumber_cm) const {
  if (!is_uniform()) fail(ErrorCode::UniformAxisRequired, "index_of() on explicit axis");
  const double pos = std::round((wavenumber_cm - start_) / step_);
  if (!(pos >= 0.0) || pos > static_cast<double>(n_ - 1))
    fail(ErrorCode::OutOfAxisRange, "wavenumber outside axis");
  return static_cast<std::size_t>(pos);
}

std::vector<double> WavenumberAxis::points() const {
  if (!is_uniform()) return points_;
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = start_ + static_cast<double>(i) * step_;
  return p;
}

bool WavenumberAxis::operator==(const WavenumberAxis& other) const {
  if (is_uniform() != other.is_uniform()) return false;
  if (is_uniform()) return start_ == other.start_ && step_ == other.step_ && n_ == other.n_;
  return points_ == other.points_;
}

WavenumberAxis make_axis(double start_cm, double end_cm, std::size_t n_points) {
  if (!(end_cm > start_cm)) fail(ErrorCode::NonPositiveSpan, "end_cm must exceed start_cm");
  if (n_points < 2) fail(ErrorCode::TooFewPoints, "axis needs at least 2 points");
  return WavenumberAxis::uniform(start_cm, (end_cm - start_cm) / static_cast<double>(n_points - 1),
                                 n_points);
}

AxisPtr share(WavenumberAxis axis) {
  return std::make_shared<const WavenumberAxis>(std::move(axis));
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(AxisPtr axis, std::vector<double> values, int scan_count,
                   std::optional<SpectrumOrigin> origin, std::optional<NormStats> stats)
    : axis_(std::move(axis)),
      values_(std::move(values)),
      scan_count_(scan_count),
      origin_(std::move(origin)),
      stats_(stats) {
  if (!axis_) fail(ErrorCode::LengthMismatch, "spectrum without axis");
  if (values_.size() != axis_->size())
    fail(ErrorCode::LengthMismatch, "spectrum length " + std::to_string(values_.size()) +
                                        " != axis length " + std::to_string(axis_->size()));
  if (scan_count_ < 1) fail(ErrorCode::InvalidConfig, "scan_count must be positive");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "spectrum contains NaN/Inf");
}

Spectrum Spectrum::with_values(std::vector<double> values, std::optional<NormStats> stats) const {
  return Spectrum(axis_, std::move(values), scan_count_, origin_, stats);
}

// ---------------------------------------------------------------------------
// HyperspectralCube

HyperspectralCube::HyperspectralCube(std::size_t height, std::size_t width, AxisPtr axis,
                                     std::vector<double> data, std::string sample_id,
                                     int scan_count, std::optional<std::vector<std::uint8_t>> mask)
    : height_(height),
      width_(width),
      axis_(std::move(axis)),
      data_(std::move(data)),
      sample_id_(std::move(sample_id)),
      scan_count_(scan_count),
      mask_(std::move(mask)) {
  if (!axis_) fail(ErrorCode::ShapeMismatch, "cube without axis");
  if (height_ == 0 || width_ == 0) fail(ErrorCode::ShapeMismatch, "cube has zero extent");
  if (data_.size() != height_ * width_ * axis_->size())
    fail(ErrorCode::ShapeMismatch, "cube payload length does not match H*W*L");
  if (mask_ && mask_->size() != height_ * width_)
    fail(ErrorCode::ShapeMismatch, "mask shape does not match cube");
  if (scan_count_ < 1) fail(ErrorCode::InvalidConfig, "scan_count must be positive");
}

std::span<const double> HyperspectralCube::pixel(std::size_t x, std::size_t y) const {
  if (x >= width_ || y >= height_) fail(ErrorCode::OutOfAxisRange, "pixel out of range");
  const std::size_t L = bands();
  return std::span<const double>(data_).subspan((y * width_ + x) * L, L);
}

Spectrum HyperspectralCube::spectrum(std::size_t x, std::size_t y) const {
  auto px = pixel(x, y);
  return Spectrum(axis_, std::vector<double>(px.begin(), px.end()), scan_count_,
                  SpectrumOrigin{sample_id_, static_cast<int>(x), static_cast<int>(y)});
}

HyperspectralCube HyperspectralCube::with_mask(std::optional<std::vector<std::uint8_t>> mask) const {
  return HyperspectralCube(height_, width_, axis_, data_, sample_id_, scan_count_, std::move(mask));
}

// ---------------------------------------------------------------------------
// Band integration

double integrate_band(const WavenumberAxis& axis, std::span<const double> values, double lo_cm,
                      double hi_cm) {
  if (values.size() != axis.size()) fail(ErrorCode::LengthMismatch, "values/axis length");
  if (hi_cm < lo_cm) std::swap(lo_cm, hi_cm);
  double total = 0.0;
  bool have_prev = false;
  double prev_x = 0.0, prev_y = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const double x = axis.at(i);
    if (x < lo_cm || x > hi_cm) continue;
    ++count;
    if (have_prev) total += 0.5 * (x - prev_x) * (values[i] + prev_y);
    prev_x = x;
    prev_y = values[i];
    have_prev = true;
  }
  if (count == 0) fail(ErrorCode::EmptyBand, "no axis points inside band");
  return total;
}

double integrate_band(const Spectrum& s, double lo_cm, double hi_cm) {
  return integrate_band(s.axis(), s.values(), lo_cm, hi_cm);
}

// ---------------------------------------------------------------------------
// JSON helpers

Json axis_to_json(const WavenumberAxis& axis) {
  if (axis.is_uniform())
    return Json{{"start", axis.start()}, {"step", axis.step()}, {"n", axis.size()}};
  return Json{{"points", axis.points()}};
}

WavenumberAxis axis_from_json(const Json& j) {
  if (j.contains("points")) return WavenumberAxis::explicit_points(j.at("points").get<std::vector<double>>());
  return WavenumberAxis::uniform(j.at("start").get<double>(), j.at("step").get<double>(),
                                 j.at("n").get<std::size_t>());
}

Json stats_to_json(const NormStats& stats) {
  Json j{{"domain", std::string(to_string(stats.domain))}};
  if (stats.snv) j["snv"] = {{"mean", stats.snv->mean}, {"std", stats.snv->std}};
  if (stats.range) j["range"] = {{"min", stats.range->min}, {"max", stats.range->max}};
  return j;
}

NormStats stats_from_json(const Json& j) {
  NormStats s;
  s.domain = domain_from_string(j.at("domain").get<std::string>());
  if (j.contains("snv")) s.snv = SnvStats{j["snv"].at("mean"), j["snv"].at("std")};
  if (j.contains("range")) s.range = MinMax{j["range"].at("min"), j["range"].at("max")};
  return s;
}

Json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open " + file.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::IoError, "malformed JSON in " + file.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) fail(ErrorCode::IoError, "cannot write " + file.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "write failed for " + file.string());
}

// ---------------------------------------------------------------------------
// Cube I/O

namespace {

void append_f32_le(std::string& buf, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  char bytes[4];
  std::memcpy(bytes, &bits, 4);
  buf.append(bytes, 4);
}

float read_f32_le(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

}  // namespace

void write_f32_file(std::span<const double> values, const fs::path& file) {
  std::string buf;
  buf.reserve(values.size() * 4);
  for (double v : values) append_f32_le(buf, static_cast<float>(v));
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + file.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + file.string());
}

std::vector<double> read_f32_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + file.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) fail(ErrorCode::ShapeMismatch, file.string() + " is not a whole number of float32 values");
  std::vector<double> data(bytes.size() / 4);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = read_f32_le(bytes.data() + 4 * i);
  return data;
}

void save_cube(const HyperspectralCube& cube, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  Json meta{{"format_version", kCubeFormatVersion},
            {"shape", {cube.height(), cube.width()}},
            {"axis", axis_to_json(cube.axis())},
            {"scan_count", cube.scan_count()},
            {"sample_id", cube.sample_id()}};
  write_json(meta, dir / "meta.json");

  write_f32_file(cube.data(), dir / "data.f32");

  if (cube.mask()) save_mask(*cube.mask(), cube.height(), cube.width(), dir / "mask.json");
  else if (fs::exists(dir / "mask.json")) fs::remove(dir / "mask.json");
}

HyperspectralCube load_cube(const fs::path& dir) {
  const Json meta = read_json(dir / "meta.json");
  if (!meta.contains("format_version") || meta["format_version"] != kCubeFormatVersion)
    fail(ErrorCode::FormatVersionMismatch,
         "unsupported cube format " + (meta.contains("format_version") ? meta["format_version"].dump() : "<missing>"));
  std::size_t H = 0, W = 0;
  AxisPtr axis;
  int scans = 1;
  std::string sample_id;
  try {
    H = meta.at("shape").at(0).get<std::size_t>();
    W = meta.at("shape").at(1).get<std::size_t>();
    axis = share(axis_from_json(meta.at("axis")));
    scans = meta.at("scan_count").get<int>();
    sample_id = meta.at("sample_id").get<std::string>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::IoError, "malformed cube meta.json: " + std::string(e.what()));
  }

  std::vector<double> data = read_f32_file(dir / "data.f32");
  const std::size_t expected = H * W * axis->size();
  if (data.size() != expected)
    fail(ErrorCode::ShapeMismatch, "data.f32 holds " + std::to_string(data.size()) +
                                       " values, metadata implies " + std::to_string(expected));

  std::optional<std::vector<std::uint8_t>> mask;
  if (fs::exists(dir / "mask.json")) mask = load_mask(dir / "mask.json", H, W);
  return HyperspectralCube(H, W, std::move(axis), std::move(data), std::move(sample_id), scans,
                           std::move(mask));
}

void save_mask(std::span<const std::uint8_t> mask, std::size_t height, std::size_t width,
               const fs::path& file) {
  if (mask.size() != height * width) fail(ErrorCode::ShapeMismatch, "mask size");
  std::vector<int> flat(mask.begin(), mask.end());
  write_json(Json{{"shape", {height, width}}, {"mask", flat}}, file);
}

std::vector<std::uint8_t> load_mask(const fs::path& file, std::size_t height, std::size_t width) {
  const Json j = read_json(file);
  const auto flat = j.at("mask").get<std::vector<int>>();
  if (j.at("shape").at(0).get<std::size_t>() != height ||
      j.at("shape").at(1).get<std::size_t>() != width || flat.size() != height * width)
    fail(ErrorCode::ShapeMismatch, "mask shape does not match cube");
  std::vector<std::uint8_t> m(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) m[i] = flat[i] != 0;
  return m;
}

// ---------------------------------------------------------------------------
// Spectrum CSV

void write_spectrum_csv(const WavenumberAxis& axis, std::span<const double> values,
                        const fs::path& file) {
  if (values.size() != axis.size()) fail(ErrorCode::LengthMismatch, "values/axis length");
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) fail(ErrorCode::IoError, "cannot write " + file.string());
  out.precision(17);
  out << "wavenumber_cm,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << axis.at(i) << ',' << values[i] << '\n';
}

std::pair<std::vector<double>, std::vector<double>> read_spectrum_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::IoError, "cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("wavenumber_cm,value", 0) != 0)
    fail(ErrorCode::IoError, "missing 'wavenumber_cm,value' header in " + file.string());
  std::vector<double> x, y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorCode::IoError, "malformed CSV row: " + line);
    try {
      x.push_back(std::stod(line.substr(0, comma)));
      y.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      fail(ErrorCode::IoError, "malformed CSV row: " + line);
    }
  }
  return {std::move(x), std::move(y)};
}

}  // namespace ftir
