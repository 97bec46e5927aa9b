#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ftir/json_io.hpp"
#include "ftir/metrics.hpp"
#include "ftir/pipelines.hpp"

namespace ftir::bench {

struct Fold {
  std::string test;
  std::vector<std::string> train;
};

/// One fold per sample; TooFewSamples below 2, InvalidConfig on duplicates.
std::vector<Fold> loso_split(const std::vector<std::string>& samples);

/// LeakageDetected if any (sample, x, y) origin is on both sides.
void assert_no_leakage(std::span<const pipelines::PreparedSample> train, const pipelines::PreparedSample& test);

/// Raw cubes of one field of view keyed by scan count.
struct BenchSample {
  std::string sample_id;
  std::map<int, HyperspectralCube> scans;
};

/// Sample directories (containing scan_<N>/ cubes) under `dir`, sorted by name.
std::vector<BenchSample> load_dataset(const std::filesystem::path& dir);

/// Mean silent-window noise over the masked pixels of a raw cube.
double mean_silent_noise(const HyperspectralCube& cube, std::span<const std::uint8_t> mask);

struct SilentNoiseRow {
  std::string sample_id;
  int scan_count = 0;
  double noise = 0.0;
  double ratio_to_lowest = 0.0;  // noise(min scan count) / noise
};

/// Foreground mask taken from the highest scan count cube.
std::vector<SilentNoiseRow> silent_noise_table(const BenchSample& s);

struct BenchConfig {
  std::vector<std::string> methods{"traditional", "single", "cascade"};
  int lq_scans = 1;
  int hq_scans = 32;
  prep::TrimSpec trim;
  dsp::SnipParams snip;
  dsp::SgSearchSpace sg_space = dsp::default_sg_space();
  pipelines::NetTrainConfig single;
  pipelines::CascadeTrainConfig cascade;
  metrics::PeakConfig peaks;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // concurrent folds
  std::function<void(const std::string&)> log;
};

/// Network sizes and epoch caps used by the seeded desk-scale benchmark.
BenchConfig desk_config();

Json to_json(const BenchConfig& cfg);
BenchConfig bench_config_from_json(const Json& j);

struct SpectrumScore {
  SpectrumOrigin origin;
  metrics::MetricSet m;
};

struct MethodFold {
  std::string method;
  std::vector<SpectrumScore> scores;
  Json details;  // fitted hyperparameters, training summaries
};

struct FoldReport {
  std::string test_sample;
  std::vector<std::string> train_samples;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<MethodFold> methods;  // "raw" first

  const MethodFold& method(const std::string& name) const;
};

struct BenchReport {
  BenchConfig config;
  std::vector<FoldReport> folds;
  std::vector<SilentNoiseRow> silent_noise;

  /// Per-spectrum values of one metric for a method, pooled over folds
  /// (or restricted to one fold's test sample).
  std::vector<double> values(const std::string& method, const std::string& metric,
                             const std::string& test_sample = "") const;
  /// 100 * (1 - mean(method) / mean(raw)) on pooled per-spectrum errors.
  double reduction(const std::string& method, const std::string& metric) const;
};

BenchReport run_benchmark(const std::vector<BenchSample>& samples, const BenchConfig& cfg);
BenchReport run_benchmark(const std::filesystem::path& dataset_dir, const BenchConfig& cfg);

Json to_json(const BenchReport& r);

/// report.json, table1.{md,csv}, table2.{md,csv}, stability.csv, silent_noise.csv.
void write_report(const BenchReport& r, const std::filesystem::path& dir);
/// Tables and CSVs regenerated from a saved report.json.
void write_tables(const Json& report, const std::filesystem::path& dir);

}  // namespace ftir::bench
