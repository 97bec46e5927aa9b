#include "ftir/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "ftir/nn/model_io.hpp"
#include "ftir/rng.hpp"

namespace ftir::bench {

namespace fs = std::filesystem;
using pipelines::PreparedSample;

std::vector<Fold> loso_split(const std::vector<std::string>& samples) {
  if (samples.size() < 2) fail(ErrorCode::TooFewSamples, "leave-one-sample-out needs at least 2 samples");
  const std::set<std::string> unique(samples.begin(), samples.end());
  if (unique.size() != samples.size()) fail(ErrorCode::InvalidConfig, "duplicate sample ids");
  std::vector<Fold> folds;
  for (const auto& test : samples) {
    Fold f{test, {}};
    for (const auto& s : samples)
      if (s != test) f.train.push_back(s);
    folds.push_back(std::move(f));
  }
  return folds;
}

void assert_no_leakage(std::span<const PreparedSample> train, const PreparedSample& test) {
  std::set<std::tuple<std::string, std::size_t, std::size_t>> seen;
  for (const auto& s : train)
    for (const auto& sp : s.lq)
      if (sp.origin()) seen.emplace(sp.origin()->sample_id, sp.origin()->x, sp.origin()->y);
  for (const auto& sp : test.lq) {
    if (!sp.origin()) fail(ErrorCode::LeakageDetected, "test spectrum without origin");
    if (seen.count({sp.origin()->sample_id, sp.origin()->x, sp.origin()->y}))
      fail(ErrorCode::LeakageDetected, "spectrum " + sp.origin()->sample_id + " (" + std::to_string(sp.origin()->x) +
                                           ", " + std::to_string(sp.origin()->y) + ") is in train and test");
  }
  for (const auto& s : train)
    if (s.sample_id == test.sample_id) fail(ErrorCode::LeakageDetected, "sample " + test.sample_id + " on both sides");
}

std::vector<BenchSample> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::IoError, "dataset directory " + dir.string() + " not found");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<BenchSample> out;
  for (const auto& d : dirs) {
    BenchSample s;
    for (const auto& e : fs::directory_iterator(d)) {
      const std::string name = e.path().filename().string();
      if (!e.is_directory() || name.rfind("scan_", 0) != 0) continue;
      int n = 0;
      try {
        n = std::stoi(name.substr(5));
      } catch (const std::exception&) {
        continue;
      }
      s.scans.emplace(n, load_cube(e.path()));
    }
    if (s.scans.empty()) continue;
    s.sample_id = s.scans.begin()->second.sample_id();
    out.push_back(std::move(s));
  }
  if (out.empty()) fail(ErrorCode::IoError, "no sample directories with scan_<N>/ cubes under " + dir.string());
  return out;
}

double mean_silent_noise(const HyperspectralCube& cube, std::span<const std::uint8_t> mask) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < cube.height(); ++y)
    for (std::size_t x = 0; x < cube.width(); ++x) {
      if (!mask[y * cube.width() + x]) continue;
      sum += metrics::silent_region_noise(cube.axis(), cube.pixel(x, y));
      ++n;
    }
  if (n == 0) fail(ErrorCode::NoForegroundPixels, "mask selects no pixels");
  return sum / static_cast<double>(n);
}

std::vector<SilentNoiseRow> silent_noise_table(const BenchSample& s) {
  if (s.scans.empty()) return {};
  const auto mask = prep::foreground_mask(s.scans.rbegin()->second);
  std::vector<SilentNoiseRow> rows;
  for (const auto& [n, cube] : s.scans) rows.push_back({s.sample_id, n, mean_silent_noise(cube, mask), 0.0});
  for (auto& r : rows) r.ratio_to_lowest = rows.front().noise / r.noise;
  return rows;
}

BenchConfig desk_config() {
  BenchConfig c;
  nn::UnetConfig u;
  u.depth = 3;
  u.base_channels = 8;
  u.kernel = 3;
  nn::TrainConfig t;
  t.batch_size = 4;
  t.max_epochs = 100;
  t.patience = 30;
  t.optim.lr = 1.0;
  c.single = {u, t};
  c.cascade.stage1 = {u, t};
  c.cascade.stage2 = {u, t};
  c.cascade.snip = c.snip;
  return c;
}

namespace {

Json trim_to_json(const prep::TrimSpec& t) {
  Json ranges = Json::array();
  for (const auto& b : t.drop_ranges) ranges.push_back({b.lo_cm, b.hi_cm});
  return {{"drop_low", t.drop_low}, {"drop_high", t.drop_high}, {"drop_ranges", ranges}};
}

prep::TrimSpec trim_from_json(const Json& j) {
  prep::TrimSpec t;
  t.drop_low = j.value("drop_low", t.drop_low);
  t.drop_high = j.value("drop_high", t.drop_high);
  if (j.contains("drop_ranges")) {
    t.drop_ranges.clear();
    for (const auto& r : j.at("drop_ranges")) t.drop_ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
  }
  return t;
}

Json net_to_json(const pipelines::NetTrainConfig& c) {
  return {{"unet", nn::to_json(c.unet)}, {"train", nn::to_json(c.train)}};
}

pipelines::NetTrainConfig net_from_json(const Json& j, pipelines::NetTrainConfig c) {
  if (j.contains("unet")) c.unet = nn::unet_config_from_json(j.at("unet"));
  if (j.contains("train")) c.train = nn::train_config_from_json(j.at("train"));
  return c;
}

const std::vector<std::string> kMethods{"traditional", "single", "cascade"};

}  // namespace

Json to_json(const BenchConfig& c) {
  return {{"methods", c.methods},
          {"lq_scans", c.lq_scans},
          {"hq_scans", c.hq_scans},
          {"trim", trim_to_json(c.trim)},
          {"snip", pipelines::to_json(c.snip)},
          {"sg_space", {{"windows", c.sg_space.windows}, {"orders", c.sg_space.orders}}},
          {"single", net_to_json(c.single)},
          {"cascade", {{"stage1", net_to_json(c.cascade.stage1)}, {"stage2", net_to_json(c.cascade.stage2)}}},
          {"peaks",
           {{"prominence_frac", c.peaks.prominence_frac},
            {"min_sep_cm", c.peaks.min_sep_cm},
            {"match_window_cm", c.peaks.match_window_cm},
            {"bands_cm", c.peaks.bands_cm}}},
          {"seed", c.seed}};
}

BenchConfig bench_config_from_json(const Json& j) {
  BenchConfig c = desk_config();
  try {
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    c.lq_scans = j.value("lq_scans", c.lq_scans);
    c.hq_scans = j.value("hq_scans", c.hq_scans);
    if (j.contains("trim")) c.trim = trim_from_json(j.at("trim"));
    if (j.contains("snip")) c.snip = pipelines::snip_params_from_json(j.at("snip"));
    if (j.contains("sg_space")) {
      c.sg_space.windows = j.at("sg_space").at("windows").get<std::vector<int>>();
      c.sg_space.orders = j.at("sg_space").at("orders").get<std::vector<int>>();
    }
    if (j.contains("single")) c.single = net_from_json(j.at("single"), c.single);
    if (j.contains("cascade")) {
      const Json& k = j.at("cascade");
      if (k.contains("stage1")) c.cascade.stage1 = net_from_json(k.at("stage1"), c.cascade.stage1);
      if (k.contains("stage2")) c.cascade.stage2 = net_from_json(k.at("stage2"), c.cascade.stage2);
    }
    if (j.contains("peaks")) {
      const Json& p = j.at("peaks");
      c.peaks.prominence_frac = p.value("prominence_frac", c.peaks.prominence_frac);
      c.peaks.min_sep_cm = p.value("min_sep_cm", c.peaks.min_sep_cm);
      c.peaks.match_window_cm = p.value("match_window_cm", c.peaks.match_window_cm);
      c.peaks.bands_cm = p.value("bands_cm", c.peaks.bands_cm);
    }
    c.seed = j.value("seed", c.seed);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bench config: ") + e.what());
  }
  c.cascade.snip = c.snip;
  return c;
}

const MethodFold& FoldReport::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.method == name) return m;
  fail(ErrorCode::InvalidConfig, "method '" + name + "' not in fold " + test_sample);
}

namespace {

double metric_of(const metrics::MetricSet& m, const std::string& metric) {
  if (metric == "rmse") return m.rmse;
  if (metric == "mae") return m.mae;
  if (metric == "sam") return m.sam;
  if (metric == "pcc") return m.pcc;
  if (metric == "spearman") return m.spearman;
  fail(ErrorCode::InvalidConfig, "unknown metric '" + metric + "'");
}

}  // namespace

std::vector<double> BenchReport::values(const std::string& method, const std::string& metric,
                                        const std::string& test_sample) const {
  std::vector<double> out;
  for (const auto& f : folds) {
    if (!test_sample.empty() && f.test_sample != test_sample) continue;
    for (const auto& s : f.method(method).scores) out.push_back(metric_of(s.m, metric));
  }
  return out;
}

double BenchReport::reduction(const std::string& method, const std::string& metric) const {
  const auto raw = values("raw", metric);
  const auto m = values(method, metric);
  return metrics::reduction_percent(metrics::summarize(raw).mean, metrics::summarize(m).mean);
}

namespace {

MethodFold score(const std::string& name, const std::vector<Spectrum>& pred, const std::vector<Spectrum>& truth,
                 const metrics::PeakConfig& peaks) {
  MethodFold mf;
  mf.method = name;
  for (std::size_t i = 0; i < pred.size(); ++i)
    mf.scores.push_back({truth[i].origin().value_or(SpectrumOrigin{}), metrics::compute_metrics(pred[i], truth[i], peaks)});
  return mf;
}

Json history_summary(const std::vector<nn::EpochRecord>& h) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i].val_loss < h[best].val_loss) best = i;
  if (h.empty()) return Json::object();
  return {{"epochs", h.size()},
          {"best_epoch", h[best].epoch},
          {"best_val_loss", h[best].val_loss},
          {"initial_val_loss", h.front().val_loss},
          {"final_train_loss", h.back().train_loss}};
}

FoldReport run_fold(std::size_t fold_index, const Fold& fold, const std::map<std::string, PreparedSample>& prepared,
                    const BenchConfig& cfg) {
  auto log = [&](const std::string& msg) {
    if (cfg.log) cfg.log("[fold " + fold.test + "] " + msg);
  };
  std::vector<PreparedSample> train;
  for (const auto& s : fold.train) train.push_back(prepared.at(s));
  const PreparedSample& test = prepared.at(fold.test);
  assert_no_leakage(train, test);

  std::vector<Spectrum> train_lq, train_hq;
  for (const auto& s : train) {
    train_lq.insert(train_lq.end(), s.lq.begin(), s.lq.end());
    train_hq.insert(train_hq.end(), s.hq.begin(), s.hq.end());
  }

  FoldReport rep;
  rep.test_sample = fold.test;
  rep.train_samples = fold.train;
  rep.n_train = train_lq.size();
  rep.n_test = test.lq.size();

  const MinMax range = pipelines::fit_global_range(train_lq, train_hq, cfg.snip);
  const auto targets = pipelines::build_targets(train_hq, cfg.snip, range);
  const auto lq_norm = pipelines::normalize_all(train_lq, range);
  const auto test_norm = pipelines::normalize_all(test.lq, range);
  const auto truth = pipelines::build_targets(test.hq, cfg.snip, range).target_b;

  MethodFold raw = score("raw", pipelines::raw_reference(test.lq, cfg.snip, range), truth, cfg.peaks);
  raw.details = {{"range", pipelines::to_json(range)}};
  rep.methods.push_back(std::move(raw));

  for (const auto& method : cfg.methods) {
    if (method == "traditional") {
      std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
      for (std::size_t i = 0; i < lq_norm.size(); ++i) pairs.emplace_back(lq_norm[i].vector(), targets.target_a[i].vector());
      const auto best = dsp::optimize_sg(pairs, cfg.sg_space);
      log("traditional: SG window " + std::to_string(best.best.window) + " order " + std::to_string(best.best.order));
      MethodFold mf =
          score(method, pipelines::traditional_restore(test_norm, best.best, cfg.snip, range), truth, cfg.peaks);
      mf.details = {{"sg", pipelines::to_json(best.best)}, {"objective", best.objective}};
      rep.methods.push_back(std::move(mf));
    } else if (method == "single") {
      pipelines::NetTrainConfig nc = cfg.single;
      nc.unet.seed = derive_seed(cfg.seed, Stream::init, fold_index, 0);
      nc.train.shuffle_seed = derive_seed(cfg.seed, Stream::shuffle, fold_index, 0);
      log("single: training");
      const auto res = pipelines::single_unet_train(lq_norm, targets, nc);
      MethodFold mf = score(method, pipelines::single_unet_restore(test_norm, res.model, range), truth, cfg.peaks);
      mf.details = {{"training", history_summary(res.history)}};
      log("single: done after " + std::to_string(res.history.size()) + " epochs");
      rep.methods.push_back(std::move(mf));
    } else if (method == "cascade") {
      pipelines::CascadeTrainConfig cc = cfg.cascade;
      cc.snip = cfg.snip;
      cc.stage1.unet.seed = derive_seed(cfg.seed, Stream::init, fold_index, 1);
      cc.stage1.train.shuffle_seed = derive_seed(cfg.seed, Stream::shuffle, fold_index, 1);
      cc.stage2.unet.seed = derive_seed(cfg.seed, Stream::init, fold_index, 2);
      cc.stage2.train.shuffle_seed = derive_seed(cfg.seed, Stream::shuffle, fold_index, 2);
      log("cascade: training");
      const auto res = pipelines::cascade_train(lq_norm, targets, cc);
      MethodFold mf = score(method, pipelines::cascade_infer(test_norm, res.model), truth, cfg.peaks);
      mf.details = {{"stage1", history_summary(res.history1)},
                    {"stage2", history_summary(res.history2)},
                    {"stage2_norm", pipelines::to_json(res.model.stage2_norm)}};
      log("cascade: done after " + std::to_string(res.history1.size()) + " + " +
          std::to_string(res.history2.size()) + " epochs");
      rep.methods.push_back(std::move(mf));
    } else {
      fail(ErrorCode::InvalidConfig, "unknown method '" + method + "'");
    }
  }
  return rep;
}

}  // namespace

BenchReport run_benchmark(const std::vector<BenchSample>& samples, const BenchConfig& cfg_in) {
  BenchConfig cfg = cfg_in;
  for (const auto& m : cfg.methods)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
      fail(ErrorCode::InvalidConfig, "unknown method '" + m + "'");
  std::mutex log_mu;
  if (cfg_in.log)
    cfg.log = [&](const std::string& s) {
      std::lock_guard lock(log_mu);
      cfg_in.log(s);
    };

  std::vector<std::string> ids;
  std::map<std::string, PreparedSample> prepared;
  BenchReport rep;
  for (const auto& s : samples) {
    const auto lq = s.scans.find(cfg.lq_scans);
    const auto hq = s.scans.find(cfg.hq_scans);
    if (lq == s.scans.end() || hq == s.scans.end())
      fail(ErrorCode::IoError, "sample " + s.sample_id + " lacks scan_" + std::to_string(cfg.lq_scans) + " or scan_" +
                                   std::to_string(cfg.hq_scans));
    ids.push_back(s.sample_id);
    prepared.emplace(s.sample_id, pipelines::prepare_pair(lq->second, hq->second, cfg.trim));
    const auto rows = silent_noise_table(s);
    rep.silent_noise.insert(rep.silent_noise.end(), rows.begin(), rows.end());
  }
  const auto folds = loso_split(ids);

  rep.folds.resize(folds.size());
  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, folds.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < folds.size(); ++i) rep.folds[i] = run_fold(i, folds[i], prepared, cfg);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(folds.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < folds.size(); i = next++) {
          try {
            rep.folds[i] = run_fold(i, folds[i], prepared, cfg);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  rep.config = cfg_in;
  return rep;
}

BenchReport run_benchmark(const fs::path& dataset_dir, const BenchConfig& cfg) {
  return run_benchmark(load_dataset(dataset_dir), cfg);
}

namespace {

Json summary_json(const metrics::Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"std", s.std}, {"p25", s.p25}, {"p50", s.p50}, {"p75", s.p75}, {"iqr", s.iqr}};
}

const std::vector<std::string> kScalarMetrics{"rmse", "mae", "sam", "pcc", "spearman"};

Json method_block(const std::vector<const MethodFold*>& parts) {
  Json block;
  std::vector<double> heights, positions;
  std::size_t halluc = 0, missed = 0;
  for (const auto* p : parts)
    for (const auto& s : p->scores) {
      heights.insert(heights.end(), s.m.peak_height_errors.begin(), s.m.peak_height_errors.end());
      positions.insert(positions.end(), s.m.peak_pos_errors.begin(), s.m.peak_pos_errors.end());
      halluc += s.m.hallucinated_peaks;
      missed += s.m.missed_peaks;
    }
  for (const auto& metric : kScalarMetrics) {
    std::vector<double> v;
    for (const auto* p : parts)
      for (const auto& s : p->scores) v.push_back(metric_of(s.m, metric));
    block[metric] = summary_json(metrics::summarize(v));
  }
  block["peak_height_bias"] = summary_json(metrics::summarize(heights));
  block["peak_position_error_cm"] = summary_json(metrics::summarize(positions));
  block["hallucinated_peaks"] = halluc;
  block["missed_peaks"] = missed;
  return block;
}

}  // namespace

Json to_json(const BenchReport& r) {
  Json j;
  j["format_version"] = "ftir-bench-v1";
  j["config"] = to_json(r.config);
  std::vector<std::string> methods{"raw"};
  methods.insert(methods.end(), r.config.methods.begin(), r.config.methods.end());
  j["methods"] = methods;

  Json folds = Json::array();
  for (const auto& f : r.folds) {
    Json fj{{"test_sample", f.test_sample}, {"train_samples", f.train_samples}, {"n_train", f.n_train},
            {"n_test", f.n_test}};
    for (const auto& m : f.methods) {
      Json mj = method_block({&m});
      mj["details"] = m.details;
      Json per = Json::array();
      for (const auto& s : m.scores)
        per.push_back({{"x", s.origin.x},
                       {"y", s.origin.y},
                       {"rmse", s.m.rmse},
                       {"mae", s.m.mae},
                       {"sam", s.m.sam},
                       {"pcc", s.m.pcc},
                       {"spearman", s.m.spearman},
                       {"hallucinated_peaks", s.m.hallucinated_peaks},
                       {"missed_peaks", s.m.missed_peaks}});
      mj["per_spectrum"] = per;
      fj["methods"][m.method] = mj;
    }
    folds.push_back(fj);
  }
  j["folds"] = folds;

  Json pooled;
  for (const auto& name : methods) {
    std::vector<const MethodFold*> parts;
    for (const auto& f : r.folds) parts.push_back(&f.method(name));
    Json block = method_block(parts);
    for (const char* metric : {"rmse", "mae", "sam"}) block["reduction_percent"][metric] = r.reduction(name, metric);
    pooled[name] = block;
  }
  j["pooled"] = pooled;

  Json noise = Json::array();
  for (const auto& row : r.silent_noise)
    noise.push_back({{"sample_id", row.sample_id},
                     {"scan_count", row.scan_count},
                     {"noise", row.noise},
                     {"ratio_to_lowest", row.ratio_to_lowest}});
  j["silent_noise"] = noise;
  j["notes"] = {{"percentiles", "linear interpolation between closest ranks; table 2 reports p25, p50, p75"},
                {"reduction", "100 * (1 - mean_method / mean_raw) over pooled per-spectrum errors"},
                {"ground_truth", "SNIP-corrected 32-scan spectra, SNV then fold-level min-max"}};
  return j;
}

namespace {

std::string fmt(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

void write_text(const std::string& text, const fs::path& file) {
  std::ofstream out(file);
  if (!out) fail(ErrorCode::IoError, "cannot write " + file.string());
  out << text;
}

}  // namespace

void write_tables(const Json& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  try {
    const auto methods = report.at("methods").get<std::vector<std::string>>();
    const Json& pooled = report.at("pooled");

    std::ostringstream md1, csv1;
    md1 << "| Method | RMSE | RMSE reduction % | MAE reduction % | SAM reduction % | PCC | Spearman |\n"
        << "|---|---|---|---|---|---|---|\n";
    csv1 << "method,rmse_mean,rmse_reduction_pct,mae_reduction_pct,sam_reduction_pct,pcc_mean,spearman_mean\n";
    for (const auto& m : methods) {
      const Json& b = pooled.at(m);
      const Json& red = b.at("reduction_percent");
      md1 << "| " << m << " | " << fmt(b["rmse"]["mean"], 4) << " | " << fmt(red["rmse"], 2) << " | "
          << fmt(red["mae"], 2) << " | " << fmt(red["sam"], 2) << " | " << fmt(b["pcc"]["mean"], 4) << " | "
          << fmt(b["spearman"]["mean"], 4) << " |\n";
      csv1 << m << ',' << fmt(b["rmse"]["mean"], 6) << ',' << fmt(red["rmse"], 4) << ',' << fmt(red["mae"], 4) << ','
           << fmt(red["sam"], 4) << ',' << fmt(b["pcc"]["mean"], 6) << ',' << fmt(b["spearman"]["mean"], 6) << '\n';
    }
    write_text(md1.str(), dir / "table1.md");
    write_text(csv1.str(), dir / "table1.csv");

    std::ostringstream md2, csv2;
    md2 << "| Method | Matched peaks | Bias p25 | Bias p50 | Bias p75 | Bias IQR | Position error p50 (cm-1) | "
           "Hallucinated | Missed |\n"
        << "|---|---|---|---|---|---|---|---|---|\n";
    csv2 << "method,matched,bias_p25,bias_p50,bias_p75,bias_iqr,pos_err_p50_cm,hallucinated,missed\n";
    for (const auto& m : methods) {
      const Json& b = pooled.at(m);
      const Json& h = b.at("peak_height_bias");
      const Json& p = b.at("peak_position_error_cm");
      md2 << "| " << m << " | " << h["n"].get<std::size_t>() << " | " << fmt(h["p25"], 4) << " | " << fmt(h["p50"], 4)
          << " | " << fmt(h["p75"], 4) << " | " << fmt(h["iqr"], 4) << " | " << fmt(p["p50"], 2) << " | "
          << b["hallucinated_peaks"].get<std::size_t>() << " | " << b["missed_peaks"].get<std::size_t>() << " |\n";
      csv2 << m << ',' << h["n"].get<std::size_t>() << ',' << fmt(h["p25"], 6) << ',' << fmt(h["p50"], 6) << ','
           << fmt(h["p75"], 6) << ',' << fmt(h["iqr"], 6) << ',' << fmt(p["p50"], 4) << ','
           << b["hallucinated_peaks"].get<std::size_t>() << ',' << b["missed_peaks"].get<std::size_t>() << '\n';
    }
    write_text(md2.str(), dir / "table2.md");
    write_text(csv2.str(), dir / "table2.csv");

    std::ostringstream st;
    st << "test_sample,method,x,y,rmse\n";
    for (const auto& f : report.at("folds"))
      for (const auto& m : methods)
        for (const auto& s : f.at("methods").at(m).at("per_spectrum"))
          st << f.at("test_sample").get<std::string>() << ',' << m << ',' << s.at("x").get<std::size_t>() << ','
             << s.at("y").get<std::size_t>() << ',' << fmt(s.at("rmse"), 8) << '\n';
    write_text(st.str(), dir / "stability.csv");

    std::ostringstream sn;
    sn << "sample_id,scan_count,noise,ratio_to_lowest\n";
    for (const auto& row : report.at("silent_noise"))
      sn << row.at("sample_id").get<std::string>() << ',' << row.at("scan_count").get<int>() << ','
         << fmt(row.at("noise"), 8) << ',' << fmt(row.at("ratio_to_lowest"), 4) << '\n';
    write_text(sn.str(), dir / "silent_noise.csv");
  } catch (const Json::exception& e) {
    fail(ErrorCode::IoError, std::string("malformed report.json: ") + e.what());
  }
}

void write_report(const BenchReport& r, const fs::path& dir) {
  const Json j = to_json(r);
  write_json(j, dir / "report.json");
  write_tables(j, dir);
}

}  // namespace ftir::bench
