#include "ftir/cli.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ftir/bench.hpp"
#include "ftir/nn/model_io.hpp"
#include "ftir/pipelines.hpp"
#include "ftir/rng.hpp"
#include "ftir/synthgen.hpp"
#include "ftir/transform.hpp"

namespace ftir::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::size_t threads = 1;
  std::string config_file;
  bool dump_config = false;
};

void add_common(CLI::App* app, Common& c, bool needs_out = true) {
  auto* o = app->add_option("--out", c.out, "Output directory");
  if (needs_out) o->required();
  c.seed_opt = app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--threads", c.threads, "Worker cap; 1 is the deterministic reference path")
      ->check(CLI::PositiveNumber);
  app->add_option("--config", c.config_file, "JSON config (or a manifest.json to replay); flags override it");
  app->add_flag("--dump-config", c.dump_config, "Print the resolved config and exit");
}

// A manifest carries its config under "config".
Json load_config_file(const std::string& file) {
  if (file.empty()) return Json::object();
  Json j = read_json(file);
  if (j.contains("command") && j.contains("config")) return j.at("config");
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, file + " is not a JSON object");
  return j;
}

Json resolve(Json defaults, const Common& c) {
  defaults.merge_patch(load_config_file(c.config_file));
  return defaults;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_manifest(const std::string& command, const std::vector<std::string>& args, const Json& config,
                    const Json& inputs, const fs::path& out, std::chrono::steady_clock::time_point start) {
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json({{"command", command},
              {"argv", args},
              {"config", config},
              {"inputs", inputs},
              {"output", out.string()},
              {"tool_version", FTIR_VERSION},
              {"started_utc", utc_now()},
              {"wall_clock_seconds", secs}},
             out / "manifest.json");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Prepared LQ/HQ spectra of the selected samples, concatenated.
struct TrainingData {
  std::vector<Spectrum> lq;
  std::vector<Spectrum> hq;
};

TrainingData load_training(const fs::path& data, const Json& cfg) {
  const auto wanted = cfg.value("samples", std::vector<std::string>{});
  const int lq_scans = cfg.value("lq_scans", 1);
  const int hq_scans = cfg.value("hq_scans", 32);
  prep::TrimSpec trim;
  if (cfg.contains("trim")) trim = bench::bench_config_from_json({{"trim", cfg.at("trim")}}).trim;
  TrainingData td;
  for (const auto& s : bench::load_dataset(data)) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), s.sample_id) == wanted.end()) continue;
    const auto lq = s.scans.find(lq_scans);
    const auto hq = s.scans.find(hq_scans);
    if (lq == s.scans.end() || hq == s.scans.end())
      fail(ErrorCode::IoError, "sample " + s.sample_id + " lacks the requested scan counts");
    auto p = pipelines::prepare_pair(lq->second, hq->second, trim);
    td.lq.insert(td.lq.end(), p.lq.begin(), p.lq.end());
    td.hq.insert(td.hq.end(), p.hq.begin(), p.hq.end());
  }
  if (td.lq.empty()) fail(ErrorCode::EmptyDataset, "no training spectra selected from " + data.string());
  return td;
}

// "lo:hi" in cm^-1.
std::pair<double, double> parse_band(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const double lo = std::stod(s.substr(0, colon), &used);
    const double hi = std::stod(s.substr(colon + 1));
    if (!(hi > lo)) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    fail(ErrorCode::UsageError, "expected a band lo:hi with hi > lo, got '" + s + "'");
  }
}

// "a:b[:step]" (inclusive) or "a,b,c".
std::vector<int> parse_int_range(const std::string& s) {
  std::vector<int> out;
  try {
    if (s.find(':') != std::string::npos) {
      std::vector<int> parts;
      std::size_t pos = 0;
      while (pos <= s.size()) {
        const auto next = s.find(':', pos);
        parts.push_back(std::stoi(s.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
      }
      if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument(s);
      const int step = parts.size() == 3 ? parts[2] : 1;
      if (step <= 0 || parts[1] < parts[0]) throw std::invalid_argument(s);
      for (int v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
    } else {
      for (const auto& t : split_csv(s)) out.push_back(std::stoi(t));
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::UsageError, "expected a:b[:step] or a comma list, got '" + s + "'");
  }
  if (out.empty()) fail(ErrorCode::UsageError, "empty range '" + s + "'");
  return out;
}

Json default_prep_json() {
  const Json b = bench::to_json(bench::BenchConfig{});
  return {{"lq_scans", 1}, {"hq_scans", 32}, {"samples", Json::array()}, {"trim", b.at("trim")}, {"snip", b.at("snip")}};
}

// ---------------------------------------------------------------------------

int cmd_synth(const Common& c, const std::string& preset, std::ostream& out, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  Json cfg = resolve({{"preset", preset}, {"seed", 2024}}, c);
  if (c.seed_opt->count()) cfg["seed"] = c.seed;
  if (!cfg.contains("dataset")) {
    const std::string p = cfg.at("preset").get<std::string>();
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    synth::DatasetConfig d;
    if (p == "benchmark") d = synth::benchmark_dataset(seed);
    else if (p == "reference") d.samples.push_back(synth::reference_config(seed));
    else if (p == "drift") d.samples.push_back(synth::drift_config(seed));
    else fail(ErrorCode::InvalidConfig, "unknown preset '" + p + "' (benchmark, reference, drift)");
    cfg["dataset"] = synth::to_json(d);
  } else if (c.seed_opt->count()) {
    auto d = synth::dataset_config_from_json(cfg.at("dataset"));
    for (std::size_t k = 0; k < d.samples.size(); ++k) d.samples[k].seed = derive_seed(c.seed, Stream::bench, k);
    cfg["dataset"] = synth::to_json(d);
  }
  if (c.dump_config) {
    out << cfg.dump(2) << '\n';
    return 0;
  }
  const auto d = synth::dataset_config_from_json(cfg.at("dataset"));
  synth::write_dataset(d, c.out);
  write_manifest("synth", args, cfg, Json::object(), c.out, start);
  out << "wrote " << d.samples.size() << " sample(s) to " << c.out << '\n';
  return 0;
}

struct PrepFlags {
  std::string in;
  std::string mask_from;
  std::string fingerprint;
  std::string ch;
  std::string trim;
};

int cmd_prep(const Common& c, const PrepFlags& f, std::ostream& out, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  Json defaults{{"trim", default_prep_json().at("trim")},
                {"fingerprint", {prep::kFingerprintBand.lo_cm, prep::kFingerprintBand.hi_cm}},
                {"ch", {prep::kChStretchBand.lo_cm, prep::kChStretchBand.hi_cm}}};
  Json cfg = resolve(defaults, c);
  if (!f.fingerprint.empty()) {
    const auto [lo, hi] = parse_band(f.fingerprint);
    cfg["fingerprint"] = {lo, hi};
  }
  if (!f.ch.empty()) {
    const auto [lo, hi] = parse_band(f.ch);
    cfg["ch"] = {lo, hi};
  }
  if (!f.trim.empty()) {
    Json ranges = Json::array();
    for (const auto& b : split_csv(f.trim)) {
      const auto [lo, hi] = parse_band(b);
      ranges.push_back({lo, hi});
    }
    cfg["trim"]["drop_ranges"] = ranges;
  }
  if (c.dump_config) {
    out << cfg.dump(2) << '\n';
    return 0;
  }
  const auto trim = bench::bench_config_from_json({{"trim", cfg.at("trim")}}).trim;
  const prep::Band fp{cfg.at("fingerprint").at(0).get<double>(), cfg.at("fingerprint").at(1).get<double>()};
  const prep::Band ch{cfg.at("ch").at(0).get<double>(), cfg.at("ch").at(1).get<double>()};
  const auto cube = load_cube(f.in);
  const auto mask = prep::foreground_mask(f.mask_from.empty() ? cube : load_cube(f.mask_from), fp, ch);
  const auto background = prep::background_spectrum(cube, mask);
  const auto prepared = prep::trim(prep::subtract_background(cube, mask), trim);
  const fs::path dir = c.out;
  save_cube(prepared, dir / "cube");
  save_mask(mask, cube.height(), cube.width(), dir / "mask.json");
  write_spectrum_csv(cube.axis(), background, dir / "background.csv");
  write_manifest("prep", args, cfg, {{"in", f.in}, {"mask_from", f.mask_from}}, c.out, start);
  std::size_t fg = 0;
  for (auto m : mask) fg += m;
  out << "foreground pixels: " << fg << ", bands kept: " << prepared.bands() << '\n';
  return 0;
}

struct SgFlags {
  std::string data;
  std::string windows;
  std::string orders;
};

int cmd_optimize_sg(const Common& c, const SgFlags& f, std::ostream& out, const std::vector<std::string>& args) {
  const std::string& data = f.data;
  const auto start = std::chrono::steady_clock::now();
  Json defaults = default_prep_json();
  const auto space = dsp::default_sg_space();
  defaults["sg_space"] = {{"windows", space.windows}, {"orders", space.orders}};
  defaults["search"] = "grid";
  defaults["trials"] = 20;
  defaults["seed"] = 0;
  Json cfg = resolve(defaults, c);
  if (c.seed_opt->count()) cfg["seed"] = c.seed;
  if (!f.windows.empty()) cfg["sg_space"]["windows"] = parse_int_range(f.windows);
  if (!f.orders.empty()) cfg["sg_space"]["orders"] = parse_int_range(f.orders);
  if (c.dump_config) {
    out << cfg.dump(2) << '\n';
    return 0;
  }
  const auto td = load_training(data, cfg);
  const auto snip = pipelines::snip_params_from_json(cfg.at("snip"));
  const MinMax range = pipelines::fit_global_range(td.lq, td.hq, snip);
  const auto targets = pipelines::build_targets(td.hq, snip, range);
  const auto lq = pipelines::normalize_all(td.lq, range);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  for (std::size_t i = 0; i < lq.size(); ++i) pairs.emplace_back(lq[i].vector(), targets.target_a[i].vector());
  dsp::SgSearchSpace sp{cfg.at("sg_space").at("windows").get<std::vector<int>>(),
                        cfg.at("sg_space").at("orders").get<std::vector<int>>()};
  const std::string search = cfg.at("search").get<std::string>();
  dsp::SgSearchResult res;
  if (search == "grid") res = dsp::optimize_sg(pairs, sp);
  else if (search == "random")
    res = dsp::optimize_sg_random(pairs, sp, cfg.at("trials").get<std::size_t>(), cfg.at("seed").get<std::uint64_t>());
  else fail(ErrorCode::InvalidConfig, "search must be 'grid' or 'random'");

  Json grid = Json::array();
  for (const auto& g : res.grid) grid.push_back({{"window", g.params.window}, {"order", g.params.order}, {"objective", g.objective}});
  write_json({{"window", res.best.window}, {"order", res.best.order}, {"objective", res.objective}, {"grid_dump", grid}},
             fs::path(c.out) / "sg.json");
  write_json(pipelines::to_json(range), fs::path(c.out) / "norm.json");
  write_json(pipelines::to_json(snip), fs::path(c.out) / "snip.json");
  write_json({{"trim", cfg.at("trim")}}, fs::path(c.out) / "prep.json");
  write_manifest("optimize-sg", args, cfg, {{"data", data}}, c.out, start);
  out << "best window " << res.best.window << " order " << res.best.order << " objective " << res.objective << '\n';
  return 0;
}

struct TrainFlags {
  std::string method = "cascade";
  std::string data;
  std::string samples;
  std::size_t epochs = 0;
  int base_channels = 0;
  int depth = 0;
};

void override_net(Json& net, const TrainFlags& f) {
  if (f.epochs) net["train"]["max_epochs"] = f.epochs;
  if (f.base_channels) net["unet"]["base_channels"] = f.base_channels;
  if (f.depth) net["unet"]["depth"] = f.depth;
}

int cmd_train(const Common& c, const TrainFlags& f, std::ostream& out, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  const Json b = bench::to_json(bench::desk_config());
  Json defaults = default_prep_json();
  defaults["method"] = f.method;
  defaults["seed"] = 0;
  defaults["single"] = b.at("single");
  defaults["cascade"] = b.at("cascade");
  Json cfg = resolve(defaults, c);
  if (c.seed_opt->count()) cfg["seed"] = c.seed;
  if (!f.samples.empty()) cfg["samples"] = split_csv(f.samples);
  override_net(cfg["single"], f);
  override_net(cfg["cascade"]["stage1"], f);
  override_net(cfg["cascade"]["stage2"], f);
  if (c.dump_config) {
    out << cfg.dump(2) << '\n';
    return 0;
  }
  const std::string method = cfg.at("method").get<std::string>();
  if (method != "single" && method != "cascade") fail(ErrorCode::InvalidConfig, "train --method must be single or cascade");
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto bc = bench::bench_config_from_json(cfg);
  const auto td = load_training(f.data, cfg);
  const MinMax range = pipelines::fit_global_range(td.lq, td.hq, bc.snip);
  const auto targets = pipelines::build_targets(td.hq, bc.snip, range);
  const auto lq = pipelines::normalize_all(td.lq, range);
  auto log = [&](const char* stage) {
    return [&out, stage](const nn::EpochRecord& r) {
      if (r.epoch % 10 == 0) out << stage << " epoch " << r.epoch << " train " << r.train_loss << " val " << r.val_loss << '\n';
    };
  };
  const fs::path dir = c.out;
  if (method == "single") {
    auto nc = bc.single;
    nc.unet.seed = derive_seed(seed, Stream::init, 0, 0);
    nc.train.shuffle_seed = derive_seed(seed, Stream::shuffle, 0, 0);
    nc.train.on_epoch = log("single");
    const auto res = pipelines::single_unet_train(lq, targets, nc);
    pipelines::save_stage(res.model, dir);
    write_json(nn::to_json(res.history), dir / "history.json");
  } else {
    auto cc = bc.cascade;
    cc.stage1.unet.seed = derive_seed(seed, Stream::init, 0, 1);
    cc.stage1.train.shuffle_seed = derive_seed(seed, Stream::shuffle, 0, 1);
    cc.stage2.unet.seed = derive_seed(seed, Stream::init, 0, 2);
    cc.stage2.train.shuffle_seed = derive_seed(seed, Stream::shuffle, 0, 2);
    cc.stage1.train.on_epoch = log("stage1");
    cc.stage2.train.on_epoch = log("stage2");
    const auto res = pipelines::cascade_train(lq, targets, cc);
    pipelines::save_cascade(res.model, dir);
    write_json({{"stage1", nn::to_json(res.history1)}, {"stage2", nn::to_json(res.history2)}}, dir / "history.json");
  }
  write_json(pipelines::to_json(range), dir / "norm.json");
  write_json(pipelines::to_json(bc.snip), dir / "snip.json");
  write_json({{"trim", cfg.at("trim")}, {"method", method}}, dir / "prep.json");
  write_manifest("train", args, cfg, {{"data", f.data}}, dir, start);
  out << "trained " << method << " on " << lq.size() << " spectra; model in " << c.out << '\n';
  return 0;
}

int cmd_restore(const Common& c, const std::string& method_flag, const std::string& model, const std::string& in,
                const std::string& mask_from, std::ostream& out, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  Json cfg = resolve({{"method", method_flag}}, c);
  if (c.dump_config) {
    out << cfg.dump(2) << '\n';
    return 0;
  }
  const std::string method = cfg.at("method").get<std::string>();
  const fs::path mdir = model;
  const Json prep_cfg = read_json(mdir / "prep.json");
  const auto trim = bench::bench_config_from_json({{"trim", prep_cfg.at("trim")}}).trim;
  const MinMax range = pipelines::minmax_from_json(read_json(mdir / "norm.json"));
  const auto snip = pipelines::snip_params_from_json(read_json(mdir / "snip.json"));

  const auto cube = load_cube(in);
  const auto mask = prep::foreground_mask(mask_from.empty() ? cube : load_cube(mask_from));
  const auto prepared = prep::trim(prep::subtract_background(cube, mask), trim);
  const auto spectra = prep::foreground_spectra(prepared, mask);
  const auto norm = pipelines::normalize_all(spectra, range);

  std::vector<Spectrum> restored;
  if (method == "traditional") {
    const auto sg = pipelines::sg_params_from_json(read_json(mdir / "sg.json"));
    restored = pipelines::traditional_restore(norm, sg, snip, range);
  } else if (method == "single") {
    restored = pipelines::single_unet_restore(norm, pipelines::load_stage(mdir), range);
  } else if (method == "cascade") {
    restored = pipelines::cascade_infer(norm, pipelines::load_cascade(mdir));
  } else {
    fail(ErrorCode::InvalidConfig, "restore --method must be traditional, single or cascade");
  }

  const std::size_t bands = prepared.bands();
  std::vector<double> data(prepared.pixel_count() * bands, 0.0);
  for (const auto& s : restored) {
    const auto& o = *s.origin();
    std::copy(s.values().begin(), s.values().end(), data.begin() + static_cast<std::ptrdiff_t>((o.y * prepared.width() + o.x) * bands));
  }
  const HyperspectralCube result(prepared.height(), prepared.width(), prepared.axis_ptr(), std::move(data),
                                 cube.sample_id(), cube.scan_count(), mask);
  save_cube(result, c.out);
  write_manifest("restore", args, cfg, {{"model", model}, {"in", in}, {"mask_from", mask_from}}, c.out, start);
  out << "restored " << restored.size() << " spectra with " << method << '\n';
  return 0;
}

struct BenchFlags {
  std::string data;
  std::string methods;
  bool loso = true;
  std::size_t epochs = 0;
  int base_channels = 0;
};

int cmd_bench(const Common& c, const BenchFlags& f, std::ostream& out, std::ostream& err,
              const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  Json cfg = resolve(bench::to_json(bench::desk_config()), c);
  if (c.seed_opt->count()) cfg["seed"] = c.seed;
  if (!f.methods.empty()) cfg["methods"] = split_csv(f.methods);
  TrainFlags tf;
  tf.epochs = f.epochs;
  tf.base_channels = f.base_channels;
  override_net(cfg["single"], tf);
  override_net(cfg["cascade"]["stage1"], tf);
  override_net(cfg["cascade"]["stage2"], tf);
  if (c.dump_config) {
    out << cfg.dump(2) << '\n';
    return 0;
  }
  if (!f.loso) fail(ErrorCode::InvalidConfig, "only leave-one-sample-out evaluation is implemented");
  auto bc = bench::bench_config_from_json(cfg);
  bc.threads = c.threads;
  bc.log = [&err](const std::string& s) { err << s << '\n'; };
  const auto report = bench::run_benchmark(fs::path(f.data), bc);
  bench::write_report(report, c.out);
  write_manifest("bench", args, cfg, {{"data", f.data}}, c.out, start);
  for (const auto& m : report.config.methods)
    out << m << ": RMSE reduction " << report.reduction(m, "rmse") << "%\n";
  return 0;
}

int cmd_report(const Common& c, const std::string& in, std::ostream& out, const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  if (c.dump_config) {
    out << "{}\n";
    return 0;
  }
  fs::path file = in;
  if (fs::is_directory(file)) file /= "report.json";
  bench::write_tables(read_json(file), c.out);
  write_manifest("report", args, Json::object(), {{"in", file.string()}}, c.out, start);
  out << "tables written to " << c.out << '\n';
  return 0;
}

void report_error(std::ostream& err, const std::string& code, const std::string& msg) {
  err << Json{{"error", code}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FTIR spectral restoration toolkit", "ftir"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FTIR_VERSION));

  Common common;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string preset = "benchmark";
  synth->add_option("--preset", preset, "benchmark | reference | drift");
  add_common(synth, common);

  auto* prep = app.add_subcommand("prep", "Mask, subtract background and trim one cube");
  PrepFlags pf;
  prep->add_option("--in,--cube", pf.in, "Input cube directory")->required();
  prep->add_option("--mask-from", pf.mask_from, "Cube used for the foreground mask (default: --in)");
  prep->add_option("--fingerprint", pf.fingerprint, "Fingerprint band lo:hi for the mask score");
  prep->add_option("--ch", pf.ch, "C-H stretch band lo:hi for the mask score");
  prep->add_option("--trim", pf.trim, "Bands to drop, lo:hi[,lo:hi...]");
  add_common(prep, common);

  auto* opt = app.add_subcommand("optimize-sg", "Grid-search Savitzky-Golay parameters");
  SgFlags sf;
  opt->add_option("--data,--train", sf.data, "Dataset directory")->required();
  opt->add_option("--windows", sf.windows, "Window lengths, a:b[:step] or a comma list");
  opt->add_option("--orders", sf.orders, "Polynomial orders, a:b[:step] or a comma list");
  add_common(opt, common);

  auto* train = app.add_subcommand("train", "Train a single Unet or the cascade");
  TrainFlags tf;
  train->add_option("--method", tf.method, "single | cascade")->check(CLI::IsMember({"single", "cascade"}));
  train->add_option("--data", tf.data, "Dataset directory")->required();
  train->add_option("--samples", tf.samples, "Comma-separated sample ids (default: all)");
  train->add_option("--epochs", tf.epochs, "Maximum epochs per network");
  train->add_option("--base-channels", tf.base_channels, "Unet base channel count");
  train->add_option("--depth", tf.depth, "Unet depth");
  add_common(train, common);

  auto* restore = app.add_subcommand("restore", "Restore a cube with a fitted method");
  std::string r_method = "cascade", r_model, r_in, r_mask;
  restore->add_option("--method", r_method, "traditional | single | cascade")
      ->check(CLI::IsMember({"traditional", "single", "cascade"}));
  restore->add_option("--model", r_model, "Model directory (train or optimize-sg output)")->required();
  restore->add_option("--in", r_in, "Input LQ cube directory")->required();
  restore->add_option("--mask-from", r_mask, "Cube used for the foreground mask (default: --in)");
  add_common(restore, common);

  auto* benchc = app.add_subcommand("bench", "Leave-one-sample-out benchmark");
  BenchFlags bf;
  benchc->add_option("--data", bf.data, "Dataset directory")->required();
  benchc->add_option("--methods", bf.methods, "Comma-separated: traditional,single,cascade");
  benchc->add_flag("--loso,!--no-loso", bf.loso, "Leave-one-sample-out folds (the only mode)");
  benchc->add_option("--epochs", bf.epochs, "Maximum epochs per network");
  benchc->add_option("--base-channels", bf.base_channels, "Unet base channel count");
  add_common(benchc, common);

  auto* report = app.add_subcommand("report", "Regenerate tables from report.json");
  std::string rep_in;
  report->add_option("--in", rep_in, "report.json or the report directory")->required();
  add_common(report, common);

  std::vector<std::string> argv_store{"ftir"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << FTIR_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "UsageError", e.what());
    return 2;
  }

  // Every subcommand registered its own --seed; read the one that parsed.
  for (auto* sub : app.get_subcommands()) common.seed_opt = sub->get_option("--seed");

  try {
    if (*synth) return cmd_synth(common, preset, out, args);
    if (*prep) return cmd_prep(common, pf, out, args);
    if (*opt) return cmd_optimize_sg(common, sf, out, args);
    if (*train) return cmd_train(common, tf, out, args);
    if (*restore) return cmd_restore(common, r_method, r_model, r_in, r_mask, out, args);
    if (*benchc) return cmd_bench(common, bf, out, err, args);
    if (*report) return cmd_report(common, rep_in, out, args);
  } catch (const Error& e) {
    report_error(err, std::string(to_string(e.code())), e.what());
    return e.code() == ErrorCode::UsageError ? 2 : 1;
  } catch (const Json::exception& e) {
    report_error(err, "InvalidConfig", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return 1;
  }
  report_error(err, "UsageError", "no subcommand");
  return 2;
}

}  // namespace ftir::cli
