#include <doctest.h>

#include <sstream>

#include "ftir/cli.hpp"
#include "ftir/json_io.hpp"
#include "ftir/synthgen.hpp"
#include "support.hpp"

using namespace ftir;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Every regular file under dir with its bytes, keyed by relative path.
std::map<std::string, std::vector<char>> snapshot(const fs::path& dir, bool skip_manifests = false) {
  std::map<std::string, std::vector<char>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (skip_manifests && e.path().filename() == "manifest.json") continue;
    files[fs::relative(e.path(), dir).string()] = testing::file_bytes(e.path());
  }
  return files;
}

// Two small samples so that the full command chain runs in seconds.
fs::path write_small_config(const fs::path& dir) {
  auto ds = synth::benchmark_dataset(11);
  ds.samples.resize(2);
  for (auto& c : ds.samples) {
    c.height = 10;
    c.width = 10;
    c.layout = {2, 2.0, 2.5};
  }
  const fs::path file = dir / "synth.json";
  write_json({{"dataset", synth::to_json(ds)}}, file);
  return file;
}

}  // namespace

TEST_CASE("help and usage errors") {
  const auto help = run({"bench", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--data") != std::string::npos);
  CHECK(run({"--help"}).code == 0);

  const auto unknown = run({"synth", "--out", "x", "--bogus"});
  CHECK(unknown.code == 2);
  const Json e = Json::parse(unknown.err.substr(0, unknown.err.find('\n')));
  CHECK(e.at("error") == "UsageError");

  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"prep", "--in", "x", "--out", "y", "--trim", "2401"}).code == 2);
  CHECK(run({"prep", "--in", "x", "--out", "y", "--ch", "3000:2800"}).code == 2);
  CHECK(run({"optimize-sg", "--data", "x", "--out", "y", "--windows", "9:5"}).code == 2);
  CHECK(run({"train", "--data", "x", "--out", "y", "--method", "triple"}).code == 2);
}

TEST_CASE("domain errors exit 1 with a machine-readable message") {
  testing::TempDir dir("cli_err");
  const auto r = run({"prep", "--in", (dir / "missing").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 1);
  const Json e = Json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(e.at("error") == "IoError");
  CHECK(e.contains("message"));
}

TEST_CASE("dump-config prints the resolved configuration") {
  const auto r = run({"bench", "--data", "x", "--out", "y", "--dump-config", "--epochs", "7", "--seed", "3"});
  REQUIRE(r.code == 0);
  const Json cfg = Json::parse(r.out);
  CHECK(cfg.at("seed") == 3);
  CHECK(cfg.at("single").at("train").at("max_epochs") == 7);
  CHECK(cfg.at("cascade").at("stage2").at("train").at("max_epochs") == 7);
  CHECK(cfg.contains("snip"));
  const auto p = run({"prep", "--in", "x", "--out", "y", "--dump-config", "--trim", "2250:2401,1000:1010"});
  REQUIRE(p.code == 0);
  CHECK(Json::parse(p.out).at("trim").at("drop_ranges").size() == 2);
}

TEST_CASE("seeded command chain") {
  testing::TempDir dir("cli_chain");
  const fs::path data = dir / "data";
  const auto cfg = write_small_config(dir.path());

  REQUIRE(run({"synth", "--config", cfg.string(), "--out", data.string()}).code == 0);
  CHECK(fs::exists(data / "manifest.json"));
  CHECK(fs::exists(data / "dataset.json"));
  CHECK(fs::exists(data / "sample1" / "scan_1"));
  CHECK(fs::exists(data / "sample2" / "scan_32"));
  const auto before = snapshot(data);

  SUBCASE("manifest replay reproduces the dataset") {
    const fs::path replay = dir / "replay";
    REQUIRE(run({"synth", "--config", (data / "manifest.json").string(), "--out", replay.string()}).code == 0);
    CHECK(snapshot(data, true) == snapshot(replay, true));
  }

  SUBCASE("prep") {
    const fs::path out = dir / "prep";
    const auto r = run({"prep", "--in", (data / "sample1" / "scan_1").string(), "--mask-from",
                        (data / "sample1" / "scan_32").string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    for (const char* name : {"cube", "mask.json", "background.csv", "manifest.json"}) CHECK(fs::exists(out / name));
    const Json m = read_json(out / "manifest.json");
    CHECK(m.at("command") == "prep");
    CHECK(m.contains("tool_version"));
    CHECK(m.contains("wall_clock_seconds"));
    CHECK(m.at("config").contains("fingerprint"));
  }

  SUBCASE("optimize-sg, train, restore, bench, report") {
    const fs::path sg = dir / "sg";
    REQUIRE(run({"optimize-sg", "--data", data.string(), "--windows", "5:13:4", "--orders", "2,3", "--out",
                 sg.string()})
                .code == 0);
    const Json best = read_json(sg / "sg.json");
    CHECK(best.at("grid_dump").size() == 6);

    const fs::path model = dir / "model";
    const std::vector<std::string> small{"--epochs", "2", "--base-channels", "2", "--depth", "2"};
    auto train_args = std::vector<std::string>{"train", "--method", "cascade", "--data", data.string(), "--samples",
                                               "sample1", "--out", model.string()};
    train_args.insert(train_args.end(), small.begin(), small.end());
    REQUIRE(run(train_args).code == 0);
    for (const char* name : {"stage1", "stage2", "snip.json", "norm.json", "stage2_norm.json", "history.json"})
      CHECK(fs::exists(model / name));

    const fs::path restored = dir / "restored";
    const auto in = (data / "sample2" / "scan_1").string();
    REQUIRE(run({"restore", "--method", "cascade", "--model", model.string(), "--in", in, "--out", restored.string()})
                .code == 0);
    const auto cube = load_cube(restored);
    CHECK(cube.height() == 10);
    CHECK(cube.mask().has_value());
    const fs::path trad = dir / "trad";
    CHECK(run({"restore", "--method", "traditional", "--model", sg.string(), "--in", in, "--out", trad.string()})
              .code == 0);

    std::vector<std::string> bench_args{"bench", "--data", data.string(), "--epochs", "1", "--base-channels", "2"};
    auto a = bench_args, b = bench_args;
    a.insert(a.end(), {"--out", (dir / "bench_a").string()});
    b.insert(b.end(), {"--out", (dir / "bench_b").string()});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(testing::file_bytes(dir / "bench_a" / "report.json") == testing::file_bytes(dir / "bench_b" / "report.json"));

    const fs::path tables = dir / "tables";
    REQUIRE(run({"report", "--in", (dir / "bench_a").string(), "--out", tables.string()}).code == 0);
    CHECK(testing::file_bytes(tables / "table1.md") == testing::file_bytes(dir / "bench_a" / "table1.md"));
  }

  CHECK(snapshot(data) == before);
}
