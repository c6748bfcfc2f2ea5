#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hsigan/cli/commands.hpp"
#include "hsigan/data/binio.hpp"
#include "hsigan/gan/checkpoint.hpp"
#include "json.hpp"
#include "support/tempdir.hpp"

using namespace hsigan;
using namespace hsigan::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::uint8_t> bytes(const fs::path& p) { return data::read_file(p); }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

// A scene and model small enough to train in well under a second.
std::vector<std::string> tiny(const fs::path& out) {
  return {"--out",         out.string(), "--synth.height", "12", "--synth.width", "12",
          "--synth.bands", "8",          "--synth.n-y",    "3",  "--split.m-l",   "12",
          "--model.k",     "3",          "--model.arch",   "2+1", "--model.noise-dim", "8",
          "--model.w",     "5",          "--train.batch",  "6",  "--train.epochs", "2"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct SeedEnv {
  explicit SeedEnv(const char* v) { ::setenv("HSIGAN_SEED", v, 1); }
  ~SeedEnv() { ::unsetenv("HSIGAN_SEED"); }
};

}  // namespace

TEST_CASE("config keys round trip through JSON") {
  RunConfig cfg;
  cfg.train.lr = 0.001;
  cfg.split.labeled_count = 300;
  cfg.arch = "2+1";
  cfg.crf.potts_c = 0.0;
  RunConfig back;
  apply_json(back, to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(to_json(RunConfig{}).size() == config_keys().size());

  apply_json(back, nlohmann::json::parse(R"({"split.m_l": 42})"));
  CHECK(back.split.labeled_count == 42);
  CHECK_THROWS_AS(apply_json(back, nlohmann::json::parse(R"({"train.speed": 1})")),
                  ValidationError);
  CHECK_THROWS_AS(apply_json(back, nlohmann::json::parse(R"({"train.epochs": -1})")),
                  ValidationError);
  CHECK_THROWS_AS(apply_json(back, nlohmann::json::parse(R"({"train.lr": "fast"})")),
                  ValidationError);
  CHECK_THROWS_AS(apply_value(back, "train.batch", "12x"), ValidationError);
  apply_value(back, "train.use-unlabeled", "false");
  CHECK_FALSE(back.train.use_unlabeled);
}

TEST_CASE("precedence: defaults < file < HSIGAN_SEED < flags") {
  testing::TempDir tmp;
  {
    std::ofstream f(tmp / "cfg.json");
    f << R"({"split.seed": 11, "train.epochs": 0, "synth.height": 10, "synth.width": 10,
             "split.m-l": 8, "model.k": 2, "model.w": 3, "model.noise-dim": 4, "train.batch": 4})";
  }
  auto config_of = [&](const fs::path& out) { return read_json(out / "config.json"); };
  const std::vector<std::string> base = {"train", "--config", (tmp / "cfg.json").string()};

  REQUIRE(run(concat(base, {"--out", (tmp / "a").string()})).code == 0);
  CHECK(config_of(tmp / "a")["split.seed"] == 11);
  CHECK(config_of(tmp / "a")["train.lr"] == 0.0007);

  {
    SeedEnv env("23");
    REQUIRE(run(concat(base, {"--out", (tmp / "b").string()})).code == 0);
    CHECK(config_of(tmp / "b")["split.seed"] == 23);
    REQUIRE(run(concat(base, {"--out", (tmp / "c").string(), "--split.seed", "5"})).code == 0);
    CHECK(config_of(tmp / "c")["split.seed"] == 5);
  }
  // The written config reproduces the run when fed back.
  REQUIRE(run({"train", "--config", (tmp / "c" / "config.json").string(), "--out",
               (tmp / "d").string()})
              .code == 0);
  CHECK(bytes(tmp / "d" / "model.ganc") == bytes(tmp / "c" / "model.ganc"));
}

TEST_CASE("synth") {
  testing::TempDir tmp;
  REQUIRE(run({"synth", "--out", (tmp / "a").string()}).code == 0);
  REQUIRE(run({"synth", "--out", (tmp / "b").string()}).code == 0);
  CHECK(bytes(tmp / "a" / "scene.hsc") == bytes(tmp / "b" / "scene.hsc"));
  const auto scene = data::load_hsc(tmp / "a" / "scene.hsc");
  CHECK(scene.cube.height == 32);
  CHECK(scene.cube.width == 32);
  CHECK(scene.cube.bands == 16);
  CHECK(scene.labels.has_value());

  const Run bad = run({"synth", "--out", (tmp / "c").string(), "--synth.n-y", "1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("classes") != std::string::npos);

  { std::ofstream(tmp / "blocker") << "x"; }
  CHECK(run({"synth", "--out", (tmp / "blocker" / "sub").string()}).code == 1);
}

TEST_CASE("train is deterministic and writes every product") {
  testing::TempDir tmp;
  const Run a = run(concat({"train"}, tiny(tmp / "a")));
  REQUIRE(a.code == 0);
  REQUIRE(run(concat({"train"}, tiny(tmp / "b"))).code == 0);
  for (const char* f : {"config.json", "model.ganc", "loss.csv", "field.sfp", "pre_crf.hsc",
                        "pre_crf.ppm", "test_truth.hsc", "metrics.json", "scene.hsc"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(tmp / "a" / f));
  }
  CHECK(bytes(tmp / "a" / "metrics.json") == bytes(tmp / "b" / "metrics.json"));
  CHECK(bytes(tmp / "a" / "model.ganc") == bytes(tmp / "b" / "model.ganc"));
  CHECK(bytes(tmp / "a" / "loss.csv") == bytes(tmp / "b" / "loss.csv"));

  const auto model = gan::load_checkpoint(tmp / "a" / "model.ganc");
  CHECK(model.config().arch == gan::Architecture{2, 1});
  CHECK(gan::read_loss_csv(tmp / "a" / "loss.csv").size() == 2 * (12 / 6));
  CHECK(read_json(tmp / "a" / "metrics.json")["evaluated"] == 144 - 12);

  SUBCASE("checkpoints") {
    REQUIRE(run(concat(concat({"train"}, tiny(tmp / "c")), {"--train.checkpoint-every", "1"}))
                .code == 0);
    CHECK(fs::exists(tmp / "c" / "checkpoints" / "epoch-00001.ganc"));
    CHECK(fs::exists(tmp / "c" / "checkpoints" / "epoch-00002.ganc"));
  }
  SUBCASE("bad settings exit with 2") {
    CHECK(run(concat(concat({"train"}, tiny(tmp / "d")), {"--model.arch", "three"})).code == 2);
    CHECK(run(concat(concat({"train"}, tiny(tmp / "d")), {"--split.m-l", "4"})).code == 2);
    CHECK(run(concat(concat({"train"}, tiny(tmp / "d")), {"--data.path", "/nonexistent.hsc"}))
              .code == 1);
  }
}

TEST_CASE("crf, eval and render") {
  testing::TempDir tmp;
  const fs::path t = tmp / "t";
  REQUIRE(run(concat({"train"}, tiny(t))).code == 0);
  const std::vector<std::string> inputs = {"--field", (t / "field.sfp").string(), "--cube",
                                           (t / "scene.hsc").string(), "--truth",
                                           (t / "test_truth.hsc").string()};

  SUBCASE("c = 0 reproduces the pre-CRF metrics") {
    const Run r = run(concat({"crf", "--out", (tmp / "c0").string(), "--crf.c", "0"}, inputs));
    REQUIRE(r.code == 0);
    CHECK(bytes(tmp / "c0" / "metrics.json") == bytes(t / "metrics.json"));
    CHECK(bytes(tmp / "c0" / "unary_metrics.json") == bytes(t / "metrics.json"));
    CHECK(bytes(tmp / "c0" / "crf.hsc") == bytes(t / "pre_crf.hsc"));
  }
  SUBCASE("iteration log has one row per iteration") {
    const Run r =
        run(concat({"crf", "--out", (tmp / "c").string(), "--crf.iterations", "4"}, inputs));
    REQUIRE(r.code == 0);
    std::ifstream log(tmp / "c" / "crf_log.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(log, line);
    CHECK(line == "iteration,max_change,normalization_error");
    while (std::getline(log, line)) ++rows;
    CHECK(rows == 4);
    CHECK(fs::exists(tmp / "c" / "crf.ppm"));
  }
  SUBCASE("mismatched field and cube") {
    REQUIRE(run({"synth", "--out", (tmp / "other").string()}).code == 0);
    const Run r = run({"crf", "--out", (tmp / "m").string(), "--field",
                       (t / "field.sfp").string(), "--cube",
                       (tmp / "other" / "scene.hsc").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("12x12") != std::string::npos);
  }
  SUBCASE("eval") {
    const Run same = run({"eval", "--truth", (t / "scene.hsc").string(), "--pred",
                          (t / "scene.hsc").string(), "--json", (tmp / "m.json").string()});
    REQUIRE(same.code == 0);
    CHECK(nlohmann::json::parse(same.out)["oa"] == 1.0);
    CHECK(read_json(tmp / "m.json")["kappa"] == 1.0);

    const Run pre = run({"eval", "--truth", (t / "test_truth.hsc").string(), "--pred",
                         (t / "pre_crf.hsc").string()});
    REQUIRE(pre.code == 0);
    const auto stored = bytes(t / "metrics.json");
    CHECK(pre.out == std::string(stored.begin(), stored.end()));

    REQUIRE(run({"synth", "--out", (tmp / "big").string()}).code == 0);
    const Run bad = run({"eval", "--truth", (tmp / "big" / "scene.hsc").string(), "--pred",
                         (t / "pre_crf.hsc").string()});
    CHECK(bad.code == 2);
    CHECK_FALSE(bad.err.empty());
  }
  SUBCASE("render matches the golden image") {
    const fs::path golden_dir = HSIGAN_TEST_DATA_DIR;
    REQUIRE(run({"render", "--pred", (golden_dir / "checkerboard.hsc").string(), "--ppm",
                 (tmp / "r.ppm").string()})
                .code == 0);
    CHECK(bytes(tmp / "r.ppm") == bytes(golden_dir / "checkerboard_truth.ppm"));
  }
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"fly"}).code == 2);
  CHECK(run({"train", "--train.nope", "1"}).code == 2);
  CHECK(run({"crf"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"train", "--train.epochs", "many"}).code == 2);
}
