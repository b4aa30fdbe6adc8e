#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixgraph/dataset.hpp"
#include "fixgraph/synth.hpp"

namespace fixgraph {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fixgraph-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  std::string Write(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name), std::ios::binary) << text;
    return Path(name);
  }
  std::string SynthDataset(std::size_t n, std::uint64_t seed) const {
    save_dataset(Path("data.jsonl"), synthesize(n, FixSignal::Mixed, seed));
    return Path("data.jsonl");
  }
  static std::vector<std::string> SmallTrainFlags() {
    return {"--epochs", "3", "--dim", "8", "--hidden", "8", "--mlp-hidden", "8",
            "--embed-epochs", "1", "--min-count", "1", "--batch-size", "8"};
  }
  CliRun Train(const std::string& data, const std::string& out_dir,
            std::vector<std::string> extra = {}) const {
    std::vector<std::string> args{"--quiet", "train", data, "--out-dir", out_dir};
    for (const auto& a : SmallTrainFlags()) args.push_back(a);
    for (const auto& a : extra) args.push_back(a);
    return Cli(args);
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpExitsZero) {
  const CliRun r = Cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("diff"), std::string::npos);
  EXPECT_EQ(Cli({"train", "--help"}).code, 0);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"diff", "only-one.c"}).code, 2);
}

TEST_F(CliTest, DiffIdenticalFiles) {
  const auto a = Write("a.c", "int f(int x) { return x + 1; }\n");
  const CliRun r = Cli({"diff", a, a});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("added=0 deleted=0"), std::string::npos);
  EXPECT_FALSE(r.out.empty());
  EXPECT_TRUE(Cli({"--quiet", "diff", a, a}).err.empty());
}

TEST_F(CliTest, DiffDotShowsInsertedMultiply) {
  const auto a = Write("a.c", "for (i = 0; i < BUF_SIZE; i++) process(buf[i]);\n");
  const auto b = Write("b.c", "for (i = 0; i < 2 * BUF_SIZE; i++) process(buf[i]);\n");
  const CliRun r = Cli({"diff", a, b, "--format", "dot"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("digraph alpha_ast {"), std::string::npos);
  EXPECT_NE(r.out.find("MultiplyExpr"), std::string::npos);
  EXPECT_NE(r.err.find("added=2 deleted=0"), std::string::npos);
}

TEST_F(CliTest, MissingFileExitsTwoWithoutOutput) {
  const CliRun r = Cli({"diff", Path("nope.c"), Path("nope.c")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, SyntaxErrorExitsTwo) {
  const auto bad = Write("bad.c", "int f( { return; }\n");
  EXPECT_EQ(Cli({"parse", bad}).code, 2);
}

TEST_F(CliTest, ParseWritesAstJson) {
  const auto a = Write("a.c", "int f(){return 0;}\n");
  const CliRun r = Cli({"parse", a, "--indent", "-1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ReturnStmt"), std::string::npos);
  const auto json = Write("a.json", r.out);
  EXPECT_EQ(Cli({"parse", json, "--indent", "-1"}).out, r.out);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const CliRun a = Cli({"--seed", "5", "synth", "--n", "12"});
  const CliRun b = Cli({"--seed", "5", "synth", "--n", "12"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, Cli({"--seed", "6", "synth", "--n", "12"}).out);
}

TEST_F(CliTest, TrainPredictEvaluate) {
  const auto data = SynthDataset(40, 3);
  const auto out = Path("run");
  ASSERT_EQ(Train(data, out).code, 0);
  for (const char* f : {"model.ckpt", "embeddings.bin", "history.csv", "train.jsonl", "test.jsonl"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  }
  const CliRun p = Cli({"predict", (fs::path(out) / "test.jsonl").string(), "--checkpoint",
                     (fs::path(out) / "model.ckpt").string(), "--embeddings",
                     (fs::path(out) / "embeddings.bin").string(), "--out", Path("scores.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(Slurp(Path("scores.csv")).rfind("id,score,label,changed_loc\n", 0), 0u);
  const CliRun e = Cli({"evaluate", Path("scores.csv"), "--format", "json", "--effort", "5,20"});
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("\"f1\""), std::string::npos);
}

TEST_F(CliTest, TrainingIsByteDeterministic) {
  const auto data = SynthDataset(30, 4);
  ASSERT_EQ(Train(data, Path("a")).code, 0);
  ASSERT_EQ(Train(data, Path("b")).code, 0);
  for (const char* f : {"model.ckpt", "embeddings.bin", "history.csv", "test.jsonl"}) {
    EXPECT_EQ(Slurp(fs::path(Path("a")) / f), Slurp(fs::path(Path("b")) / f)) << f;
  }
}

TEST_F(CliTest, SingleClassTrainExitsThree) {
  Dataset ds = synthesize(20, FixSignal::Mixed, 5);
  for (auto& s : ds.samples) s.label = 0;
  save_dataset(Path("neg.jsonl"), ds);
  const CliRun r = Train(Path("neg.jsonl"), Path("out"));
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MismatchedEmbeddingsExitFour) {
  const auto data = SynthDataset(30, 6);
  ASSERT_EQ(Train(data, Path("run")).code, 0);
  ASSERT_EQ(Cli({"--quiet", "train-embed", data, "--dim", "4", "--min-count", "1", "--epochs", "1",
                 "--out", Path("narrow.bin")})
                .code,
            0);
  const CliRun r = Cli({"predict", data, "--checkpoint", (fs::path(Path("run")) / "model.ckpt").string(),
                     "--embeddings", Path("narrow.bin")});
  EXPECT_EQ(r.code, 4);
  const auto junk = Write("junk.ckpt", "not a checkpoint\n");
  EXPECT_EQ(Cli({"predict", data, "--checkpoint", junk, "--embeddings", Path("narrow.bin")}).code, 4);
}

TEST_F(CliTest, SingleClassEvaluateExitsThree) {
  const auto scores = Write("s.csv", "id,score,label,changed_loc\na,0.2,0,3\nb,0.9,0,5\n");
  const CliRun r = Cli({"evaluate", scores});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.out.empty());
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  const auto data = SynthDataset(30, 7);
  const auto cfg = Write("cfg.json", R"({"epochs": 4, "lr": 0.01})");
  ASSERT_EQ(Train(data, Path("a"), {"--config", cfg}).code, 0);
  // The explicit --epochs 3 wins over the config's 4.
  const std::string history = Slurp(fs::path(Path("a")) / "history.csv");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 4);

  const auto bad = Write("bad.json", R"({"epoch": 4})");
  EXPECT_EQ(Train(data, Path("b"), {"--config", bad}).code, 2);
  const auto epochs_only = Write("e.json", R"({"epochs": 2})");
  std::vector<std::string> args{"--quiet", "train", data, "--out-dir", Path("c"), "--config", epochs_only,
                                "--dim", "8", "--hidden", "8", "--mlp-hidden", "8",
                                "--embed-epochs", "1", "--min-count", "1"};
  ASSERT_EQ(Cli(args).code, 0);
  const std::string h2 = Slurp(fs::path(Path("c")) / "history.csv");
  EXPECT_EQ(std::count(h2.begin(), h2.end(), '\n'), 3);
}

}  // namespace
}  // namespace fixgraph
