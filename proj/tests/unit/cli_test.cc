#include "cli.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "multipun/store.h"
#include "multipun/text.h"
#include "pipeline_run.h"

namespace multipun {
namespace {

namespace fs = std::filesystem;
using testing::run_cli;

const std::string kLex = std::string(MULTIPUN_FIXTURE_DIR) + "/lexicon";

TEST(CliTest, HelpAndUsageErrors) {
  std::string out, err;
  EXPECT_EQ(run_cli({"--help"}, &out, &err), cli::kExitOk);
  EXPECT_NE(out.find("mine-homophones"), std::string::npos);
  EXPECT_EQ(run_cli({}, &out, &err), cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}, &out, &err), cli::kExitUsage);
  EXPECT_EQ(run_cli({"mine-homophones", "--bogus"}, &out, &err), cli::kExitUsage);
  EXPECT_EQ(run_cli({"split"}, &out, &err), cli::kExitUsage);
}

TEST(CliTest, MissingInputIsValidationFailure) {
  auto dir = testing::fresh_temp_dir("cli-missing");
  std::string err;
  EXPECT_EQ(run_cli({"split", "--dataset", (dir / "nope.jsonl").string()}, nullptr, &err),
            cli::kExitValidation);
  EXPECT_EQ(err.rfind("error: ", 0), 0u);
  fs::remove_all(dir);
}

TEST(CliTest, LiveModeWithoutConfigFails) {
  auto dir = testing::fresh_temp_dir("cli-live");
  ASSERT_EQ(run_cli({"mine-homographs", "--freq", kLex + "/freq.tsv", "--wordnet", kLex + "/wordnet",
                     "--out", (dir / "t.jsonl").string()}),
            cli::kExitOk);
  std::string err;
  EXPECT_EQ(run_cli({"generate", "--tuples", (dir / "t.jsonl").string(), "--out",
                     (dir / "p.jsonl").string()},
                    nullptr, &err),
            cli::kExitValidation);
  EXPECT_NE(err.find("error"), std::string::npos);
  fs::remove_all(dir);
}

TEST(CliTest, MinesFixtureTuples) {
  auto dir = testing::fresh_temp_dir("cli-mine");
  const auto out = (dir / "hp.jsonl").string();
  ASSERT_EQ(run_cli({"mine-homophones", "--prondict", kLex + "/prondict.txt", "--freq",
                     kLex + "/freq.tsv", "--wordnet", kLex + "/wordnet", "--out", out}),
            cli::kExitOk);
  auto tuples = store::load_tuples(out);
  ASSERT_EQ(tuples.size(), 2u);
  EXPECT_EQ(tuples[0].w_p, "pear");
  EXPECT_EQ(tuples[1].w_p, "sole");
  fs::remove_all(dir);
}

TEST(CliTest, SmallMockPipelineRuns) {
  auto run = testing::run_mock_pipeline(testing::fresh_temp_dir("cli-pipeline"), {});
  ASSERT_EQ(run.status, 0) << run.failed_step << "\n" << run.log;
  for (const char* f : {"dataset.jsonl", "train.jsonl", "test.jsonl", "sft.jsonl", "transcript.jsonl",
                        "metrics.jsonl", "table.txt"}) {
    EXPECT_EQ(run.files.count(f), 1u) << f;
  }
  const auto train = store::load_dataset((run.dir / "train.jsonl").string());
  std::string out, err;
  EXPECT_EQ(run_cli({"export-sft", "--dataset", (run.dir / "test.jsonl").string(), "--out",
                     (run.dir / "bad.jsonl").string()},
                    &out, &err),
            cli::kExitValidation);
  EXPECT_EQ(run_cli({"report", "--transcript", (run.dir / "transcript.jsonl").string(), "--table",
                     (run.dir / "again.txt").string(), "--judge", "--mock", "--seed", "1"},
                    &out, &err),
            cli::kExitOk)
      << err;
  EXPECT_EQ(text::read_file((run.dir / "again.txt").string()), run.files["table.txt"]);
  fs::remove_all(run.dir);
}

TEST(CliTest, WorkerCountDoesNotChangeOutputs) {
  testing::PipelineOptions one;
  one.workers = 1;
  testing::PipelineOptions many;
  many.workers = 8;
  auto a = testing::run_mock_pipeline(testing::fresh_temp_dir("cli-w1"), one);
  auto b = testing::run_mock_pipeline(testing::fresh_temp_dir("cli-w8"), many);
  ASSERT_EQ(a.status, 0) << a.log;
  ASSERT_EQ(b.status, 0) << b.log;
  for (const auto& [name, body] : a.files) {
    EXPECT_EQ(body, b.files[name]) << name;
  }
  fs::remove_all(a.dir);
  fs::remove_all(b.dir);
}

}  // namespace
}  // namespace multipun
