#include "multipun/clients.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "multipun/error.h"
#include "multipun/evalharness.h"
#include "multipun/pipeline.h"
#include "multipun/prompts.h"
#include "multipun/text.h"
#include "pipeline_run.h"

namespace multipun::clients {
namespace {

miner::PunTuple pear_tuple() {
  miner::PunTuple t;
  t.kind = miner::PunKind::kHomophonic;
  t.w_p = "pear";
  t.w_a = "pair";
  t.s_p = {5730, 'n'};
  t.s_a = {7850, 'n'};
  t.gloss_p = "sweet juicy gritty-textured fruit available in many varieties";
  t.gloss_a = "two items of the same kind";
  return t;
}

TEST(MockTextTest, DeterministicPerSeed) {
  MockTextGenerator gen;
  const std::string prompt = pipeline::creative_prompt(pear_tuple());
  auto a = generate_text(gen, {prompt, 5});
  auto b = generate_text(gen, {prompt, 5});
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.provenance, Provenance::kMock);
  EXPECT_FALSE(a.refused);
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(generate_text(gen, {prompt, s}).text);
  EXPECT_GT(seen.size(), 1u);
  EXPECT_THROW(generate_text(gen, {"", 1}), ArgumentError);
}

TEST(MockTextTest, CreativeAnswerParsesAndMentionsPunWord) {
  MockTextGenerator gen;
  auto resp = gen.generate({pipeline::creative_prompt(pear_tuple()), 1});
  auto triple = pipeline::parse_generation(resp.text);
  EXPECT_TRUE(text::mentions_word(triple.caption, "pear"));
  EXPECT_FALSE(triple.interpretation.empty());
  EXPECT_FALSE(triple.image_description.empty());
}

TEST(MockTextTest, OmitModeDropsPunWord) {
  MockTextGenerator gen(/*omit_pun_word=*/true);
  auto triple = pipeline::parse_generation(gen.generate({pipeline::creative_prompt(pear_tuple()), 1}).text);
  EXPECT_FALSE(text::mentions_word(triple.caption, "pear"));
}

TEST(MockTextTest, UnrecognisedPromptGetsHashedCompletion) {
  MockTextGenerator gen;
  auto a = gen.generate({"hello", 1}).text;
  EXPECT_EQ(a.rfind("Mock completion ", 0), 0u);
  EXPECT_NE(a, gen.generate({"hello", 2}).text);
}

TEST(MockImageTest, DistinctAcrossSeedsAndStored) {
  auto dir = testing::fresh_temp_dir("images");
  auto store = std::make_shared<ImageStore>(dir);
  MockImageGenerator gen(store);
  std::set<std::string> hashes;
  for (std::uint64_t s = 0; s < 100; ++s) hashes.insert(gen.render({"a pear", s}).sha256);
  EXPECT_EQ(hashes.size(), 100u);

  auto ref = gen.render({"a pear", 7});
  EXPECT_EQ(ref, gen.render({"a pear", 7}));
  EXPECT_TRUE(store->contains(ref));
  auto bytes = store->get(ref);
  EXPECT_EQ(bytes.size(), ref.bytes);
  EXPECT_EQ(text::sha256_hex(bytes), ref.sha256);
  EXPECT_EQ(bytes.rfind("P6\n16 16\n255\n", 0), 0u);
  EXPECT_EQ(store->path_of(ref).parent_path().filename().string(), ref.sha256.substr(0, 2));
  std::filesystem::remove_all(dir);
}

TEST(ImageStoreTest, MissingImageThrows) {
  ImageStore store(testing::fresh_temp_dir("empty-store"));
  ImageRef ghost{std::string(64, 'a'), 3};
  EXPECT_FALSE(store.contains(ghost));
  EXPECT_THROW(store.get(ghost), LookupError);
}

TEST(MockEmbedderTest, NormalisedAndSimilarityAware) {
  MockEmbedder emb;
  auto rows = emb.embed_rows({"a pear on a table", "a pear on the table", "quantum chromodynamics"});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), MockEmbedder::kDefaultDim);
    double n = 0;
    for (double x : r) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
  auto dot = [](const auto& a, const auto& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  EXPECT_GT(dot(rows[0], rows[1]), dot(rows[0], rows[2]));
  auto m = embed(emb, {"x", "y"});
  EXPECT_EQ(m.ids(), (std::vector<std::string>{"0", "1"}));
  EXPECT_THROW(embed(emb, {}), ArgumentError);
}

TEST(MockSubjectTest, ModesProduceParseableAnswers) {
  using evalharness::TaskSpec;
  for (auto task : {prompts::Task::kDetection, prompts::Task::kLocalization, prompts::Task::kExplanation}) {
    for (auto bias : {prompts::Bias::kToPun, prompts::Bias::kToNonPun}) {
      const TaskSpec spec{task, bias, prompts::Strategy::kVanilla};
      const std::string prompt = evalharness::build_task_prompt(spec, "A pear for two.");
      MockSubject always(MockSubject::Mode::kAlwaysPun), never(MockSubject::Mode::kNeverPun),
          follows(MockSubject::Mode::kFollowsBias), hashed;
      auto ra = evalharness::parse_response(always.answer({prompt, std::nullopt, 1}), task);
      auto rn = evalharness::parse_response(never.answer({prompt, std::nullopt, 1}), task);
      auto rf = evalharness::parse_response(follows.answer({prompt, std::nullopt, 1}), task);
      auto rh = evalharness::parse_response(hashed.answer({prompt, std::nullopt, 1}), task);
      EXPECT_TRUE(ra.parse_ok && rn.parse_ok && rf.parse_ok && rh.parse_ok);
      EXPECT_EQ(ra.verdict, true);
      EXPECT_EQ(rn.verdict, false);
      EXPECT_EQ(rf.verdict, bias == prompts::Bias::kToPun);
      if (task == prompts::Task::kExplanation) {
        EXPECT_TRUE(ra.explanation.has_value());
      }
      if (task != prompts::Task::kDetection) {
        EXPECT_TRUE(ra.pred_wp.has_value());
      }
    }
  }
}

TEST(MockSubjectTest, HashedModeIsDeterministicButVaries) {
  MockSubject s;
  const std::string p = evalharness::build_task_prompt(
      {prompts::Task::kDetection, prompts::Bias::kToPun, prompts::Strategy::kVanilla}, "cap");
  EXPECT_EQ(s.answer({p, std::nullopt, 3}), s.answer({p, std::nullopt, 3}));
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) seen.insert(s.answer({p, std::nullopt, seed}));
  EXPECT_GE(seen.size(), 2u);
}

TEST(JudgeTest, ParseOutput) {
  EXPECT_EQ(parse_judge_output("Reasoning...\nWINNER: A"), JudgeSlot::kA);
  EXPECT_EQ(parse_judge_output("**Winner:** b"), JudgeSlot::kB);
  EXPECT_EQ(parse_judge_output("winner: TIE\nwinner: A"), JudgeSlot::kTie);
  EXPECT_THROW(parse_judge_output("I prefer A"), JudgeFormatError);
  EXPECT_THROW(parse_judge_output("WINNER: both"), JudgeFormatError);
  EXPECT_THROW(parse_judge_output("WINNER: Alpha"), JudgeFormatError);
}

TEST(JudgeTest, VerdictFromSlot) {
  EXPECT_EQ(verdict_for_candidate(JudgeSlot::kA, true), JudgeVerdict::kWin);
  EXPECT_EQ(verdict_for_candidate(JudgeSlot::kA, false), JudgeVerdict::kLoss);
  EXPECT_EQ(verdict_for_candidate(JudgeSlot::kB, false), JudgeVerdict::kWin);
  EXPECT_EQ(verdict_for_candidate(JudgeSlot::kTie, true), JudgeVerdict::kTie);
}

class ScriptedGenerator : public TextGenerator {
 public:
  explicit ScriptedGenerator(std::string reply) : reply_(std::move(reply)) {}
  TextGenResponse generate(const TextGenRequest& req) override {
    last_prompt = req.prompt;
    return {reply_, Provenance::kMock, false};
  }
  std::string name() const override { return "scripted"; }
  std::string last_prompt;

 private:
  std::string reply_;
};

TEST(JudgeTest, LlmJudgeMapsSlotsBackToCandidate) {
  auto gen = std::make_shared<ScriptedGenerator>("WINNER: A");
  LlmJudge judge(gen);
  int first = 0, second = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto v = judge_pair(judge, "cap", "CANDIDATE", "REFERENCE", seed);
    const bool in_a = candidate_goes_first("cap", seed);
    EXPECT_EQ(v, in_a ? JudgeVerdict::kWin : JudgeVerdict::kLoss);
    EXPECT_EQ(gen->last_prompt.find("CANDIDATE") < gen->last_prompt.find("REFERENCE"), in_a);
    (in_a ? first : second)++;
  }
  EXPECT_GT(first, 0);
  EXPECT_GT(second, 0);
  EXPECT_THROW(judge_pair(judge, "cap", " ", "ref", 1), ArgumentError);
}

}  // namespace
}  // namespace multipun::clients
