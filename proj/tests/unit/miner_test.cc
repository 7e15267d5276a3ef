#include "multipun/miner.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "multipun/error.h"
#include "multipun/text.h"
#include "synthetic_lexicon.h"

namespace multipun::miner {
namespace {

using lexres::SynsetId;

class FixtureMinerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const std::string dir = std::string(MULTIPUN_FIXTURE_DIR) + "/lexicon";
    prondict_ = new lexres::PronDict(lexres::parse_pron_dict(text::read_file(dir + "/prondict.txt")));
    freq_ = new lexres::FrequencyTable(lexres::parse_frequency_table(text::read_file(dir + "/freq.tsv")));
    db_ = new lexres::WordNetDb(lexres::WordNetDb::load_dir(dir + "/wordnet"));
  }
  static void TearDownTestSuite() {
    delete prondict_;
    delete freq_;
    delete db_;
  }

  static std::set<std::pair<std::string, std::string>> pairs(const std::vector<PunTuple>& ts) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& t : ts) out.emplace(t.w_p, t.w_a);
    return out;
  }

  static lexres::PronDict* prondict_;
  static lexres::FrequencyTable* freq_;
  static lexres::WordNetDb* db_;
};

lexres::PronDict* FixtureMinerTest::prondict_ = nullptr;
lexres::FrequencyTable* FixtureMinerTest::freq_ = nullptr;
lexres::WordNetDb* FixtureMinerTest::db_ = nullptr;

TEST_F(FixtureMinerTest, HomophonesMatchExpectedSet) {
  auto hp = mine_homophones(*prondict_, *freq_, *db_);
  std::set<std::pair<std::string, std::string>> want{{"pear", "pair"}, {"sole", "soul"}};
  EXPECT_EQ(pairs(hp), want);
  for (const auto& t : hp) {
    EXPECT_EQ(t.kind, PunKind::kHomophonic);
    EXPECT_EQ(tuple_violation(t, prondict_, *db_), "");
  }
}

TEST_F(FixtureMinerTest, HomographsMatchExpectedSet) {
  auto hg = mine_homographs(*freq_, *db_);
  std::set<std::pair<std::string, std::string>> want{{"fan", "fan"}, {"mouse", "mouse"}};
  EXPECT_EQ(pairs(hg), want);
  EXPECT_EQ(hg.size(), 3u);  // mouse in both orientations
  for (const auto& t : hg) EXPECT_EQ(tuple_violation(t, nullptr, *db_), "");
}

TEST_F(FixtureMinerTest, HomographVerdictReasons) {
  auto apple = db_->senses("apple");
  EXPECT_EQ(check_homograph_senses(*db_, "apple", apple[0], apple[1]), HomographVerdict::kSameLexname);
  auto crab = db_->senses("crab");
  ASSERT_EQ(crab.size(), 2u);
  EXPECT_EQ(check_homograph_senses(*db_, "crab", crab[0], crab[1]),
            HomographVerdict::kNaturalCategory);
  auto baseball = db_->senses("baseball");
  EXPECT_EQ(check_homograph_senses(*db_, "baseball", baseball[1], baseball[0]),
            HomographVerdict::kCircularGloss);
  EXPECT_EQ(check_homograph_senses(*db_, "baseball", baseball[0], baseball[1]),
            HomographVerdict::kLiteralNotVisual);
  auto fan = db_->senses("fan");
  EXPECT_EQ(check_homograph_senses(*db_, "fan", fan[0], fan[1]), HomographVerdict::kAccepted);
}

TEST_F(FixtureMinerTest, RaisingThresholdOnlyRemoves) {
  auto base = pairs(mine_homophones(*prondict_, *freq_, *db_));
  for (double z : {3.5, 4.0, 4.5, 6.0}) {
    MinerConfig cfg;
    cfg.zipf_min_homophonic = z;
    auto tighter = pairs(mine_homophones(*prondict_, *freq_, *db_, cfg));
    EXPECT_TRUE(std::includes(base.begin(), base.end(), tighter.begin(), tighter.end()));
  }
  MinerConfig none;
  none.zipf_min_homophonic = 9.0;
  EXPECT_TRUE(mine_homophones(*prondict_, *freq_, *db_, none).empty());
}

TEST_F(FixtureMinerTest, TupleViolationDetectsTampering) {
  auto hp = mine_homophones(*prondict_, *freq_, *db_);
  ASSERT_FALSE(hp.empty());
  PunTuple bad = hp.front();
  bad.w_a = "fan";
  EXPECT_NE(tuple_violation(bad, prondict_, *db_), "");
}

TEST(MinerConfigTest, Validates) {
  MinerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.top_k_senses = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.path_sim_max = 2.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(GlossDisjointTest, Examples) {
  lexres::Synset s;
  s.gloss = "a ball used in playing baseball; \"he caught the baseball\"";
  EXPECT_FALSE(gloss_disjoint("baseball", s));
  s.gloss = "a game played with a bat and ball";
  EXPECT_FALSE(gloss_disjoint("baseball", s));  // "ball" is inside the word
  s.gloss = "a game played with a bat";
  EXPECT_TRUE(gloss_disjoint("baseball", s));
  s.gloss = "flesh of fish used as food";
  EXPECT_FALSE(gloss_disjoint("fish", s));
  s.gloss = "a base of operations";
  EXPECT_FALSE(gloss_disjoint("baseball", s, 4));
  EXPECT_TRUE(gloss_disjoint("baseball", s, 5));
  s.gloss = "one \"fish\" example only; \"fish\"";
  EXPECT_TRUE(gloss_disjoint("cod", s));
}

TEST(PunKindTest, RoundTrip) {
  EXPECT_EQ(parse_pun_kind(to_string(PunKind::kHomophonic)), PunKind::kHomophonic);
  EXPECT_EQ(parse_pun_kind(to_string(PunKind::kHomographic)), PunKind::kHomographic);
  EXPECT_THROW(parse_pun_kind("visual"), ArgumentError);
}

// Brute-force check on a synthetic lexicon: every homophone pair of frequent
// words is mined exactly when the pun word has a visual sense.
TEST(SyntheticMinerTest, HomophonesAgreeWithPairwiseOracle) {
  auto lex = testing::make_synthetic_lexicon(12, 5);
  auto prondict = lexres::parse_pron_dict(lex.prondict);
  auto freq = lexres::parse_frequency_table(lex.freq);
  auto db = lexres::WordNetDb::parse(lex.index_noun, lex.data_noun);
  MinerConfig cfg;
  auto mined = mine_homophones(prondict, freq, db, cfg);

  std::set<std::pair<std::string, std::string>> oracle;
  for (const auto& [a, pa] : prondict.entries()) {
    for (const auto& [b, pb] : prondict.entries()) {
      if (a == b || !lexres::are_homophones(prondict, a, b)) continue;
      if (lexres::zipf(freq, a).value_or(0) <= cfg.zipf_min_homophonic) continue;
      if (lexres::zipf(freq, b).value_or(0) <= cfg.zipf_min_homophonic) continue;
      auto sp = top_senses(db, a, cfg.top_k_senses);
      auto sa = top_senses(db, b, cfg.top_k_senses);
      if (sa.empty()) continue;
      bool visual = std::any_of(sp.begin(), sp.end(), [&](SynsetId id) {
        return cfg.visual_lexnames.count(db.synset(id).lexname) > 0;
      });
      if (visual) oracle.emplace(a, b);
    }
  }
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& t : mined) got.emplace(t.w_p, t.w_a);
  EXPECT_EQ(got, oracle);
  EXPECT_EQ(got.size(), 12u);
  EXPECT_TRUE(std::is_sorted(mined.begin(), mined.end(), tuple_less));
}

TEST(SyntheticMinerTest, OneHomographPerWord) {
  auto lex = testing::make_synthetic_lexicon(3, 40);
  auto freq = lexres::parse_frequency_table(lex.freq);
  auto db = lexres::WordNetDb::parse(lex.index_noun, lex.data_noun);
  EXPECT_EQ(mine_homographs(freq, db).size(), 40u);
}

}  // namespace
}  // namespace multipun::miner
