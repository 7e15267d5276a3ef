#include "multipun/pipeline.h"

#include <gtest/gtest.h>

#include <set>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::pipeline {
namespace {

PunTuple pear_tuple() {
  PunTuple t;
  t.kind = PunKind::kHomophonic;
  t.w_p = "pear";
  t.w_a = "pair";
  t.s_p = {5730, 'n'};
  t.s_a = {7850, 'n'};
  t.gloss_p = "sweet juicy gritty-textured fruit available in many varieties";
  t.gloss_a = "two items of the same kind";
  return t;
}

PunTuple fan_tuple() {
  PunTuple t;
  t.kind = PunKind::kHomographic;
  t.w_p = "fan";
  t.w_a = "fan";
  t.s_p = {1744, 'n'};
  t.s_a = {2092, 'n'};
  t.gloss_p = "a device for creating a current of air by movement of a surface or surfaces";
  t.gloss_a = "an ardent follower and admirer";
  return t;
}

TEST(ParseGenerationTest, ReadsLabelledFields) {
  auto g = parse_generation(
      "Here you go:\n\n**Image Description:** A pear\nsits on a plate.\n\n"
      "- Caption: We make a great pear.\n* **interpretation**: pear sounds like pair.\n");
  EXPECT_EQ(g.image_description, "A pear sits on a plate.");
  EXPECT_EQ(g.caption, "We make a great pear.");
  EXPECT_EQ(g.interpretation, "pear sounds like pair.");
}

TEST(ParseGenerationTest, MissingFieldCarriesRawText) {
  const std::string raw = "Image Description: x\nCaption: y\n";
  try {
    parse_generation(raw);
    FAIL() << "expected GenerationFormatError";
  } catch (const GenerationFormatError& e) {
    EXPECT_EQ(e.raw(), raw);
  }
}

TEST(SampleTest, IdIsContentAddressed) {
  auto a = sample_id(SampleKind::kPunHomophonic, pear_tuple(), "cap");
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a, sample_id(SampleKind::kPunHomophonic, pear_tuple(), "cap"));
  EXPECT_NE(a, sample_id(SampleKind::kPunHomophonic, pear_tuple(), "cap!"));
  EXPECT_NE(a, sample_id(SampleKind::kNonPunEs, pear_tuple(), "cap"));
}

TEST(SampleKindTest, RoundTrip) {
  for (auto k : {SampleKind::kPunHomophonic, SampleKind::kPunHomographic, SampleKind::kNonPunEs,
                 SampleKind::kNonPunRs}) {
    EXPECT_EQ(parse_sample_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_sample_kind("meme"), ArgumentError);
  EXPECT_EQ(positive_kind(PunKind::kHomographic), SampleKind::kPunHomographic);
}

class BuildTest : public ::testing::Test {
 protected:
  clients::MockTextGenerator text_;
  clients::MockImageGenerator image_;
};

TEST_F(BuildTest, PositiveSatisfiesInvariants) {
  for (const auto& t : {pear_tuple(), fan_tuple()}) {
    auto s = build_positive(t, text_, image_, 3);
    EXPECT_EQ(sample_violation(s), "");
    EXPECT_TRUE(s.is_pun());
    EXPECT_EQ(s.pun_type(), t.kind);
    EXPECT_TRUE(s.image.has_value());
    EXPECT_EQ(s.provenance.seed, 3u);
    EXPECT_EQ(s, build_positive(t, text_, image_, 3));
  }
}

TEST_F(BuildTest, PositiveWithoutPunWordIsRejected) {
  clients::MockTextGenerator omitting(true);
  EXPECT_THROW(build_positive(pear_tuple(), omitting, image_, 1), ValidityError);
}

TEST_F(BuildTest, NegativesDropThePunWord) {
  for (const auto& t : {pear_tuple(), fan_tuple()}) {
    auto pos = build_positive(t, text_, image_, 5);
    auto es = build_es_negative(pos, text_, 6);
    EXPECT_EQ(sample_violation(es), "");
    EXPECT_EQ(es.kind, SampleKind::kNonPunEs);
    EXPECT_FALSE(text::mentions_word(es.caption, t.w_p));
    EXPECT_EQ(es.substitution->source_id, pos.id);
    EXPECT_EQ(es.image, pos.image);

    auto rs = build_rs_negative(pos, text_, image_, SubstitutePool::bundled(), 7);
    EXPECT_EQ(sample_violation(rs), "");
    EXPECT_EQ(rs.kind, SampleKind::kNonPunRs);
    EXPECT_TRUE(text::mentions_word(rs.caption, rs.substitution->replacement));
    EXPECT_NE(rs.image, pos.image);
    EXPECT_EQ(rs.pun_type(), t.kind);
  }
}

TEST_F(BuildTest, NegativesRequirePositiveInput) {
  auto pos = build_positive(pear_tuple(), text_, image_, 5);
  auto es = build_es_negative(pos, text_, 6);
  EXPECT_THROW(build_es_negative(es, text_, 1), ArgumentError);
}

TEST(SubstitutePoolTest, ParseAndDraw) {
  auto pool = SubstitutePool::parse("# version: 3\nPear\nlamp\nlamp\n\n# c\nkettle\n");
  EXPECT_EQ(pool.version(), 3);
  EXPECT_EQ(pool.nouns(), (std::vector<std::string>{"pear", "lamp", "kettle"}));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_NE(pool.draw(seed, {"pear", "pair"}), "pear");
    EXPECT_EQ(pool.draw(seed, {}), pool.draw(seed, {}));
  }
  EXPECT_THROW(SubstitutePool::parse("pear\n").draw(1, {"pears"}), ConfigError);
  EXPECT_GT(SubstitutePool::bundled().nouns().size(), 50u);
}

TEST(BatchTest, ResultsIndependentOfWorkerCount) {
  clients::MockTextGenerator text;
  clients::MockImageGenerator image;
  std::vector<PunTuple> tuples{pear_tuple(), fan_tuple()};
  for (int i = 0; i < 6; ++i) {
    PunTuple t = fan_tuple();
    t.s_a.offset += static_cast<std::uint32_t>(i + 1);
    t.gloss_a += " number " + std::to_string(i);
    tuples.push_back(t);
  }
  auto one = build_positives(tuples, text, image, 42, 1);
  auto many = build_positives(tuples, text, image, 42, 8);
  EXPECT_EQ(one.samples, many.samples);
  EXPECT_EQ(one.samples.size(), tuples.size());
  EXPECT_TRUE(one.failures.empty());

  auto neg1 = build_negatives(one.samples, text, image, SubstitutePool::bundled(), 42, 1);
  auto neg8 = build_negatives(one.samples, text, image, SubstitutePool::bundled(), 42, 8);
  EXPECT_EQ(neg1.samples, neg8.samples);
  ASSERT_EQ(neg1.samples.size(), 3 * tuples.size());
  for (std::size_t i = 0; i < neg1.samples.size(); i += 3) {
    EXPECT_TRUE(neg1.samples[i].is_pun());
    EXPECT_EQ(neg1.samples[i + 1].kind, SampleKind::kNonPunEs);
    EXPECT_EQ(neg1.samples[i + 2].kind, SampleKind::kNonPunRs);
  }
  auto rebuilt = build_negatives(neg1.samples, text, image, SubstitutePool::bundled(), 42, 2);
  EXPECT_EQ(rebuilt.samples, neg1.samples);
}

TEST(BatchTest, FailuresAreReportedNotThrown) {
  clients::MockTextGenerator omitting(true);
  clients::MockImageGenerator image;
  auto r = build_positives({pear_tuple(), fan_tuple()}, omitting, image, 1, 2);
  EXPECT_TRUE(r.samples.empty());
  EXPECT_EQ(r.failures.size(), 2u);
}

TEST(DedupeTest, KeepsRequestedCountInOrder) {
  clients::MockTextGenerator text;
  clients::MockImageGenerator image;
  std::vector<PunTuple> tuples;
  for (int i = 0; i < 5; ++i) {
    PunTuple t = fan_tuple();
    t.s_a.offset += static_cast<std::uint32_t>(i + 1);
    t.gloss_a += " variant " + std::to_string(i);
    tuples.push_back(t);
  }
  auto pos = build_positives(tuples, text, image, 1).samples;
  clients::MockEmbedder emb;
  auto kept = dedupe_by_diversity(pos, emb, 3);
  ASSERT_EQ(kept.size(), 3u);
  std::vector<std::string> order;
  for (const auto& s : pos) order.push_back(s.id);
  std::size_t last = 0;
  for (const auto& s : kept) {
    auto at = static_cast<std::size_t>(std::find(order.begin(), order.end(), s.id) - order.begin());
    EXPECT_GE(at, last);
    last = at;
  }
}

}  // namespace
}  // namespace multipun::pipeline
