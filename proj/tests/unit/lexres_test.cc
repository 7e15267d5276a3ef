#include "multipun/lexres.h"

#include <gtest/gtest.h>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::lexres {
namespace {

const std::string kDir = std::string(MULTIPUN_FIXTURE_DIR) + "/lexicon";

TEST(PronDictTest, ParsesVariantsAndComments) {
  auto d = parse_pron_dict(";;; header\nRECORD  R EH1 K ER0 D\nRECORD(2)  R IH0 K AO1 R D\n"
                           "word  W ER1 D # trailing\n\n");
  ASSERT_NE(d.find("record"), nullptr);
  EXPECT_EQ(d.find("record")->size(), 2u);
  EXPECT_EQ(d.find("Word")->front().str(), "W ER1 D");
  EXPECT_EQ(d.find("missing"), nullptr);
}

TEST(PronDictTest, RejectsUnknownPhonemeWithLine) {
  try {
    parse_pron_dict("OK  OW1 K EY1\nBAD  X Y Z\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_pron_dict("LONELY\n"), ParseError);
}

TEST(PronDictTest, SerializeRoundTrips) {
  auto d = parse_pron_dict(text::read_file(kDir + "/prondict.txt"));
  EXPECT_EQ(parse_pron_dict(d.serialize()), d);
}

TEST(PronDictTest, HomophonesRequireIdenticalStress) {
  auto d = parse_pron_dict("PEAR  P EH1 R\nPAIR  P EH1 R\nPERR  P EH0 R\n");
  EXPECT_TRUE(are_homophones(d, "pear", "pair"));
  EXPECT_FALSE(are_homophones(d, "pear", "perr"));
  EXPECT_FALSE(are_homophones(d, "pear", "PEAR"));
  EXPECT_THROW(are_homophones(d, "pear", "absent"), LookupError);
}

TEST(PronDictTest, AnySharedVariantCounts) {
  auto d = parse_pron_dict("RECORD  R EH1 K ER0 D\nRECORD(2)  R IH0 K AO1 R D\n"
                           "REKORD  R IH0 K AO1 R D\n");
  EXPECT_TRUE(are_homophones(d, "record", "rekord"));
}

TEST(FrequencyTest, ParsesAndKeepsMaximum) {
  auto t = parse_frequency_table("# c\nPear\t4.1\npear 3.0\nsole\t2\n");
  EXPECT_DOUBLE_EQ(*zipf(t, "pear"), 4.1);
  EXPECT_DOUBLE_EQ(*zipf(t, "SOLE"), 2.0);
  EXPECT_FALSE(zipf(t, "x").has_value());
  EXPECT_THROW(parse_frequency_table("pear\tabc\n"), ParseError);
  EXPECT_THROW(parse_frequency_table("pear\t-1\n"), ParseError);
  EXPECT_THROW(parse_frequency_table("pear\n"), ParseError);
}

TEST(LexnameTest, VisualClassification) {
  EXPECT_TRUE(is_visual_lexname("noun.artifact"));
  EXPECT_TRUE(is_visual_lexname("noun.animal"));
  EXPECT_FALSE(is_visual_lexname("noun.cognition"));
  EXPECT_FALSE(is_visual_lexname("noun.act"));
  EXPECT_EQ(lexname_for_file_number(6), "noun.artifact");
  EXPECT_THROW(lexname_for_file_number(99), LookupError);
}

TEST(LemmatizeTest, UsesExceptionsAndSuffixRules) {
  auto db = WordNetDb::load_dir(kDir + "/wordnet");
  EXPECT_EQ(lemmatize(db, "mice"), std::vector<std::string>{"mouse"});
  EXPECT_EQ(lemmatize(db, "men"), std::vector<std::string>{"man"});
  EXPECT_EQ(lemmatize(db, "Pears"), std::vector<std::string>{"pear"});
  EXPECT_EQ(lemmatize(db, "fan"), std::vector<std::string>{"fan"});
  EXPECT_TRUE(lemmatize(db, "zzzz").empty());
  EXPECT_TRUE(lemmatize(db, "").empty());
}

TEST(PathSimilarityTest, IdenticalSynsetIsOne) {
  auto db = WordNetDb::load_dir(kDir + "/wordnet");
  auto fan = db.senses("fan");
  ASSERT_EQ(fan.size(), 2u);
  EXPECT_DOUBLE_EQ(path_similarity(db, fan[0], fan[0]), 1.0);
  EXPECT_LT(path_similarity(db, fan[0], fan[1]), 0.1);
}

}  // namespace
}  // namespace multipun::lexres
