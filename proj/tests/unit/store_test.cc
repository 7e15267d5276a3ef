#include "multipun/store.h"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <set>

#include "multipun/error.h"
#include "multipun/text.h"
#include "pipeline_run.h"

namespace multipun::store {
namespace {

namespace fs = std::filesystem;
using pipeline::SampleKind;

PunTuple tuple_for(int i, PunKind kind) {
  PunTuple t;
  t.kind = kind;
  t.w_p = kind == PunKind::kHomophonic ? "pear" : "fan";
  t.w_a = kind == PunKind::kHomophonic ? "pair" : "fan";
  t.s_p = {static_cast<std::uint32_t>(100 + i), 'n'};
  t.s_a = {static_cast<std::uint32_t>(200 + i), 'n'};
  t.gloss_p = "literal sense " + std::to_string(i);
  t.gloss_a = "alternative sense " + std::to_string(i);
  return t;
}

// A positive and its two negatives, built by hand so the test does not depend
// on the generators.
std::vector<Sample> triple(int i, PunKind kind) {
  const PunTuple t = tuple_for(i, kind);
  Sample pos;
  pos.kind = pipeline::positive_kind(kind);
  pos.tuple = t;
  pos.caption = "The " + t.w_p + " number " + std::to_string(i);
  pos.image_prompt = "a " + t.w_p;
  pos.interpretation = "both senses of " + t.w_p;
  pos.image = clients::ImageRef{text::sha256_hex(pos.caption), 12};
  pos.provenance = {"mock-text", "mock-image", 7};
  pos.id = pipeline::sample_id(pos.kind, t, pos.caption);

  Sample es;
  es.kind = SampleKind::kNonPunEs;
  es.caption = "The thing number " + std::to_string(i);
  es.image_prompt = pos.image_prompt;
  es.image = pos.image;
  es.substitution = pipeline::SubstitutionRecord{pipeline::SubstitutionStrategy::kEs, t, pos.id, "thing"};
  es.id = pipeline::sample_id(es.kind, t, es.caption);

  Sample rs;
  rs.kind = SampleKind::kNonPunRs;
  rs.caption = "The lamp number " + std::to_string(i);
  rs.image_prompt = "a lamp";
  rs.substitution = pipeline::SubstitutionRecord{pipeline::SubstitutionStrategy::kRs, t, pos.id, "lamp"};
  rs.human.note = "checked";
  rs.human.coherence = true;
  rs.id = pipeline::sample_id(rs.kind, t, rs.caption);
  return {pos, es, rs};
}

std::vector<Sample> dataset(int homophonic, int homographic) {
  std::vector<Sample> out;
  for (int i = 0; i < homophonic; ++i) {
    for (auto& s : triple(i, PunKind::kHomophonic)) out.push_back(s);
  }
  for (int i = 0; i < homographic; ++i) {
    for (auto& s : triple(1000 + i, PunKind::kHomographic)) out.push_back(s);
  }
  return out;
}

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::fresh_temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(CodecTest, TupleAndSampleRoundTrip) {
  for (const auto& s : dataset(1, 1)) {
    EXPECT_EQ(decode_sample(encode_sample(s)), s);
    EXPECT_EQ(encode_sample(decode_sample(encode_sample(s))), encode_sample(s));
  }
  auto t = tuple_for(3, PunKind::kHomographic);
  EXPECT_EQ(decode_tuple(encode_tuple(t)), t);
  auto j = nlohmann::json::parse(encode_tuple(t));
  EXPECT_EQ(j["kind"], "homographic");
  EXPECT_EQ(j["s_p"]["id"], t.s_p.str());
  EXPECT_THROW(decode_tuple("{\"kind\": \"visual\"}"), Error);
  EXPECT_THROW(decode_sample("not json"), ParseError);
}

TEST(CodecTest, RecordRoundTrip) {
  evalharness::EvalRecord r;
  r.sample_id = "abc";
  r.gold_is_pun = true;
  r.pun_type = PunKind::kHomographic;
  r.gold_tuple = tuple_for(1, PunKind::kHomographic);
  r.caption = "cap";
  r.gold_interpretation = "interp";
  evalharness::ModelResponse m;
  m.raw = "{\"is_pun\": true}";
  m.parse_ok = true;
  m.verdict = true;
  m.pun_type = PunKind::kHomographic;
  m.pred_wp = "fan";
  m.explanation = "because";
  r.responses[{prompts::Task::kExplanation, prompts::Bias::kToNonPun, prompts::Strategy::kPunCot}] = m;
  evalharness::ModelResponse failed;
  failed.raw = "??";
  failed.error = "no JSON object";
  r.responses[{prompts::Task::kDetection, prompts::Bias::kToPun, prompts::Strategy::kVanilla}] = failed;
  EXPECT_EQ(decode_record(encode_record(r)), r);
}

TEST_F(StoreTest, DatasetRoundTripWithManifest) {
  auto data = dataset(3, 2);
  DatasetInfo info;
  info.seed = 9;
  info.resources["wordnet"] = "deadbeef";
  auto m = save_dataset(data, path("d.jsonl"), info);
  EXPECT_TRUE(fs::exists(path("d.manifest.json")));
  EXPECT_TRUE(m.balanced());
  EXPECT_EQ(m.total(), 15);
  EXPECT_EQ(m.counts.at(PunKind::kHomophonic), (KindCounts{3, 3, 3}));
  Manifest loaded;
  EXPECT_EQ(load_dataset(path("d.jsonl"), &loaded), data);
  EXPECT_EQ(loaded, m);
  EXPECT_EQ(loaded.resources.at("wordnet"), "deadbeef");
  EXPECT_EQ(decode_manifest(encode_manifest(m)), m);
}

TEST_F(StoreTest, TamperingIsDetected) {
  auto data = dataset(2, 0);
  save_dataset(data, path("d.jsonl"));
  std::string body = text::read_file(path("d.jsonl"));
  body = body.substr(0, body.rfind('\n', body.size() - 2) + 1);  // drop the last sample
  text::write_file(path("d.jsonl"), body);
  EXPECT_THROW(load_dataset(path("d.jsonl")), IntegrityError);
  fs::remove(path("d.manifest.json"));
  EXPECT_THROW(load_dataset(path("d.jsonl")), IntegrityError);
}

TEST_F(StoreTest, SaveRejectsDuplicatesAndInvalidSamples) {
  auto data = dataset(1, 0);
  data.push_back(data[0]);
  EXPECT_THROW(save_dataset(data, path("d.jsonl")), ArgumentError);
  auto bad = dataset(1, 0);
  bad[0].caption = "no pun word";
  EXPECT_THROW(save_dataset(bad, path("d.jsonl")), ValidityError);
}

TEST_F(StoreTest, EmptyDatasetIsValid) {
  auto m = save_dataset({}, path("e.jsonl"));
  EXPECT_EQ(m.total(), 0);
  EXPECT_EQ(m.counts.size(), 2u);
  EXPECT_TRUE(load_dataset(path("e.jsonl")).empty());
}

TEST_F(StoreTest, BadLineReportsLineNumber) {
  text::write_file(path("t.jsonl"), encode_tuple(tuple_for(1, PunKind::kHomophonic)) + "\n\n{bad\n");
  try {
    load_tuples(path("t.jsonl"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("t.jsonl"), std::string::npos);
  }
}

TEST_F(StoreTest, EmbeddingsRoundTrip) {
  divfilter::EmbeddingMatrix m({"a", "b"}, {{1.0, 0.5}, {0.25, -2.0}});
  save_embeddings(m, path("e.jsonl"));
  auto back = load_embeddings(path("e.jsonl"));
  EXPECT_EQ(back.ids(), m.ids());
  EXPECT_EQ(back.rows(), m.rows());
}

TEST_F(StoreTest, ManifestPathAndFingerprint) {
  EXPECT_EQ(manifest_path("/x/d.jsonl"), "/x/d.manifest.json");
  EXPECT_EQ(manifest_path("/x/data"), "/x/data.manifest.json");
  text::write_file(path("a.txt"), "abc");
  EXPECT_EQ(fingerprint(path("a.txt")), text::sha256_hex("abc"));
  fs::create_directories(dir_ / "sub");
  text::write_file((dir_ / "sub" / "f").string(), "1");
  const auto before = fingerprint((dir_ / "sub").string());
  text::write_file((dir_ / "sub" / "f").string(), "2");
  EXPECT_NE(fingerprint((dir_ / "sub").string()), before);
}

TEST(SplitTest, FullSizeSplitIsBalancedAndDisjoint) {
  auto data = dataset(194, 251);
  auto spec = default_split(data, 4);
  EXPECT_EQ(spec.train.at(PunKind::kHomophonic), 97);
  EXPECT_EQ(spec.test.at(PunKind::kHomophonic), 97);
  EXPECT_EQ(spec.train.at(PunKind::kHomographic), 125);
  EXPECT_EQ(spec.test.at(PunKind::kHomographic), 126);
  auto parts = split(data, spec);
  auto train = count_samples(parts.train);
  auto test = count_samples(parts.test);
  EXPECT_EQ(train.counts.at(PunKind::kHomophonic), (KindCounts{97, 97, 97}));
  EXPECT_EQ(test.counts.at(PunKind::kHomographic), (KindCounts{126, 126, 126}));
  std::set<std::string> ids;
  for (const auto& s : parts.train) ids.insert(s.id);
  for (const auto& s : parts.test) EXPECT_EQ(ids.count(s.id), 0u);
  EXPECT_EQ(parts.train.size() + parts.test.size(), data.size());

  auto again = split(data, spec);
  EXPECT_EQ(again.train, parts.train);
  auto reversed = data;
  std::reverse(reversed.begin(), reversed.end());
  std::set<std::string> rev_ids;
  for (const auto& s : split(reversed, spec).train) rev_ids.insert(s.id);
  EXPECT_EQ(rev_ids, ids);  // membership does not depend on input order
  auto other = split(data, default_split(data, 5));
  EXPECT_NE(other.train, parts.train);
}

TEST(SplitTest, NegativesFollowTheirPositive) {
  auto data = dataset(6, 0);
  auto parts = split(data, default_split(data, 1));
  std::set<std::string> train_pos;
  for (const auto& s : parts.train) {
    if (s.is_pun()) train_pos.insert(s.id);
  }
  for (const auto& s : parts.train) {
    if (!s.is_pun()) {
      EXPECT_EQ(train_pos.count(s.substitution->source_id), 1u);
    }
  }
}

TEST(SplitTest, RejectsUnbalancedInput) {
  auto data = dataset(3, 0);
  auto spec = default_split(data, 1);
  auto missing_rs = data;
  missing_rs.pop_back();
  EXPECT_THROW(split(missing_rs, spec), ArgumentError);
  auto wrong = spec;
  wrong.train[PunKind::kHomophonic] = 5;
  EXPECT_THROW(split(data, wrong), ArgumentError);
  auto orphan = data;
  orphan.erase(orphan.begin());
  EXPECT_THROW(split(orphan, default_split(orphan, 1)), ArgumentError);
}

TEST(SftTest, TwoRecordsPerSampleWithTargets) {
  auto data = dataset(2, 1);
  auto records = export_sft(data);
  ASSERT_EQ(records.size(), 2 * data.size());
  EXPECT_EQ(records[0].bias, prompts::Bias::kToPun);
  EXPECT_EQ(records[1].bias, prompts::Bias::kToNonPun);
  EXPECT_EQ(records[0].sample_id, data[0].id);
  EXPECT_NE(records[0].prompt.find(data[0].caption), std::string::npos);

  auto target = nlohmann::json::parse(records[0].target);
  EXPECT_EQ(target["is_pun"], true);
  EXPECT_EQ(target["type"], "Homophonic");
  EXPECT_EQ(target["explanation"], data[0].interpretation);
  EXPECT_EQ(target["tuple"]["wp"], "pear");
  EXPECT_EQ(target["tuple"]["Sa"], data[0].tuple->gloss_a);
  EXPECT_EQ(records[2].target, "{\"is_pun\": false}");
  EXPECT_EQ(nlohmann::json::parse(records[12].target)["type"], "Homographic");

  auto line = nlohmann::json::parse(encode_sft(records[0]));
  EXPECT_EQ(line["sample_id"], data[0].id);

  auto broken = data;
  broken[0].interpretation.clear();
  EXPECT_THROW(export_sft(broken), ExportError);
}

TEST(ManifestTest, BalanceAndCounts) {
  Manifest m = count_samples(dataset(2, 3));
  EXPECT_TRUE(m.balanced());
  EXPECT_EQ(m.total(), 15);
  auto data = dataset(2, 0);
  data.pop_back();
  EXPECT_FALSE(count_samples(data).balanced());
}

}  // namespace
}  // namespace multipun::store
