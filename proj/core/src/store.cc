#include "multipun/store.h"

#include <algorithm>
#include <filesystem>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::store {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::string str_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

json parse_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON");
  return j;
}

// Runs `decode` on every non-blank line, tagging failures with the line number.
template <typename F>
void for_each_line(const std::string& path, F&& decode) {
  const std::string content = text::read_file(path);
  std::size_t line_no = 0, pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    ++line_no;
    std::string_view line(content.data() + pos, nl - pos);
    if (!text::trim(line).empty()) {
      try {
        decode(line);
      } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), line_no);
      } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what(), line_no);
      } catch (const ArgumentError& e) {
        throw ParseError(path + ": " + e.what(), line_no);
      }
    }
    pos = nl + 1;
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

json tuple_json(const PunTuple& t) {
  return {{"kind", miner::to_string(t.kind)},
          {"w_p", t.w_p},
          {"w_a", t.w_a},
          {"s_p", {{"id", t.s_p.str()}, {"gloss", t.gloss_p}}},
          {"s_a", {{"id", t.s_a.str()}, {"gloss", t.gloss_a}}}};
}

PunTuple tuple_from(const json& j) {
  PunTuple t;
  t.kind = miner::parse_pun_kind(str_field(j, "kind"));
  t.w_p = str_field(j, "w_p");
  t.w_a = str_field(j, "w_a");
  const json& sp = field(j, "s_p");
  const json& sa = field(j, "s_a");
  t.s_p = lexres::SynsetId::parse(str_field(sp, "id"));
  t.gloss_p = str_field(sp, "gloss");
  t.s_a = lexres::SynsetId::parse(str_field(sa, "id"));
  t.gloss_a = str_field(sa, "gloss");
  return t;
}

json sample_json(const Sample& s) {
  json j;
  j["id"] = s.id;
  j["kind"] = pipeline::to_string(s.kind);
  j["caption"] = s.caption;
  j["image_prompt"] = s.image_prompt;
  j["image"] = s.image ? json{{"sha256", s.image->sha256}, {"bytes", s.image->bytes}} : json(nullptr);
  j["interpretation"] = s.interpretation;
  j["tuple"] = s.tuple ? tuple_json(*s.tuple) : json(nullptr);
  if (s.substitution) {
    const auto& sub = *s.substitution;
    j["substitution"] = {{"strategy", pipeline::to_string(sub.strategy)},
                         {"source_tuple", tuple_json(sub.source_tuple)},
                         {"source_id", sub.source_id},
                         {"replacement", sub.replacement}};
  } else {
    j["substitution"] = nullptr;
  }
  j["human"] = {{"image_quality", opt(s.human.image_quality)},
                {"coherence", opt(s.human.coherence)},
                {"ambiguity", opt(s.human.ambiguity)},
                {"naturalness", opt(s.human.naturalness)},
                {"note", opt(s.human.note)}};
  j["provenance"] = {{"text_model", s.provenance.text_model},
                     {"image_model", s.provenance.image_model},
                     {"seed", s.provenance.seed}};
  return j;
}

Sample sample_from(const json& j) {
  Sample s;
  s.id = str_field(j, "id");
  s.kind = pipeline::parse_sample_kind(str_field(j, "kind"));
  s.caption = str_field(j, "caption");
  s.image_prompt = str_field(j, "image_prompt");
  if (const json& img = field(j, "image"); !img.is_null()) {
    s.image = clients::ImageRef{str_field(img, "sha256"), field(img, "bytes").get<std::size_t>()};
  }
  s.interpretation = str_field(j, "interpretation");
  if (const json& t = field(j, "tuple"); !t.is_null()) s.tuple = tuple_from(t);
  if (const json& sub = field(j, "substitution"); !sub.is_null()) {
    s.substitution = pipeline::SubstitutionRecord{
        pipeline::parse_substitution_strategy(str_field(sub, "strategy")),
        tuple_from(field(sub, "source_tuple")), str_field(sub, "source_id"),
        str_field(sub, "replacement")};
  }
  if (auto it = j.find("human"); it != j.end() && it->is_object()) {
    s.human.image_quality = opt_field<bool>(*it, "image_quality");
    s.human.coherence = opt_field<bool>(*it, "coherence");
    s.human.ambiguity = opt_field<bool>(*it, "ambiguity");
    s.human.naturalness = opt_field<bool>(*it, "naturalness");
    s.human.note = opt_field<std::string>(*it, "note");
  }
  const json& p = field(j, "provenance");
  s.provenance.text_model = str_field(p, "text_model");
  s.provenance.image_model = str_field(p, "image_model");
  s.provenance.seed = field(p, "seed").get<std::uint64_t>();
  return s;
}

json response_json(const evalharness::TaskSpec& spec, const evalharness::ModelResponse& r) {
  return {{"spec", spec.key()},
          {"raw", r.raw},
          {"parse_ok", r.parse_ok},
          {"verdict", opt(r.verdict)},
          {"pun_type", r.pun_type ? json(miner::to_string(*r.pun_type)) : json(nullptr)},
          {"wp", opt(r.pred_wp)},
          {"wa", opt(r.pred_wa)},
          {"sp", opt(r.pred_sp)},
          {"sa", opt(r.pred_sa)},
          {"explanation", opt(r.explanation)},
          {"error", r.error}};
}

json opt_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------

std::string encode_tuple(const PunTuple& t) { return tuple_json(t).dump(); }
PunTuple decode_tuple(std::string_view line) { return tuple_from(parse_line(line)); }

std::string encode_sample(const Sample& s) { return sample_json(s).dump(); }
Sample decode_sample(std::string_view line) { return sample_from(parse_line(line)); }

std::string encode_record(const evalharness::EvalRecord& r) {
  json responses = json::array();
  for (const auto& [spec, resp] : r.responses) responses.push_back(response_json(spec, resp));
  return json{{"sample_id", r.sample_id},
              {"gold_is_pun", r.gold_is_pun},
              {"pun_type", miner::to_string(r.pun_type)},
              {"gold_tuple", r.gold_tuple ? tuple_json(*r.gold_tuple) : json(nullptr)},
              {"caption", r.caption},
              {"gold_interpretation", r.gold_interpretation},
              {"responses", responses}}
      .dump();
}

evalharness::EvalRecord decode_record(std::string_view line) {
  json j = parse_line(line);
  evalharness::EvalRecord r;
  r.sample_id = str_field(j, "sample_id");
  r.gold_is_pun = field(j, "gold_is_pun").get<bool>();
  r.pun_type = miner::parse_pun_kind(str_field(j, "pun_type"));
  if (const json& t = field(j, "gold_tuple"); !t.is_null()) r.gold_tuple = tuple_from(t);
  r.caption = str_field(j, "caption");
  r.gold_interpretation = str_field(j, "gold_interpretation");
  for (const json& rj : field(j, "responses")) {
    auto spec = evalharness::TaskSpec::parse(str_field(rj, "spec"));
    evalharness::ModelResponse m;
    m.raw = str_field(rj, "raw");
    m.parse_ok = field(rj, "parse_ok").get<bool>();
    m.verdict = opt_field<bool>(rj, "verdict");
    if (auto pt = opt_field<std::string>(rj, "pun_type")) m.pun_type = miner::parse_pun_kind(*pt);
    m.pred_wp = opt_field<std::string>(rj, "wp");
    m.pred_wa = opt_field<std::string>(rj, "wa");
    m.pred_sp = opt_field<std::string>(rj, "sp");
    m.pred_sa = opt_field<std::string>(rj, "sa");
    m.explanation = opt_field<std::string>(rj, "explanation");
    m.error = str_field(rj, "error");
    if (!r.responses.emplace(spec, std::move(m)).second) {
      throw ParseError("duplicate response for " + spec.key());
    }
  }
  return r;
}

void save_tuples(const std::vector<PunTuple>& tuples, const std::string& path) {
  std::vector<std::string> lines;
  for (const auto& t : tuples) lines.push_back(encode_tuple(t));
  text::write_file(path, join_lines(lines));
}

std::vector<PunTuple> load_tuples(const std::string& path) {
  std::vector<PunTuple> out;
  for_each_line(path, [&](std::string_view l) { out.push_back(decode_tuple(l)); });
  return out;
}

void save_transcript(const std::vector<evalharness::EvalRecord>& records, const std::string& path) {
  std::vector<std::string> lines;
  for (const auto& r : records) lines.push_back(encode_record(r));
  text::write_file(path, join_lines(lines));
}

std::vector<evalharness::EvalRecord> load_transcript(const std::string& path) {
  std::vector<evalharness::EvalRecord> out;
  for_each_line(path, [&](std::string_view l) { out.push_back(decode_record(l)); });
  return out;
}

std::string encode_metrics(const evalharness::MetricsReport& report) {
  std::vector<std::string> lines;
  for (const auto& b : report.bias_rows) {
    lines.push_back(json{{"row", "bias"},
                         {"label", report.label},
                         {"pun_type", miner::to_string(b.pun_type)},
                         {"spec", b.spec.key()},
                         {"tp", b.counts.tp},
                         {"fp", b.counts.fp},
                         {"tn", b.counts.tn},
                         {"fn", b.counts.fn},
                         {"unparsed", b.counts.unparsed},
                         {"tpr", b.rates.tpr},
                         {"tnr", b.rates.tnr},
                         {"precision", b.rates.precision},
                         {"f1", b.rates.f1}}
                        .dump());
  }
  for (const auto& s : report.summary) {
    json pairwise = nullptr;
    if (s.pairwise) {
      pairwise = {{"win", s.pairwise->win},
                  {"tie", s.pairwise->tie},
                  {"loss", s.pairwise->loss},
                  {"judged", s.pairwise->judged},
                  {"format_errors", s.pairwise->format_errors},
                  {"defined", s.pairwise->defined}};
    }
    lines.push_back(json{{"row", "summary"},
                         {"label", report.label},
                         {"pun_type", miner::to_string(s.pun_type)},
                         {"task", prompts::to_string(s.task)},
                         {"strategy", prompts::to_string(s.strategy)},
                         {"tpr", opt_double(s.tpr)},
                         {"tnr", opt_double(s.tnr)},
                         {"f1", opt_double(s.f1)},
                         {"delta_tpr", opt_double(s.delta_tpr)},
                         {"delta_tnr", opt_double(s.delta_tnr)},
                         {"kappa", opt_double(s.kappa)},
                         {"mention_wp", opt_double(s.mention_wp)},
                         {"mention_wa", opt_double(s.mention_wa)},
                         {"pairwise", pairwise},
                         {"unparsed", s.unparsed}}
                        .dump());
  }
  return join_lines(lines);
}

void save_metrics(const evalharness::MetricsReport& report, const std::string& path) {
  text::write_file(path, encode_metrics(report));
}

divfilter::EmbeddingMatrix load_embeddings(const std::string& path) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  for_each_line(path, [&](std::string_view l) {
    json j = parse_line(l);
    ids.push_back(str_field(j, "id"));
    const json& v = field(j, "vector");
    if (!v.is_array()) throw ParseError("field 'vector' is not an array");
    rows.push_back(v.get<std::vector<double>>());
  });
  return divfilter::EmbeddingMatrix(std::move(ids), std::move(rows));
}

void save_embeddings(const divfilter::EmbeddingMatrix& m, const std::string& path) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < m.size(); ++i) {
    lines.push_back(json{{"id", m.ids()[i]}, {"vector", m.row(i)}}.dump());
  }
  text::write_file(path, join_lines(lines));
}

// ---------------------------------------------------------------------------
// Manifest

bool Manifest::balanced() const {
  return std::all_of(counts.begin(), counts.end(), [](const auto& kv) {
    return kv.second.es == kv.second.positives && kv.second.rs == kv.second.positives;
  });
}

long Manifest::total() const {
  long n = 0;
  for (const auto& [kind, c] : counts) n += c.positives + c.es + c.rs;
  return n;
}

Manifest count_samples(const std::vector<Sample>& samples) {
  Manifest m;
  m.counts[PunKind::kHomophonic] = {};
  m.counts[PunKind::kHomographic] = {};
  for (const auto& s : samples) {
    KindCounts& c = m.counts[s.pun_type()];
    switch (s.kind) {
      case pipeline::SampleKind::kPunHomophonic:
      case pipeline::SampleKind::kPunHomographic:
        ++c.positives;
        break;
      case pipeline::SampleKind::kNonPunEs:
        ++c.es;
        break;
      case pipeline::SampleKind::kNonPunRs:
        ++c.rs;
        break;
    }
  }
  return m;
}

namespace {

json split_json(const SplitSpec& s) {
  json train = json::object(), test = json::object();
  for (const auto& [k, n] : s.train) train[std::string(miner::to_string(k))] = n;
  for (const auto& [k, n] : s.test) test[std::string(miner::to_string(k))] = n;
  return {{"seed", s.seed}, {"procedure", "seeded uniform permutation"}, {"train", train}, {"test", test}};
}

SplitSpec split_from(const json& j) {
  SplitSpec s;
  s.seed = field(j, "seed").get<std::uint64_t>();
  for (const auto& [k, v] : field(j, "train").items()) s.train[miner::parse_pun_kind(k)] = v.get<long>();
  for (const auto& [k, v] : field(j, "test").items()) s.test[miner::parse_pun_kind(k)] = v.get<long>();
  return s;
}

}  // namespace

std::string encode_manifest(const Manifest& m) {
  json counts = json::object();
  long pos = 0, neg = 0;
  for (const auto& [kind, c] : m.counts) {
    counts[std::string(miner::to_string(kind))] = {
        {"positives", c.positives}, {"es_negatives", c.es}, {"rs_negatives", c.rs}};
    pos += c.positives;
    neg += c.es + c.rs;
  }
  json j = {{"format_version", 1},
            {"counts", counts},
            {"totals", {{"positives", pos}, {"negatives", neg}, {"samples", pos + neg}}},
            {"seed", m.seed},
            {"resources", m.resources},
            {"split", m.split ? split_json(*m.split) : json(nullptr)},
            {"partition", m.partition}};
  return j.dump(2) + "\n";
}

Manifest decode_manifest(std::string_view text) {
  try {
    json j = parse_line(text);
    Manifest m;
    for (const auto& [k, v] : field(j, "counts").items()) {
      m.counts[miner::parse_pun_kind(k)] = {field(v, "positives").get<long>(),
                                            field(v, "es_negatives").get<long>(),
                                            field(v, "rs_negatives").get<long>()};
    }
    m.seed = field(j, "seed").get<std::uint64_t>();
    m.resources = field(j, "resources").get<std::map<std::string, std::string>>();
    if (const json& s = field(j, "split"); !s.is_null()) m.split = split_from(s);
    m.partition = str_field(j, "partition");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

std::string manifest_path(const std::string& dataset_path) {
  constexpr std::string_view kExt = ".jsonl";
  if (dataset_path.size() > kExt.size() &&
      dataset_path.compare(dataset_path.size() - kExt.size(), kExt.size(), kExt) == 0) {
    return dataset_path.substr(0, dataset_path.size() - kExt.size()) + ".manifest.json";
  }
  return dataset_path + ".manifest.json";
}

std::string fingerprint(const std::string& path) {
  if (!fs::is_directory(path)) return text::sha256_hex(text::read_file(path));
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  std::string listing;
  for (const auto& n : names) {
    listing += n + " " + text::sha256_hex(text::read_file((fs::path(path) / n).string())) + "\n";
  }
  return text::sha256_hex(listing);
}

Manifest save_dataset(const std::vector<Sample>& samples, const std::string& path,
                      const DatasetInfo& info) {
  std::set<std::string> ids;
  std::vector<std::string> lines;
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second) throw ArgumentError("duplicate sample id " + s.id);
    pipeline::check_sample(s);
    lines.push_back(encode_sample(s));
  }
  Manifest m = count_samples(samples);
  m.seed = info.seed;
  m.resources = info.resources;
  m.split = info.split;
  m.partition = info.partition;
  text::write_file(path, join_lines(lines));
  text::write_file(manifest_path(path), encode_manifest(m));
  return m;
}

std::vector<Sample> load_dataset(const std::string& path, Manifest* manifest) {
  const std::string mpath = manifest_path(path);
  if (!fs::exists(mpath)) throw IntegrityError("manifest " + mpath + " not found");
  Manifest m = decode_manifest(text::read_file(mpath));

  std::vector<Sample> samples;
  for_each_line(path, [&](std::string_view l) { samples.push_back(decode_sample(l)); });

  std::set<std::string> ids;
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second) throw IntegrityError(path + ": duplicate sample id " + s.id);
  }
  Manifest recount = count_samples(samples);
  for (PunKind k : {PunKind::kHomophonic, PunKind::kHomographic}) {
    KindCounts declared = m.counts.count(k) ? m.counts.at(k) : KindCounts{};
    const KindCounts& actual = recount.counts.at(k);
    if (declared != actual) {
      throw IntegrityError(mpath + ": " + std::string(miner::to_string(k)) +
                           " counts disagree with " + path + " (manifest " +
                           std::to_string(declared.positives) + "/" + std::to_string(declared.es) +
                           "/" + std::to_string(declared.rs) + ", found " +
                           std::to_string(actual.positives) + "/" + std::to_string(actual.es) + "/" +
                           std::to_string(actual.rs) + ")");
    }
  }
  if (manifest) *manifest = std::move(m);
  return samples;
}

// ---------------------------------------------------------------------------
// Split

SplitSpec default_split(const std::vector<Sample>& samples, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  Manifest m = count_samples(samples);
  for (const auto& [kind, c] : m.counts) {
    spec.train[kind] = c.positives / 2;
    spec.test[kind] = c.positives - c.positives / 2;
  }
  return spec;
}

SplitResult split(const std::vector<Sample>& samples, const SplitSpec& spec) {
  std::map<PunKind, std::vector<std::string>> positives;
  std::set<std::string> all_ids;
  for (const auto& s : samples) {
    if (!all_ids.insert(s.id).second) throw ArgumentError("duplicate sample id " + s.id);
    if (s.is_pun()) positives[s.pun_type()].push_back(s.id);
  }

  // source id -> (ES count, RS count)
  std::unordered_map<std::string, std::pair<int, int>> negatives;
  std::set<std::string> positive_ids;
  for (const auto& [kind, ids] : positives) positive_ids.insert(ids.begin(), ids.end());
  for (const auto& s : samples) {
    if (s.is_pun()) continue;
    const std::string& src = s.substitution->source_id;
    if (!positive_ids.count(src)) {
      throw ArgumentError("negative " + s.id + " has no source positive " + src + " in the dataset");
    }
    auto& c = negatives[src];
    (s.kind == pipeline::SampleKind::kNonPunEs ? c.first : c.second)++;
  }
  for (const auto& id : positive_ids) {
    auto it = negatives.find(id);
    if (it == negatives.end() || it->second != std::pair<int, int>{1, 1}) {
      throw ArgumentError("positive " + id + " lacks exactly one ES and one RS negative");
    }
  }

  auto count_of = [](const std::map<PunKind, long>& m, PunKind k) {
    auto it = m.find(k);
    return it == m.end() ? 0L : it->second;
  };
  std::set<std::string> train_ids;
  for (PunKind kind : {PunKind::kHomophonic, PunKind::kHomographic}) {
    std::vector<std::string> ids = positives[kind];
    const long train = count_of(spec.train, kind);
    const long test = count_of(spec.test, kind);
    if (train < 0 || test < 0 || train + test != static_cast<long>(ids.size())) {
      throw ArgumentError("split spec " + std::to_string(train) + "/" + std::to_string(test) +
                          " does not match " + std::to_string(ids.size()) + " " +
                          std::string(miner::to_string(kind)) + " positives");
    }
    std::sort(ids.begin(), ids.end());
    text::SeededRng rng(text::hash_combine(spec.seed, text::stable_hash(miner::to_string(kind))));
    rng.shuffle(std::span<std::string>(ids));
    train_ids.insert(ids.begin(), ids.begin() + train);
  }

  SplitResult out;
  for (const auto& s : samples) {
    const std::string& anchor = s.is_pun() ? s.id : s.substitution->source_id;
    (train_ids.count(anchor) ? out.train : out.test).push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SFT export

namespace {

std::string positive_target(const Sample& s) {
  const PunTuple& t = *s.tuple;
  nlohmann::ordered_json j;
  j["is_pun"] = true;
  j["type"] = t.kind == PunKind::kHomophonic ? "Homophonic" : "Homographic";
  j["explanation"] = s.interpretation;
  j["tuple"] = {{"wp", t.w_p}, {"wa", t.w_a}, {"Sp", t.gloss_p}, {"Sa", t.gloss_a}};
  return j.dump(2);
}

constexpr std::string_view kNegativeTarget = "{\"is_pun\": false}";

}  // namespace

std::vector<SftRecord> export_sft(const std::vector<Sample>& train) {
  std::vector<SftRecord> out;
  out.reserve(train.size() * 2);
  for (const auto& s : train) {
    std::string target;
    if (s.is_pun()) {
      if (!s.tuple) throw ExportError("positive " + s.id + " has no tuple");
      if (text::trim(s.interpretation).empty()) {
        throw ExportError("positive " + s.id + " has no interpretation");
      }
      target = positive_target(s);
    } else {
      target = std::string(kNegativeTarget);
    }
    for (prompts::Bias bias : {prompts::Bias::kToPun, prompts::Bias::kToNonPun}) {
      evalharness::TaskSpec spec{prompts::Task::kExplanation, bias, prompts::Strategy::kVanilla};
      out.push_back({s.id, bias, evalharness::build_task_prompt(spec, s), target});
    }
  }
  return out;
}

std::string encode_sft(const SftRecord& r) {
  return json{{"sample_id", r.sample_id},
              {"bias", prompts::to_string(r.bias)},
              {"prompt", r.prompt},
              {"target", r.target}}
      .dump();
}

void save_sft(const std::vector<SftRecord>& records, const std::string& path) {
  std::vector<std::string> lines;
  for (const auto& r : records) lines.push_back(encode_sft(r));
  text::write_file(path, join_lines(lines));
}

}  // namespace multipun::store
