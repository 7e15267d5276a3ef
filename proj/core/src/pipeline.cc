#include "multipun/pipeline.h"

#include <algorithm>
#include <charconv>
#include <map>

#include "multipun/divfilter.h"
#include "multipun/error.h"
#include "multipun/parallel.h"
#include "multipun/text.h"

namespace multipun::pipeline {

namespace detail {
extern const std::string_view kBundledSubstitutePool;
}

std::string_view to_string(SampleKind k) {
  switch (k) {
    case SampleKind::kPunHomophonic: return "pun-homophonic";
    case SampleKind::kPunHomographic: return "pun-homographic";
    case SampleKind::kNonPunEs: return "nonpun-es";
    case SampleKind::kNonPunRs: return "nonpun-rs";
  }
  return "?";
}

SampleKind parse_sample_kind(std::string_view s) {
  for (auto k : {SampleKind::kPunHomophonic, SampleKind::kPunHomographic, SampleKind::kNonPunEs,
                 SampleKind::kNonPunRs}) {
    if (s == to_string(k)) return k;
  }
  throw ArgumentError("unknown sample kind '" + std::string(s) + "'");
}

std::string_view to_string(SubstitutionStrategy s) {
  return s == SubstitutionStrategy::kEs ? "ES" : "RS";
}

SubstitutionStrategy parse_substitution_strategy(std::string_view s) {
  if (s == "ES") return SubstitutionStrategy::kEs;
  if (s == "RS") return SubstitutionStrategy::kRs;
  throw ArgumentError("unknown substitution strategy '" + std::string(s) + "'");
}

const PunTuple& Sample::source_tuple() const {
  if (tuple) return *tuple;
  if (substitution) return substitution->source_tuple;
  throw ValidityError("sample " + id + " has neither a tuple nor a substitution record");
}

SampleKind positive_kind(PunKind k) {
  return k == PunKind::kHomophonic ? SampleKind::kPunHomophonic : SampleKind::kPunHomographic;
}

std::string sample_id(SampleKind kind, const PunTuple& t, std::string_view caption) {
  std::string key;
  for (std::string_view part : {to_string(kind), miner::to_string(t.kind), std::string_view(t.w_p),
                                std::string_view(t.w_a)}) {
    key.append(part);
    key.push_back('\x1f');
  }
  key += t.s_p.str() + '\x1f' + t.s_a.str() + '\x1f';
  key.append(caption);
  return text::sha256_hex(key).substr(0, 16);
}

std::string sample_violation(const Sample& s) {
  if (s.caption.empty()) return "empty caption";
  if (s.is_pun()) {
    if (!s.tuple) return "positive without a tuple";
    if (s.substitution) return "positive with a substitution record";
    if (positive_kind(s.tuple->kind) != s.kind) return "kind does not match the tuple's pun type";
    if (!text::mentions_word(s.caption, s.tuple->w_p)) {
      return "caption does not contain the pun word '" + s.tuple->w_p + "'";
    }
    if (text::trim(s.interpretation).empty()) return "positive without an interpretation";
  } else {
    if (!s.substitution) return "negative without a substitution record";
    if (s.tuple) return "negative carrying a tuple";
    const auto& sub = *s.substitution;
    const auto& t = sub.source_tuple;
    if (text::trim(sub.replacement).empty()) return "empty replacement";
    if (s.kind == SampleKind::kNonPunEs) {
      if (sub.strategy != SubstitutionStrategy::kEs) return "ES sample with RS record";
      if (text::mentions_word(s.caption, t.w_p)) return "ES caption still contains w_p";
      if (text::mentions_word(s.caption, t.w_a)) return "ES caption contains w_a";
    } else {
      if (sub.strategy != SubstitutionStrategy::kRs) return "RS sample with ES record";
      if (!text::mentions_word(s.caption, sub.replacement)) return "RS caption lacks the substitute";
      if (!text::mentions_word(s.image_prompt, sub.replacement)) {
        return "RS image prompt lacks the substitute";
      }
      if (text::mentions_word(s.caption, t.w_p)) return "RS caption still contains w_p";
      if (text::mentions_word(s.image_prompt, t.w_p)) return "RS image prompt still contains w_p";
    }
  }
  if (s.id != sample_id(s.kind, s.source_tuple(), s.caption)) return "id does not match content";
  return {};
}

void check_sample(const Sample& s) {
  if (auto v = sample_violation(s); !v.empty()) throw ValidityError("sample " + s.id + ": " + v);
}

// ---------------------------------------------------------------------------

GeneratedTriple parse_generation(std::string_view raw) {
  static constexpr std::string_view kLabels[] = {"image description", "caption", "interpretation"};
  std::string fields[3];
  bool seen[3] = {false, false, false};
  int current = -1;

  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    std::string_view line_raw =
        raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;

    std::string line = text::strip_markup(line_raw);
    if (line.empty()) {
      current = -1;
      continue;
    }
    int matched = -1;
    std::string lower = text::to_lower(line);
    for (int f = 0; f < 3; ++f) {
      const auto& label = kLabels[f];
      if (lower.starts_with(label) && lower.size() > label.size()) {
        std::string_view rest = text::trim(std::string_view(line).substr(label.size()));
        if (!rest.empty() && rest.front() == ':') {
          matched = f;
          if (!seen[f]) {
            fields[f] = std::string(text::trim(rest.substr(1)));
            seen[f] = true;
            current = f;
          } else {
            current = -1;
          }
          break;
        }
      }
    }
    if (matched == -1 && current != -1) {
      if (!fields[current].empty()) fields[current].push_back(' ');
      fields[current] += line;
    }
  }
  for (int f = 0; f < 3; ++f) {
    if (!seen[f] || fields[f].empty()) {
      throw GenerationFormatError("generation output lacks the '" + std::string(kLabels[f]) +
                                      "' field",
                                  std::string(raw));
    }
  }
  return {fields[0], fields[1], fields[2]};
}

std::string creative_prompt(const PunTuple& t) {
  const std::string sp_def = lexres::definition_of(t.gloss_p);
  const std::string sa_def = lexres::definition_of(t.gloss_a);
  if (t.kind == PunKind::kHomophonic) {
    return render_prompt(prompts::kCreativeHomophonic,
                         {{"wp", t.w_p}, {"wa", t.w_a}, {"sp_def", sp_def}, {"sa_def", sa_def}});
  }
  return render_prompt(prompts::kCreativeHomographic,
                       {{"word", t.w_p}, {"sp_def", sp_def}, {"sa_def", sa_def}});
}

Sample build_positive(const PunTuple& tuple, clients::TextGenerator& textgen,
                      clients::ImageGenerator& imagegen, std::uint64_t seed) {
  if (tuple.w_p.empty() || tuple.w_a.empty()) throw ArgumentError("tuple without words");
  auto resp = clients::generate_text(textgen, {creative_prompt(tuple), seed});
  if (resp.refused) throw GenerationFormatError("text generator refused the creative prompt", "");
  GeneratedTriple triple = parse_generation(resp.text);

  Sample s;
  s.kind = positive_kind(tuple.kind);
  s.caption = triple.caption;
  s.image_prompt = triple.image_description;
  s.interpretation = triple.interpretation;
  s.tuple = tuple;
  s.provenance = {textgen.name(), imagegen.name(), seed};
  s.id = sample_id(s.kind, tuple, s.caption);
  if (!text::mentions_word(s.caption, tuple.w_p)) {
    throw ValidityError("caption '" + s.caption + "' does not contain the pun word '" +
                        tuple.w_p + "'");
  }
  check_sample(s);
  s.image = imagegen.render({s.image_prompt, seed});
  return s;
}

namespace {

// Removes an optional "Output:" label and one pair of surrounding quotes.
std::string clean_caption(std::string_view raw) {
  std::string line = text::strip_markup(raw);
  std::string lower = text::to_lower(line);
  for (std::string_view label : {"output:", "new caption:", "caption:"}) {
    if (lower.starts_with(label)) {
      line = std::string(text::trim(std::string_view(line).substr(label.size())));
      break;
    }
  }
  std::string_view v = text::trim(line);
  auto strip_pair = [&](std::string_view open, std::string_view close) {
    if (v.size() >= open.size() + close.size() && v.starts_with(open) && v.ends_with(close)) {
      v = text::trim(v.substr(open.size(), v.size() - open.size() - close.size()));
    }
  };
  strip_pair("\"", "\"");
  strip_pair("\xe2\x80\x9c", "\xe2\x80\x9d");  // curly double quotes
  return std::string(v);
}

// The word-level span of `rewritten` that differs from `original`.
std::string changed_span(std::string_view original, std::string_view rewritten) {
  std::size_t prefix = 0;
  while (prefix < original.size() && prefix < rewritten.size() &&
         original[prefix] == rewritten[prefix]) {
    ++prefix;
  }
  while (prefix > 0 && rewritten[prefix - 1] != ' ') --prefix;
  std::size_t suffix = 0;
  while (suffix < original.size() - prefix && suffix < rewritten.size() - prefix &&
         original[original.size() - 1 - suffix] == rewritten[rewritten.size() - 1 - suffix]) {
    ++suffix;
  }
  std::string_view span = rewritten.substr(prefix, rewritten.size() - prefix - suffix);
  // Extend to whole words on the right.
  std::size_t end = prefix + span.size();
  while (end < rewritten.size() && std::isalpha(static_cast<unsigned char>(rewritten[end]))) ++end;
  span = text::trim(rewritten.substr(prefix, end - prefix));
  return span.empty() ? std::string(text::trim(rewritten)) : std::string(span);
}

void require_positive(const Sample& positive) {
  if (!positive.is_pun() || !positive.tuple) {
    throw ArgumentError("negatives can only be built from positive samples");
  }
}

}  // namespace

Sample build_es_negative(const Sample& positive, clients::TextGenerator& textgen,
                         std::uint64_t seed) {
  require_positive(positive);
  const PunTuple& t = *positive.tuple;
  const std::string prompt = render_prompt(
      prompts::kExplicativeSubstitution,
      {{"caption", positive.caption}, {"word", t.w_p}, {"meaning", lexres::definition_of(t.gloss_a)}});

  std::string last_problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::uint64_t attempt_seed = attempt == 0 ? seed : text::hash_combine(seed, attempt);
    auto resp = clients::generate_text(textgen, {prompt, attempt_seed});
    std::string caption = resp.refused ? std::string() : clean_caption(resp.text);
    if (caption.empty()) {
      last_problem = "empty rewrite";
    } else if (text::mentions_word(caption, t.w_p)) {
      last_problem = "rewrite still contains '" + t.w_p + "'";
    } else if (text::mentions_word(caption, t.w_a)) {
      last_problem = "rewrite contains '" + t.w_a + "'";
    } else {
      Sample s;
      s.kind = SampleKind::kNonPunEs;
      s.caption = caption;
      s.image_prompt = positive.image_prompt;
      s.image = positive.image;
      s.substitution =
          SubstitutionRecord{SubstitutionStrategy::kEs, t, positive.id,
                             changed_span(positive.caption, caption)};
      s.provenance = {textgen.name(), positive.provenance.image_model, attempt_seed};
      s.id = sample_id(s.kind, t, s.caption);
      check_sample(s);
      return s;
    }
  }
  throw SubstitutionError("explicative substitution for " + positive.id + " failed: " +
                          last_problem);
}

// ---------------------------------------------------------------------------

SubstitutePool SubstitutePool::parse(std::string_view data) {
  SubstitutePool pool;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t nl = data.find('\n', pos);
    std::string_view line =
        text::trim(data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? data.size() + 1 : nl + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = text::trim(line.substr(1));
      if (body.starts_with("version:")) {
        std::string_view num = text::trim(body.substr(8));
        std::from_chars(num.data(), num.data() + num.size(), pool.version_);
      }
      continue;
    }
    std::string noun = text::to_lower(line);
    if (std::find(pool.nouns_.begin(), pool.nouns_.end(), noun) == pool.nouns_.end()) {
      pool.nouns_.push_back(std::move(noun));
    }
  }
  return pool;
}

const SubstitutePool& SubstitutePool::bundled() {
  static const SubstitutePool pool = parse(detail::kBundledSubstitutePool);
  return pool;
}

std::string SubstitutePool::draw(std::uint64_t seed, const std::vector<std::string>& exclude) const {
  std::vector<std::size_t> order(nouns_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  text::SeededRng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t i : order) {
    const auto& noun = nouns_[i];
    bool collides = std::any_of(exclude.begin(), exclude.end(), [&](const std::string& w) {
      return text::mentions_word(noun, w) || text::mentions_word(w, noun);
    });
    if (!collides) return noun;
  }
  throw ConfigError("substitute pool exhausted: every noun collides with the pun words");
}

Sample build_rs_negative(const Sample& positive, clients::TextGenerator& textgen,
                         clients::ImageGenerator& imagegen, const SubstitutePool& pool,
                         std::uint64_t seed) {
  require_positive(positive);
  const PunTuple& t = *positive.tuple;
  const std::string entity = pool.draw(seed, {t.w_p, t.w_a});
  const std::string prompt = render_prompt(prompts::kRandomSubstitution,
                                           {{"visual", positive.image_prompt},
                                            {"caption", positive.caption},
                                            {"word", t.w_p},
                                            {"entity", entity}});

  std::string last_problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::uint64_t attempt_seed = attempt == 0 ? seed : text::hash_combine(seed, attempt);
    auto resp = clients::generate_text(textgen, {prompt, attempt_seed});
    auto visual = text::find_labeled(resp.text, "New Visual");
    auto caption = text::find_labeled(resp.text, "New Caption");
    if (resp.refused || !visual || !caption) {
      last_problem = "rewrite lacks the New Visual / New Caption lines";
      continue;
    }
    Sample s;
    s.kind = SampleKind::kNonPunRs;
    s.caption = clean_caption(*caption);
    s.image_prompt = clean_caption(*visual);
    s.substitution = SubstitutionRecord{SubstitutionStrategy::kRs, t, positive.id, entity};
    s.provenance = {textgen.name(), imagegen.name(), attempt_seed};
    s.id = sample_id(s.kind, t, s.caption);
    if (auto v = sample_violation(s); !v.empty()) {
      last_problem = v;
      continue;
    }
    s.image = imagegen.render({s.image_prompt, attempt_seed});
    return s;
  }
  throw SubstitutionError("random substitution for " + positive.id + " failed: " + last_problem);
}

// ---------------------------------------------------------------------------

std::vector<Sample> dedupe_by_diversity(const std::vector<Sample>& samples,
                                        clients::Embedder& embedder, std::size_t k) {
  if (k < 1 || k > samples.size()) {
    throw ArgumentError("k must lie in [1, " + std::to_string(samples.size()) + "]");
  }
  std::vector<std::string> texts;
  std::vector<std::string> ids;
  for (const auto& s : samples) {
    texts.push_back(s.interpretation);
    ids.push_back(s.id);
  }
  auto matrix = clients::embed(embedder, texts, ids);
  auto result = divfilter::diversity_filter(matrix, k);
  std::vector<Sample> out;
  out.reserve(result.kept_rows.size());
  for (std::size_t r : result.kept_rows) out.push_back(samples[r]);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t item_seed(std::uint64_t seed, std::string_view key) {
  return text::hash_combine(seed, text::stable_hash(key));
}

std::string tuple_key(const PunTuple& t) {
  return std::string(miner::to_string(t.kind)) + ":" + t.w_p + ":" + t.w_a + ":" + t.s_p.str() +
         ":" + t.s_a.str();
}

}  // namespace

BatchResult build_positives(const std::vector<PunTuple>& tuples, clients::TextGenerator& textgen,
                            clients::ImageGenerator& imagegen, std::uint64_t seed,
                            unsigned workers) {
  std::vector<std::optional<Sample>> slots(tuples.size());
  std::vector<std::string> errors(tuples.size());
  parallel_for(tuples.size(), workers, [&](std::size_t i) {
    try {
      slots[i] = build_positive(tuples[i], textgen, imagegen, item_seed(seed, tuple_key(tuples[i])));
    } catch (const Error& e) {
      errors[i] = tuple_key(tuples[i]) + ": " + e.what();
    }
  });

  BatchResult out;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      out.failures.push_back(errors[i]);
      continue;
    }
    if (seen.count(slots[i]->id)) {
      out.failures.push_back(tuple_key(tuples[i]) + ": duplicate of sample " + slots[i]->id);
      continue;
    }
    seen[slots[i]->id] = i;
    out.samples.push_back(std::move(*slots[i]));
  }
  return out;
}

BatchResult build_negatives(const std::vector<Sample>& samples, clients::TextGenerator& textgen,
                            clients::ImageGenerator& imagegen, const SubstitutePool& pool,
                            std::uint64_t seed, unsigned workers) {
  std::vector<const Sample*> positives;
  for (const auto& s : samples) {
    if (s.is_pun()) positives.push_back(&s);
  }

  struct Triple {
    std::optional<Sample> es, rs;
    std::string error;
  };
  std::vector<Triple> slots(positives.size());
  parallel_for(positives.size(), workers, [&](std::size_t i) {
    const Sample& p = *positives[i];
    try {
      slots[i].es = build_es_negative(p, textgen, item_seed(seed, p.id + ":es"));
      slots[i].rs = build_rs_negative(p, textgen, imagegen, pool, item_seed(seed, p.id + ":rs"));
    } catch (const Error& e) {
      slots[i].error = p.id + ": " + e.what();
    }
  });

  BatchResult out;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (!slots[i].es || !slots[i].rs) {
      out.failures.push_back(slots[i].error);
      continue;
    }
    out.samples.push_back(*positives[i]);
    out.samples.push_back(std::move(*slots[i].es));
    out.samples.push_back(std::move(*slots[i].rs));
  }
  return out;
}

}  // namespace multipun::pipeline
