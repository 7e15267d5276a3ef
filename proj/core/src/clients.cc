#include "multipun/clients.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::clients {

using nlohmann::json;

std::string_view to_string(Provenance p) { return p == Provenance::kMock ? "mock" : "live"; }

TextGenResponse generate_text(TextGenerator& client, const TextGenRequest& req) {
  if (text::trim(req.prompt).empty()) throw ArgumentError("empty generation prompt");
  return client.generate(req);
}

// ---------------------------------------------------------------------------
// Mock text generator

namespace {

std::uint64_t request_hash(std::string_view prompt, std::uint64_t seed) {
  return text::hash_combine(text::stable_hash(prompt), seed);
}

// First clause of a definition, without a leading article.
std::string strip_article(std::string_view phrase) {
  std::string_view p = text::trim(phrase.substr(0, phrase.find(';')));
  for (std::string_view article : {"a ", "an ", "the "}) {
    if (p.size() > article.size() && text::to_lower(p.substr(0, article.size())) == article) {
      return std::string(text::trim(p.substr(article.size())));
    }
  }
  return std::string(p);
}

// Drops whole words that are forms of `word` from `phrase`.
std::string drop_word(std::string_view phrase, std::string_view word) {
  std::string out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    std::size_t end = phrase.find(' ', i);
    if (end == std::string_view::npos) end = phrase.size();
    std::string_view token = phrase.substr(i, end - i);
    if (!token.empty() && !text::mentions_word(token, word)) {
      if (!out.empty()) out.push_back(' ');
      out.append(token);
    }
    i = end + 1;
  }
  return out;
}

constexpr std::string_view kHomophoneCaptions[] = {
    "We make a great {w}.",          "What a {w} we turned out to be!",
    "Nobody expected such a {w}.",   "You and me, a perfect {w}.",
    "Every story needs a good {w}.", "Call it a {w} made in heaven.",
};

constexpr std::string_view kHomographCaptions[] = {
    "I'm your biggest {w}.",         "Nobody is a bigger {w} than me.",
    "Once a {w}, always a {w}.",     "Proud to be your number one {w}.",
    "Every team deserves a loyal {w}.", "You can count on this {w}.",
};

std::string fill(std::string_view pattern, std::string_view w) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern.compare(i, 3, "{w}") == 0) {
      out.append(w);
      i += 2;
    } else {
      out.push_back(pattern[i]);
    }
  }
  return out;
}

std::string creative_homophonic(std::string_view prompt, std::uint64_t h, bool omit) {
  auto a = text::find_labeled(prompt, "Word A", true);
  auto b = text::find_labeled(prompt, "Word B", true);
  if (!a || !b) return {};
  auto split = [](const std::string& v) {
    std::size_t c = v.find(':');
    if (c == std::string::npos) return std::pair<std::string, std::string>{v, ""};
    return std::pair<std::string, std::string>{std::string(text::trim(v.substr(0, c))),
                                               std::string(text::trim(v.substr(c + 1)))};
  };
  auto [wp, sp_def] = split(*a);
  auto [wa, sa_def] = split(*b);
  const auto& pattern = kHomophoneCaptions[h % std::size(kHomophoneCaptions)];
  std::string caption = fill(pattern, omit ? "thing" : wp);
  return "Image Description: A cartoon " + wp + " with a friendly face, acting out " +
         strip_article(sa_def) + ".\n" + "Caption: " + caption + "\n" +
         "Interpretation: Visual shows a " + wp + " (literal object, " + sp_def +
         ") behaving like " + strip_article(sa_def) + " (figurative behavior). The caption plays on '" +
         wp + "' sounding like '" + wa + "', two spellings with different meanings.\n";
}

std::string creative_homographic(std::string_view prompt, std::uint64_t h, bool omit) {
  auto word = text::find_labeled(prompt, "The Word", true);
  auto d1 = text::find_labeled(prompt, "Definition 1 (Visual Object)", true);
  auto d2 = text::find_labeled(prompt, "Definition 2 (Hidden Context)", true);
  if (!word || !d1 || !d2) return {};
  const auto& pattern = kHomographCaptions[h % std::size(kHomographCaptions)];
  std::string caption = fill(pattern, omit ? "thing" : *word);
  return "Image Description: A " + *word + " (" + strip_article(*d1) +
         ") shown in a scene about " + strip_article(*d2) + ".\n" + "Caption: " + caption + "\n" +
         "Interpretation: Visual shows a " + *word + " as " + strip_article(*d1) +
         " (literal object); the caption uses '" + *word + "' as " + strip_article(*d2) +
         " (figurative behavior), so one spelling carries both meanings.\n";
}

std::string explicative(std::string_view prompt) {
  auto caption = text::find_labeled(prompt, "Original Caption");
  auto word = text::find_labeled(prompt, "Pun Word (w_p)");
  auto meaning = text::find_labeled(prompt, "Hidden Meaning (S_a)");
  if (!caption || !word || !meaning) return {};
  std::string phrase = drop_word(strip_article(*meaning), *word);
  if (phrase.empty()) phrase = "one";
  return text::replace_word(*caption, *word, phrase);
}

std::string random_substitution(std::string_view prompt) {
  auto visual = text::find_labeled(prompt, "Original Image Prompt");
  auto caption = text::find_labeled(prompt, "Original Caption");
  auto word = text::find_labeled(prompt, "Pun Word (w_p)");
  auto entity = text::find_labeled(prompt, "Use this random entity");
  if (!visual || !caption || !word || !entity) return {};
  return "New Visual: " + text::replace_word(*visual, *word, *entity) + "\n" +
         "New Caption: " + text::replace_word(*caption, *word, *entity) + "\n";
}

}  // namespace

TextGenResponse MockTextGenerator::generate(const TextGenRequest& req) {
  const std::uint64_t h = request_hash(req.prompt, req.seed);
  std::string out;
  if (req.prompt.find("Explicative Substitution variant") != std::string::npos) {
    out = explicative(req.prompt);
  } else if (req.prompt.find("Random Substitution variant") != std::string::npos) {
    out = random_substitution(req.prompt);
  } else if (req.prompt.find("**Homophones**") != std::string::npos) {
    out = creative_homophonic(req.prompt, h, omit_pun_word_);
  } else if (req.prompt.find("**Homographic Puns**") != std::string::npos) {
    out = creative_homographic(req.prompt, h, omit_pun_word_);
  }
  if (out.empty()) out = "Mock completion " + text::hex64(h);
  return {std::move(out), Provenance::kMock, false};
}

// ---------------------------------------------------------------------------
// Images

ImageStore::ImageStore(std::filesystem::path root, std::string extension)
    : root_(std::move(root)), extension_(std::move(extension)) {}

std::filesystem::path ImageStore::path_of(const ImageRef& ref) const {
  if (ref.sha256.size() < 2) throw ArgumentError("malformed image address");
  return root_ / ref.sha256.substr(0, 2) / (ref.sha256 + "." + extension_);
}

ImageRef ImageStore::put(std::string_view bytes) {
  ImageRef ref{text::sha256_hex(bytes), bytes.size()};
  auto path = path_of(ref);
  std::lock_guard lock(mu_);
  if (!std::filesystem::exists(path)) {
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    text::write_file(tmp.string(), bytes);
    std::filesystem::rename(tmp, path);
  }
  return ref;
}

bool ImageStore::contains(const ImageRef& ref) const {
  std::error_code ec;
  auto path = path_of(ref);
  return std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) == ref.bytes;
}

std::string ImageStore::get(const ImageRef& ref) const {
  auto path = path_of(ref);
  if (!std::filesystem::exists(path)) throw LookupError("image " + ref.sha256 + " not in store");
  return text::read_file(path.string());
}

std::string MockImageGenerator::render_bytes(const ImageGenRequest& req) const {
  std::string out = "P6\n" + std::to_string(size_) + " " + std::to_string(size_) + "\n255\n";
  std::uint64_t state = request_hash(req.description, req.seed);
  const std::size_t pixels = static_cast<std::size_t>(size_) * static_cast<std::size_t>(size_);
  for (std::size_t p = 0; p < pixels; ++p) {
    state = text::hash_combine(state, p);
    out.push_back(static_cast<char>(state & 0xff));
    out.push_back(static_cast<char>((state >> 8) & 0xff));
    out.push_back(static_cast<char>((state >> 16) & 0xff));
  }
  return out;
}

ImageRef MockImageGenerator::render(const ImageGenRequest& req) {
  if (text::trim(req.description).empty()) throw ArgumentError("empty image description");
  std::string bytes = render_bytes(req);
  if (store_) return store_->put(bytes);
  return {text::sha256_hex(bytes), bytes.size()};
}

// ---------------------------------------------------------------------------
// Embeddings

std::vector<double> MockEmbedder::embed_one(std::string_view input) const {
  std::string padded = " " + text::to_lower(text::trim(input)) + " ";
  std::vector<double> v(dim_, 0.0);
  if (padded.size() < 3) {
    v[text::stable_hash(padded) % dim_] = 1.0;
    return v;
  }
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    v[text::stable_hash(std::string_view(padded).substr(i, 3)) % dim_] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> MockEmbedder::embed_rows(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> rows;
  rows.reserve(texts.size());
  for (const auto& t : texts) rows.push_back(embed_one(t));
  return rows;
}

divfilter::EmbeddingMatrix embed(Embedder& client, const std::vector<std::string>& texts,
                                 std::vector<std::string> ids) {
  if (texts.empty()) throw ArgumentError("embed needs at least one text");
  if (ids.empty()) {
    for (std::size_t i = 0; i < texts.size(); ++i) ids.push_back(std::to_string(i));
  }
  auto rows = client.embed_rows(texts);
  if (rows.size() != texts.size()) {
    throw DomainError("embedder returned " + std::to_string(rows.size()) + " rows for " +
                      std::to_string(texts.size()) + " texts");
  }
  return divfilter::EmbeddingMatrix(std::move(ids), std::move(rows));
}

// ---------------------------------------------------------------------------
// Mock subject

std::string MockSubject::name() const {
  switch (mode_) {
    case Mode::kAlwaysPun: return "mock-subject:always-pun";
    case Mode::kNeverPun: return "mock-subject:never-pun";
    case Mode::kFollowsBias: return "mock-subject:follows-bias";
    case Mode::kHashed: return "mock-subject:hashed";
  }
  return "mock-subject";
}

std::string MockSubject::answer(const SubjectQuery& q) {
  const bool inverted = q.prompt.find("**Non-Pun**") != std::string::npos;
  const bool wants_explanation = q.prompt.find("\"explanation\":") != std::string::npos;
  const bool wants_tuple = q.prompt.find("\"tuple\":") != std::string::npos;
  const std::uint64_t h = request_hash(q.prompt, q.seed);

  bool pun = true;
  switch (mode_) {
    case Mode::kAlwaysPun: pun = true; break;
    case Mode::kNeverPun: pun = false; break;
    case Mode::kFollowsBias: pun = !inverted; break;
    case Mode::kHashed: pun = (h % 10) < 6; break;
  }
  if (!pun) return R"({"is_pun": false})";

  json out = {{"is_pun", true}};
  if (!wants_tuple) return out.dump();

  std::string caption = text::find_labeled(q.prompt, "Caption").value_or("");
  std::vector<std::string> words;
  for (auto& t : text::alpha_tokens(caption)) {
    if (t.size() >= 3) words.push_back(std::move(t));
  }
  std::string word = words.empty() ? "pun" : words[(h >> 8) % words.size()];
  out["type"] = "Homographic";
  if (wants_explanation) {
    out["explanation"] = "The caption plays on two meanings of '" + word + "'.";
  }
  json tuple = {{"wp", word}, {"wa", word}};
  if (wants_explanation) {
    tuple["Sp"] = "the object shown in the image";
    tuple["Sa"] = "the meaning suggested by the caption";
  }
  out["tuple"] = tuple;
  return out.dump();
}

// ---------------------------------------------------------------------------
// Judge

std::string_view to_string(JudgeVerdict v) {
  switch (v) {
    case JudgeVerdict::kWin: return "win";
    case JudgeVerdict::kTie: return "tie";
    case JudgeVerdict::kLoss: return "loss";
  }
  return "?";
}

JudgeSlot parse_judge_output(std::string_view raw) {
  std::string lower = text::to_lower(raw);
  lower.erase(std::remove(lower.begin(), lower.end(), '*'), lower.end());
  std::size_t at = lower.find("winner:");
  if (at == std::string::npos) throw JudgeFormatError("judge output has no WINNER line");
  std::string_view rest = text::trim(std::string_view(lower).substr(at + 7));
  auto word_is = [&](std::string_view w) {
    return rest.starts_with(w) &&
           (rest.size() == w.size() || !std::isalnum(static_cast<unsigned char>(rest[w.size()])));
  };
  if (word_is("tie")) return JudgeSlot::kTie;
  if (word_is("a")) return JudgeSlot::kA;
  if (word_is("b")) return JudgeSlot::kB;
  throw JudgeFormatError("unrecognised judge verdict '" + std::string(rest.substr(0, 16)) + "'");
}

JudgeVerdict verdict_for_candidate(JudgeSlot slot, bool candidate_in_a) {
  if (slot == JudgeSlot::kTie) return JudgeVerdict::kTie;
  const bool a_won = slot == JudgeSlot::kA;
  return a_won == candidate_in_a ? JudgeVerdict::kWin : JudgeVerdict::kLoss;
}

bool candidate_goes_first(std::string_view caption, std::uint64_t seed) {
  return (request_hash(caption, seed) & 1) == 0;
}

std::string LlmJudge::build_prompt(std::string_view caption, std::string_view explanation_a,
                                   std::string_view explanation_b) {
  std::string p =
      "You compare two explanations of the same multimodal pun.\n\n"
      "Caption: ";
  p.append(caption);
  p += "\n\nExplanation A: ";
  p.append(explanation_a);
  p += "\n\nExplanation B: ";
  p.append(explanation_b);
  p +=
      "\n\nDecide which explanation better identifies the pun word, both of its meanings and "
      "how the image and the caption combine them. Ignore length and style.\n"
      "Answer with exactly one line: WINNER: A, WINNER: B or WINNER: TIE.\n";
  return p;
}

JudgeVerdict LlmJudge::judge(const std::string& caption, const std::string& candidate,
                             const std::string& reference, std::uint64_t seed) {
  const bool first = candidate_goes_first(caption, seed);
  std::string prompt = first ? build_prompt(caption, candidate, reference)
                             : build_prompt(caption, reference, candidate);
  auto resp = generate_text(*gen_, {prompt, seed});
  if (resp.refused) throw JudgeFormatError("judge refused to answer");
  return verdict_for_candidate(parse_judge_output(resp.text), first);
}

JudgeVerdict judge_pair(PairJudge& judge, const std::string& caption,
                        const std::string& candidate, const std::string& reference,
                        std::uint64_t seed) {
  if (text::trim(candidate).empty() || text::trim(reference).empty()) {
    throw ArgumentError("judge_pair needs two non-empty explanations");
  }
  return judge.judge(caption, candidate, reference, seed);
}

}  // namespace multipun::clients
