#include "multipun/miner.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::miner {

using lexres::SynsetId;
using lexres::WordNetDb;

std::string_view to_string(PunKind kind) {
  return kind == PunKind::kHomophonic ? "homophonic" : "homographic";
}

PunKind parse_pun_kind(std::string_view s) {
  std::string lower = text::to_lower(s);
  if (lower == "homophonic") return PunKind::kHomophonic;
  if (lower == "homographic") return PunKind::kHomographic;
  throw ArgumentError("unknown pun kind '" + std::string(s) + "'");
}

bool tuple_less(const PunTuple& a, const PunTuple& b) {
  return std::tie(a.w_p, a.w_a, a.s_p, a.s_a, a.kind) <
         std::tie(b.w_p, b.w_a, b.s_p, b.s_a, b.kind);
}

void MinerConfig::validate() const {
  if (!(path_sim_max > 0.0 && path_sim_max < 1.0)) {
    throw ConfigError("path_sim_max must lie in (0, 1)");
  }
  if (top_k_senses < 1) throw ConfigError("top_k_senses must be >= 1");
  if (gloss_substring_min_len < 1) throw ConfigError("gloss_substring_min_len must be >= 1");
  if (!std::isfinite(zipf_min_homophonic) || !std::isfinite(zipf_min_homographic)) {
    throw ConfigError("Zipf thresholds must be finite");
  }
  for (const auto& name : visual_lexnames) {
    if (!name.starts_with("noun.")) throw ConfigError("visual lexname '" + name + "' is not a noun file");
  }
}

namespace {

// Senses of a surface form: its own index entry if present, otherwise the
// senses of its morphological base forms, in order and without repeats.
std::vector<SynsetId> word_senses(const WordNetDb& db, std::string_view word) {
  std::vector<SynsetId> out;
  for (const auto& lemma : lexres::lemmatize(db, word)) {
    for (const auto& id : db.senses(lemma)) {
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
  }
  return out;
}

bool above(const lexres::FrequencyTable& freq, std::string_view word, double threshold) {
  auto z = lexres::zipf(freq, word);
  return z.has_value() && *z > threshold;
}

bool lemma_overlap(const WordNetDb& db, const std::string& a, const std::string& b) {
  auto la = lexres::lemmatize(db, a);
  auto lb = lexres::lemmatize(db, b);
  if (std::find(la.begin(), la.end(), b) != la.end()) return true;
  if (std::find(lb.begin(), lb.end(), a) != lb.end()) return true;
  for (const auto& x : la) {
    if (std::find(lb.begin(), lb.end(), x) != lb.end()) return true;
  }
  return false;
}

}  // namespace

std::vector<SynsetId> top_senses(const WordNetDb& db, std::string_view word, int k) {
  auto senses = word_senses(db, word);
  if (k >= 0 && senses.size() > static_cast<std::size_t>(k)) senses.resize(static_cast<std::size_t>(k));
  return senses;
}

bool gloss_disjoint(std::string_view word, const lexres::Synset& s, int min_len) {
  std::string w = text::to_lower(word);
  for (const auto& token : text::alpha_tokens(s.definition())) {
    if (token == w) return false;
    if (static_cast<int>(token.size()) >= min_len && w.find(token) != std::string::npos) {
      return false;
    }
  }
  return true;
}

std::vector<PunTuple> mine_homophones(const lexres::PronDict& prondict,
                                      const lexres::FrequencyTable& freq, const WordNetDb& db,
                                      const MinerConfig& cfg) {
  cfg.validate();

  // (i) group spellings by exact pronunciation.
  std::map<lexres::Pronunciation, std::vector<std::string>> groups;
  for (const auto& [word, prons] : prondict.entries()) {
    for (const auto& p : prons) groups[p].push_back(word);
  }

  std::set<std::pair<std::string, std::string>> seen;
  std::vector<PunTuple> out;
  for (const auto& [pron, words] : groups) {
    for (const auto& w_p : words) {
      for (const auto& w_a : words) {
        if (w_p == w_a || !seen.emplace(w_p, w_a).second) continue;
        // (ii) frequency on both sides.
        if (!above(freq, w_p, cfg.zipf_min_homophonic) ||
            !above(freq, w_a, cfg.zipf_min_homophonic)) {
          continue;
        }
        // (iii) dominant senses only.
        auto senses_p = top_senses(db, w_p, cfg.top_k_senses);
        auto senses_a = top_senses(db, w_a, cfg.top_k_senses);
        if (senses_a.empty()) continue;
        // (iv) a concrete visual anchor for the pun word.
        auto anchor = std::find_if(senses_p.begin(), senses_p.end(), [&](const SynsetId& id) {
          return cfg.visual_lexnames.count(db.synset(id).lexname) > 0;
        });
        if (anchor == senses_p.end()) continue;
        // (v) no trivial morphological variants.
        if (lemma_overlap(db, w_p, w_a)) continue;

        PunTuple t;
        t.kind = PunKind::kHomophonic;
        t.w_p = w_p;
        t.w_a = w_a;
        t.s_p = *anchor;
        t.s_a = senses_a.front();
        t.gloss_p = db.synset(t.s_p).gloss;
        t.gloss_a = db.synset(t.s_a).gloss;
        out.push_back(std::move(t));
      }
    }
  }
  std::sort(out.begin(), out.end(), tuple_less);
  return out;
}

std::string_view to_string(HomographVerdict v) {
  switch (v) {
    case HomographVerdict::kAccepted: return "accepted";
    case HomographVerdict::kLiteralNotVisual: return "literal sense not visual";
    case HomographVerdict::kSameLexname: return "same lexical file";
    case HomographVerdict::kPathTooSimilar: return "senses too close in hypernym graph";
    case HomographVerdict::kNaturalCategory: return "natural-category metonymy";
    case HomographVerdict::kCircularGloss: return "gloss contains the target word";
  }
  return "unknown";
}

HomographVerdict check_homograph_senses(const WordNetDb& db, std::string_view word, SynsetId s_p,
                                        SynsetId s_a, const MinerConfig& cfg) {
  const auto& sp = db.synset(s_p);
  const auto& sa = db.synset(s_a);
  if (!cfg.visual_lexnames.count(sp.lexname)) return HomographVerdict::kLiteralNotVisual;
  if (sp.lexname == sa.lexname) return HomographVerdict::kSameLexname;
  if (!(lexres::path_similarity(db, s_p, s_a) < cfg.path_sim_max)) {
    return HomographVerdict::kPathTooSimilar;
  }
  if (cfg.natural_lexnames.count(sp.lexname) && cfg.natural_lexnames.count(sa.lexname)) {
    return HomographVerdict::kNaturalCategory;
  }
  if (!gloss_disjoint(word, sp, cfg.gloss_substring_min_len) ||
      !gloss_disjoint(word, sa, cfg.gloss_substring_min_len)) {
    return HomographVerdict::kCircularGloss;
  }
  return HomographVerdict::kAccepted;
}

std::vector<PunTuple> mine_homographs(const lexres::FrequencyTable& freq, const WordNetDb& db,
                                      const MinerConfig& cfg) {
  cfg.validate();

  std::vector<std::string> words;
  for (const auto& [word, z] : freq.entries()) {
    if (z > cfg.zipf_min_homographic && db.indexed(word)) words.push_back(word);
  }
  std::sort(words.begin(), words.end());

  std::vector<PunTuple> out;
  for (const auto& word : words) {
    auto senses = top_senses(db, word, cfg.top_k_senses);
    for (std::size_t i = 0; i < senses.size(); ++i) {
      for (std::size_t j = 0; j < senses.size(); ++j) {
        if (i == j) continue;
        if (check_homograph_senses(db, word, senses[i], senses[j], cfg) !=
            HomographVerdict::kAccepted) {
          continue;
        }
        PunTuple t;
        t.kind = PunKind::kHomographic;
        t.w_p = word;
        t.w_a = word;
        t.s_p = senses[i];
        t.s_a = senses[j];
        t.gloss_p = db.synset(t.s_p).gloss;
        t.gloss_a = db.synset(t.s_a).gloss;
        out.push_back(std::move(t));
      }
    }
  }
  std::sort(out.begin(), out.end(), tuple_less);
  return out;
}

std::string tuple_violation(const PunTuple& t, const lexres::PronDict* prondict,
                            const WordNetDb& db, const MinerConfig& cfg) {
  const auto* sp = db.find(t.s_p);
  const auto* sa = db.find(t.s_a);
  if (!sp || !sa) return "tuple references an unknown synset";
  if (!cfg.visual_lexnames.count(sp->lexname)) return "S_p lexname " + sp->lexname + " is not visual";
  if (t.kind == PunKind::kHomophonic) {
    if (text::to_lower(t.w_p) == text::to_lower(t.w_a)) return "homophonic tuple with equal spellings";
    if (prondict) {
      try {
        if (!lexres::are_homophones(*prondict, t.w_p, t.w_a)) return "words are not homophones";
      } catch (const LookupError& e) {
        return e.what();
      }
    }
  } else {
    if (t.w_p != t.w_a) return "homographic tuple with differing words";
    if (t.s_p == t.s_a) return "homographic tuple with identical senses";
    if (sp->lexname == sa->lexname) return "homographic senses share a lexical file";
    if (!(lexres::path_similarity(db, t.s_p, t.s_a) < cfg.path_sim_max)) {
      return "homographic senses too similar";
    }
  }
  return {};
}

}  // namespace multipun::miner
