#pragma once

// Pun tuple mining over the lexical resources.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "multipun/lexres.h"

namespace multipun::miner {

enum class PunKind { kHomophonic, kHomographic };

std::string_view to_string(PunKind kind);
PunKind parse_pun_kind(std::string_view s);  // ArgumentError on anything else

// <w_p, w_a, S_p, S_a>. The glosses travel with the tuple so that downstream
// prompts do not need the WordNet database.
struct PunTuple {
  PunKind kind = PunKind::kHomophonic;
  std::string w_p;
  std::string w_a;
  lexres::SynsetId s_p;
  lexres::SynsetId s_a;
  std::string gloss_p;
  std::string gloss_a;

  bool operator==(const PunTuple&) const = default;
};

// Sort key used for deterministic output.
bool tuple_less(const PunTuple& a, const PunTuple& b);

struct MinerConfig {
  double zipf_min_homophonic = 3.0;
  double zipf_min_homographic = 3.8;
  int top_k_senses = 3;
  double path_sim_max = 0.1;
  std::set<std::string> visual_lexnames{"noun.animal", "noun.artifact", "noun.body",
                                        "noun.food",   "noun.object",   "noun.plant"};
  std::set<std::string> natural_lexnames{"noun.plant", "noun.animal"};
  int gloss_substring_min_len = 4;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

// The first `k` senses of `word` in WordNet order.
std::vector<lexres::SynsetId> top_senses(const lexres::WordNetDb& db, std::string_view word,
                                         int k);

// False when some alphabetic token of the synset's definition equals `word`
// or is at least `min_len` long and occurs inside `word`.
bool gloss_disjoint(std::string_view word, const lexres::Synset& s, int min_len = 4);

std::vector<PunTuple> mine_homophones(const lexres::PronDict& prondict,
                                      const lexres::FrequencyTable& freq,
                                      const lexres::WordNetDb& db, const MinerConfig& cfg = {});

std::vector<PunTuple> mine_homographs(const lexres::FrequencyTable& freq,
                                      const lexres::WordNetDb& db, const MinerConfig& cfg = {});

// Why a candidate homograph sense pair was rejected; kAccepted when it passes.
enum class HomographVerdict {
  kAccepted,
  kLiteralNotVisual,
  kSameLexname,
  kPathTooSimilar,
  kNaturalCategory,
  kCircularGloss,
};
std::string_view to_string(HomographVerdict v);

HomographVerdict check_homograph_senses(const lexres::WordNetDb& db, std::string_view word,
                                        lexres::SynsetId s_p, lexres::SynsetId s_a,
                                        const MinerConfig& cfg = {});

// Re-checks the type invariants of a tuple against the resources. Returns an
// empty string when valid, otherwise a description of the first violation.
std::string tuple_violation(const PunTuple& t, const lexres::PronDict* prondict,
                            const lexres::WordNetDb& db, const MinerConfig& cfg = {});

}  // namespace multipun::miner
