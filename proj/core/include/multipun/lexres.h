#pragma once

// Lexical resources: pronouncing dictionary, Zipf frequency table and the
// WordNet noun database, plus morphy-style lemmatization and path similarity.
// All types are immutable once built and safe to share between threads.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace multipun::lexres {

// ---------------------------------------------------------------------------
// Pronunciations

// True for a bare ARPAbet symbol ("EH") or a vowel with stress ("EH1").
bool is_arpabet_symbol(std::string_view symbol);
bool is_arpabet_vowel(std::string_view base_symbol);

class Pronunciation {
 public:
  // Throws ArgumentError on an empty sequence or an invalid symbol.
  explicit Pronunciation(std::vector<std::string> phonemes);

  const std::vector<std::string>& phonemes() const { return phonemes_; }
  std::string str() const;

  auto operator<=>(const Pronunciation&) const = default;

 private:
  std::vector<std::string> phonemes_;
};

class PronDict {
 public:
  // Adds a pronunciation under the lowercased word; duplicates are dropped.
  void add(std::string_view word, Pronunciation pron);

  // nullptr when the word is absent.
  const std::vector<Pronunciation>* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<Pronunciation>>& entries() const { return entries_; }

  // Dictionary text in the input format; alternates are written as WORD(2)...
  std::string serialize() const;

  bool operator==(const PronDict&) const = default;

 private:
  std::map<std::string, std::vector<Pronunciation>> entries_;
};

// `WORD  PH1 PH2 ...` lines, `;;;` comments, `WORD(n)` alternates.
PronDict parse_pron_dict(std::string_view text);

// True iff the spellings differ (case-insensitively) and some pronunciation
// of w1 equals some pronunciation of w2, stress digits included.
// Throws LookupError when either word is absent.
bool are_homophones(const PronDict& dict, std::string_view w1, std::string_view w2);

// ---------------------------------------------------------------------------
// Word frequencies

class FrequencyTable {
 public:
  // Stores the Zipf value under the lowercased word. Throws ArgumentError for
  // negative or non-finite values. A repeated word keeps the larger value.
  void set(std::string_view word, double zipf);
  void erase(std::string_view word);

  const std::unordered_map<std::string, double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  friend std::optional<double> zipf(const FrequencyTable&, std::string_view);
  std::unordered_map<std::string, double> entries_;
};

// `word<TAB>zipf` per line, `#` comments.
FrequencyTable parse_frequency_table(std::string_view text);

// Case-insensitive; absent words yield nullopt.
std::optional<double> zipf(const FrequencyTable& table, std::string_view word);

// ---------------------------------------------------------------------------
// WordNet

struct SynsetId {
  std::uint32_t offset = 0;
  char pos = 'n';

  // "02855782-n"
  std::string str() const;
  static SynsetId parse(std::string_view s);

  auto operator<=>(const SynsetId&) const = default;
};

// Lexical-file name for a WordNet lex_filenum ("noun.artifact" for 6).
// Throws LookupError outside 0..44.
std::string_view lexname_for_file_number(int number);

enum class LexnameClass { kVisual, kAbstract };

// Visual = {noun.animal, noun.artifact, noun.body, noun.food, noun.object,
// noun.plant}; every other lexical file is Abstract.
LexnameClass classify_lexname(std::string_view lexname);
inline bool is_visual_lexname(std::string_view lexname) {
  return classify_lexname(lexname) == LexnameClass::kVisual;
}
std::span<const std::string_view> visual_lexnames();

// A gloss without its quoted usage examples ("; \"...\"").
std::string definition_of(std::string_view gloss);

struct Synset {
  SynsetId id;
  std::vector<std::string> lemmas;   // lowercased, underscores kept
  std::string lexname;
  std::string gloss;                 // everything after '|', trimmed
  std::vector<SynsetId> hypernyms;   // '@' and '@i' pointers
  std::vector<int> sense_ranks;      // parallel to lemmas; 0 if not indexed

  // The gloss without its quoted usage examples.
  std::string definition() const;
  // 1 = most frequent sense of `lemma`; 0 when the lemma is not indexed here.
  int sense_rank(std::string_view lemma) const;
};

class WordNetDb {
 public:
  // Parses standard index.noun / data.noun text; `exceptions_text` is the
  // optional noun.exc list. Throws ParseError on malformed lines and
  // IntegrityError on dangling offsets or hypernym cycles.
  static WordNetDb parse(std::string_view index_text, std::string_view data_text,
                         std::string_view exceptions_text = {});
  // Reads index.noun, data.noun and (if present) noun.exc from `dir`.
  static WordNetDb load_dir(const std::string& dir);

  const Synset& synset(SynsetId id) const;  // LookupError when absent
  const Synset* find(SynsetId id) const;
  // Senses of `lemma` in WordNet order; empty when not indexed.
  std::span<const SynsetId> senses(std::string_view lemma) const;
  bool indexed(std::string_view lemma) const;
  // Base forms listed for an irregular inflection; nullptr when none.
  const std::vector<std::string>* exception_bases(std::string_view form) const;

  const std::map<std::string, std::vector<SynsetId>>& index() const { return index_; }
  const std::map<SynsetId, Synset>& synsets() const { return synsets_; }

  // Shortest path length between two synsets in the undirected hypernym
  // graph with one virtual root joined to every synset lacking hypernyms.
  int path_length(SynsetId a, SynsetId b) const;

 private:
  std::map<std::string, std::vector<SynsetId>> index_;
  std::map<SynsetId, Synset> synsets_;
  std::map<std::string, std::vector<std::string>> exceptions_;

  // Dense undirected adjacency; node synsets_.size() is the virtual root.
  std::map<SynsetId, int> node_of_;
  std::vector<std::vector<int>> adjacency_;

  void build_graph();
  void check_acyclic() const;
};

inline WordNetDb parse_wordnet(std::string_view index_text, std::string_view data_text) {
  return WordNetDb::parse(index_text, data_text);
}

// 1 / (d + 1) with d from WordNetDb::path_length; 1.0 when a == b.
double path_similarity(const WordNetDb& db, SynsetId a, SynsetId b);

// WordNet noun morphy: exception list first, otherwise the form itself plus
// one application of each detachment rule, keeping indexed candidates only.
std::vector<std::string> lemmatize(const WordNetDb& db, std::string_view form);

}  // namespace multipun::lexres

template <>
struct std::hash<multipun::lexres::SynsetId> {
  std::size_t operator()(const multipun::lexres::SynsetId& id) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{id.offset} << 8) |
                                      static_cast<unsigned char>(id.pos));
  }
};
