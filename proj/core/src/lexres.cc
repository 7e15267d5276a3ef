#include "multipun/lexres.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::lexres {

namespace {

constexpr std::array<std::string_view, 15> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
constexpr std::array<std::string_view, 24> kConsonants = {
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};

constexpr std::array<std::string_view, 45> kLexnames = {
    "adj.all",           "adj.pert",        "adv.all",          "noun.Tops",
    "noun.act",          "noun.animal",     "noun.artifact",    "noun.attribute",
    "noun.body",         "noun.cognition",  "noun.communication", "noun.event",
    "noun.feeling",      "noun.food",       "noun.group",       "noun.location",
    "noun.motive",       "noun.object",     "noun.person",      "noun.phenomenon",
    "noun.plant",        "noun.possession", "noun.process",     "noun.quantity",
    "noun.relation",     "noun.shape",      "noun.state",       "noun.substance",
    "noun.time",         "verb.body",       "verb.change",      "verb.cognition",
    "verb.communication", "verb.competition", "verb.consumption", "verb.contact",
    "verb.creation",     "verb.emotion",    "verb.motion",      "verb.perception",
    "verb.possession",   "verb.social",     "verb.stative",     "verb.weather",
    "adj.ppl"};

constexpr std::array<std::string_view, 6> kVisualLexnames = {
    "noun.animal", "noun.artifact", "noun.body",
    "noun.food",   "noun.object",   "noun.plant"};

// Noun detachment rules, applied in this order.
constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kNounRules = {{
    {"s", ""},
    {"ses", "s"},
    {"xes", "x"},
    {"zes", "z"},
    {"ches", "ch"},
    {"shes", "sh"},
    {"men", "man"},
    {"ies", "y"},
}};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& arr, std::string_view s) {
  return std::find(arr.begin(), arr.end(), s) != arr.end();
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Strips a trailing "(n)" alternate marker.
std::string_view base_word(std::string_view token) {
  if (token.size() < 3 || token.back() != ')') return token;
  std::size_t open = token.rfind('(');
  if (open == std::string_view::npos || open == 0) return token;
  std::string_view digits = token.substr(open + 1, token.size() - open - 2);
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return token;
  }
  return token.substr(0, open);
}

}  // namespace

// ---------------------------------------------------------------------------

bool is_arpabet_vowel(std::string_view base_symbol) { return contains(kVowels, base_symbol); }

bool is_arpabet_symbol(std::string_view symbol) {
  if (symbol.empty()) return false;
  char last = symbol.back();
  if (last == '0' || last == '1' || last == '2') {
    return is_arpabet_vowel(symbol.substr(0, symbol.size() - 1));
  }
  return is_arpabet_vowel(symbol) || contains(kConsonants, symbol);
}

Pronunciation::Pronunciation(std::vector<std::string> phonemes) : phonemes_(std::move(phonemes)) {
  if (phonemes_.empty()) throw ArgumentError("empty pronunciation");
  for (const auto& p : phonemes_) {
    if (!is_arpabet_symbol(p)) throw ArgumentError("unknown phoneme '" + p + "'");
  }
}

std::string Pronunciation::str() const {
  std::string out;
  for (const auto& p : phonemes_) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

void PronDict::add(std::string_view word, Pronunciation pron) {
  auto& list = entries_[text::to_lower(word)];
  if (std::find(list.begin(), list.end(), pron) == list.end()) list.push_back(std::move(pron));
}

const std::vector<Pronunciation>* PronDict::find(std::string_view word) const {
  auto it = entries_.find(text::to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string PronDict::serialize() const {
  std::ostringstream out;
  out << ";;; multipun pronouncing dictionary\n";
  for (const auto& [word, prons] : entries_) {
    for (std::size_t k = 0; k < prons.size(); ++k) {
      out << word;
      if (k > 0) out << '(' << (k + 1) << ')';
      out << "  " << prons[k].str() << '\n';
    }
  }
  return out.str();
}

PronDict parse_pron_dict(std::string_view text) {
  PronDict dict;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    line = text::trim(line);
    if (line.empty() || line.starts_with(";;;")) continue;
    // cmudict.dict style trailing comments: "word  W ER1 D # note"
    if (std::size_t hash = line.find(" #"); hash != std::string_view::npos) {
      line = text::trim(line.substr(0, hash));
    }

    auto fields = split_ws(line);
    std::string_view word = base_word(fields.front());
    if (fields.size() < 2) {
      throw ParseError("no phonemes for '" + std::string(word) + "'", line_no);
    }
    std::vector<std::string> phonemes;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!is_arpabet_symbol(fields[i])) {
        throw ParseError("unknown phoneme '" + std::string(fields[i]) + "' for '" +
                             std::string(word) + "'",
                         line_no);
      }
      phonemes.emplace_back(fields[i]);
    }
    dict.add(word, Pronunciation(std::move(phonemes)));
  }
  return dict;
}

bool are_homophones(const PronDict& dict, std::string_view w1, std::string_view w2) {
  const auto* p1 = dict.find(w1);
  if (!p1) throw LookupError("word not in pronouncing dictionary: " + std::string(w1));
  const auto* p2 = dict.find(w2);
  if (!p2) throw LookupError("word not in pronouncing dictionary: " + std::string(w2));
  if (text::to_lower(w1) == text::to_lower(w2)) return false;
  for (const auto& a : *p1) {
    if (std::find(p2->begin(), p2->end(), a) != p2->end()) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

void FrequencyTable::set(std::string_view word, double zipf_value) {
  if (!std::isfinite(zipf_value) || zipf_value < 0.0) {
    throw ArgumentError("invalid Zipf value for '" + std::string(word) + "'");
  }
  auto [it, inserted] = entries_.emplace(text::to_lower(word), zipf_value);
  if (!inserted) it->second = std::max(it->second, zipf_value);
}

void FrequencyTable::erase(std::string_view word) { entries_.erase(text::to_lower(word)); }

FrequencyTable parse_frequency_table(std::string_view text) {
  FrequencyTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_ws(line);
    if (fields.size() != 2) throw ParseError("expected 'word<TAB>zipf'", line_no);
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), value);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw ParseError("bad Zipf value '" + std::string(fields[1]) + "'", line_no);
    }
    if (!std::isfinite(value) || value < 0.0) {
      throw ParseError("Zipf value out of range '" + std::string(fields[1]) + "'", line_no);
    }
    table.set(fields[0], value);
  }
  return table;
}

std::optional<double> zipf(const FrequencyTable& table, std::string_view word) {
  auto it = table.entries_.find(text::to_lower(word));
  if (it == table.entries_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

std::string_view lexname_for_file_number(int number) {
  if (number < 0 || number >= static_cast<int>(kLexnames.size())) {
    throw LookupError("unknown lexical file number " + std::to_string(number));
  }
  return kLexnames[static_cast<std::size_t>(number)];
}

LexnameClass classify_lexname(std::string_view lexname) {
  return contains(kVisualLexnames, lexname) ? LexnameClass::kVisual : LexnameClass::kAbstract;
}

std::span<const std::string_view> visual_lexnames() { return kVisualLexnames; }

double path_similarity(const WordNetDb& db, SynsetId a, SynsetId b) {
  int d = db.path_length(a, b);
  return 1.0 / (static_cast<double>(d) + 1.0);
}

std::vector<std::string> lemmatize(const WordNetDb& db, std::string_view form) {
  std::string word = text::to_lower(text::trim(form));
  std::replace(word.begin(), word.end(), ' ', '_');
  if (word.empty()) return {};

  std::vector<std::string> candidates{word};
  if (const auto* bases = db.exception_bases(word)) {
    candidates.insert(candidates.end(), bases->begin(), bases->end());
  } else {
    for (const auto& [suffix, ending] : kNounRules) {
      if (word.size() > suffix.size() && word.ends_with(suffix)) {
        candidates.push_back(word.substr(0, word.size() - suffix.size()) + std::string(ending));
      }
    }
  }

  std::vector<std::string> out;
  for (auto& c : candidates) {
    if (db.indexed(c) && std::find(out.begin(), out.end(), c) == out.end()) {
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace multipun::lexres
