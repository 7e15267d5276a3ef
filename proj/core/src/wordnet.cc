#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>

#include "multipun/error.h"
#include "multipun/lexres.h"
#include "multipun/text.h"

namespace multipun::lexres {

namespace {

struct LineCursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  bool next(std::string_view& line) {
    if (pos > text.size() || (pos == text.size() && pos != 0)) return false;
    std::size_t nl = text.find('\n', pos);
    line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return true;
  }
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// WordNet license preamble lines start with a space.
bool is_preamble(std::string_view line) { return line.empty() || line.front() == ' '; }

template <typename T>
T parse_number(std::string_view token, int base, const char* what, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, base);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(token) + "'", line_no);
  }
  return value;
}

std::string_view at(const std::vector<std::string_view>& fields, std::size_t i,
                    std::size_t line_no) {
  if (i >= fields.size()) throw ParseError("truncated line", line_no);
  return fields[i];
}

}  // namespace

std::string SynsetId::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08u-%c", offset, pos);
  return buf;
}

SynsetId SynsetId::parse(std::string_view s) {
  std::size_t dash = s.find('-');
  if (dash == std::string_view::npos || dash + 2 != s.size()) {
    throw ArgumentError("bad synset id '" + std::string(s) + "'");
  }
  SynsetId id;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + dash, id.offset);
  if (ec != std::errc() || ptr != s.data() + dash) {
    throw ArgumentError("bad synset id '" + std::string(s) + "'");
  }
  id.pos = s.back();
  return id;
}

std::string definition_of(std::string_view gloss) {
  std::size_t cut = gloss.find("; \"");
  if (cut == std::string_view::npos && gloss.starts_with("\"")) cut = 0;
  return std::string(text::trim(gloss.substr(0, cut)));
}

std::string Synset::definition() const { return definition_of(gloss); }

int Synset::sense_rank(std::string_view lemma) const {
  std::string key = text::to_lower(lemma);
  for (std::size_t i = 0; i < lemmas.size(); ++i) {
    if (lemmas[i] == key) return sense_ranks[i];
  }
  return 0;
}

WordNetDb WordNetDb::parse(std::string_view index_text, std::string_view data_text,
                           std::string_view exceptions_text) {
  WordNetDb db;
  std::map<SynsetId, std::size_t> data_line_of;

  // data.noun: offset lex_filenum ss_type w_cnt word lex_id ... p_cnt ptr... | gloss
  LineCursor data{data_text};
  std::string_view line;
  while (data.next(line)) {
    if (is_preamble(line)) continue;
    const std::size_t ln = data.line_no;
    std::size_t bar = line.find(" | ");
    std::string_view head = line.substr(0, bar);
    std::string_view gloss = bar == std::string_view::npos ? std::string_view{} : line.substr(bar + 3);
    auto f = split_ws(head);

    Synset s;
    s.id.offset = parse_number<std::uint32_t>(at(f, 0, ln), 10, "synset offset", ln);
    int lex_file = parse_number<int>(at(f, 1, ln), 10, "lex_filenum", ln);
    std::string_view ss_type = at(f, 2, ln);
    if (ss_type != "n") throw ParseError("not a noun synset: '" + std::string(ss_type) + "'", ln);
    s.id.pos = 'n';
    try {
      s.lexname = std::string(lexname_for_file_number(lex_file));
    } catch (const LookupError& e) {
      throw ParseError(e.what(), ln);
    }
    if (!s.lexname.starts_with("noun.")) {
      throw ParseError("non-noun lexical file " + s.lexname, ln);
    }
    std::size_t w_cnt = parse_number<std::size_t>(at(f, 3, ln), 16, "w_cnt", ln);
    if (w_cnt == 0) throw ParseError("synset without words", ln);
    std::size_t i = 4;
    for (std::size_t w = 0; w < w_cnt; ++w, i += 2) {
      s.lemmas.push_back(text::to_lower(at(f, i, ln)));
      (void)at(f, i + 1, ln);  // lex_id
    }
    std::size_t p_cnt = parse_number<std::size_t>(at(f, i, ln), 10, "p_cnt", ln);
    ++i;
    for (std::size_t p = 0; p < p_cnt; ++p, i += 4) {
      std::string_view symbol = at(f, i, ln);
      std::string_view target = at(f, i + 1, ln);
      std::string_view target_pos = at(f, i + 2, ln);
      (void)at(f, i + 3, ln);
      if ((symbol == "@" || symbol == "@i") && target_pos == "n") {
        SynsetId h{parse_number<std::uint32_t>(target, 10, "pointer offset", ln), 'n'};
        if (std::find(s.hypernyms.begin(), s.hypernyms.end(), h) == s.hypernyms.end()) {
          s.hypernyms.push_back(h);
        }
      }
    }
    s.gloss = std::string(text::trim(gloss));
    s.sense_ranks.assign(s.lemmas.size(), 0);

    SynsetId id = s.id;
    if (!db.synsets_.emplace(id, std::move(s)).second) {
      throw ParseError("duplicate synset offset " + id.str(), ln);
    }
    data_line_of[id] = ln;
  }

  for (const auto& [id, s] : db.synsets_) {
    for (const auto& h : s.hypernyms) {
      if (!db.synsets_.count(h)) {
        throw IntegrityError("synset " + id.str() + " has dangling hypernym " + h.str(),
                             data_line_of[id]);
      }
    }
  }

  // index.noun: lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt offsets...
  LineCursor index{index_text};
  while (index.next(line)) {
    if (is_preamble(line)) continue;
    const std::size_t ln = index.line_no;
    auto f = split_ws(line);
    std::string lemma = text::to_lower(at(f, 0, ln));
    if (at(f, 1, ln) != "n") throw ParseError("not a noun index entry", ln);
    std::size_t synset_cnt = parse_number<std::size_t>(at(f, 2, ln), 10, "synset_cnt", ln);
    std::size_t p_cnt = parse_number<std::size_t>(at(f, 3, ln), 10, "p_cnt", ln);
    std::size_t first = 4 + p_cnt + 2;
    if (f.size() != first + synset_cnt) {
      throw ParseError("expected " + std::to_string(synset_cnt) + " synset offsets", ln);
    }
    std::vector<SynsetId> senses;
    for (std::size_t k = 0; k < synset_cnt; ++k) {
      SynsetId id{parse_number<std::uint32_t>(f[first + k], 10, "synset offset", ln), 'n'};
      auto it = db.synsets_.find(id);
      if (it == db.synsets_.end()) {
        throw IntegrityError("index entry '" + lemma + "' references missing synset " + id.str(),
                             ln);
      }
      Synset& s = it->second;
      for (std::size_t li = 0; li < s.lemmas.size(); ++li) {
        if (s.lemmas[li] == lemma && s.sense_ranks[li] == 0) {
          s.sense_ranks[li] = static_cast<int>(k + 1);
        }
      }
      senses.push_back(id);
    }
    if (!db.index_.emplace(lemma, std::move(senses)).second) {
      throw ParseError("duplicate index entry '" + lemma + "'", ln);
    }
  }

  LineCursor exc{exceptions_text};
  while (!exceptions_text.empty() && exc.next(line)) {
    auto f = split_ws(text::trim(line));
    if (f.size() < 2) continue;
    auto& bases = db.exceptions_[text::to_lower(f[0])];
    for (std::size_t k = 1; k < f.size(); ++k) bases.push_back(text::to_lower(f[k]));
  }

  db.check_acyclic();
  db.build_graph();
  return db;
}

WordNetDb WordNetDb::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path base(dir);
  std::string exc;
  if (fs::exists(base / "noun.exc")) exc = text::read_file((base / "noun.exc").string());
  return parse(text::read_file((base / "index.noun").string()),
               text::read_file((base / "data.noun").string()), exc);
}

const Synset* WordNetDb::find(SynsetId id) const {
  auto it = synsets_.find(id);
  return it == synsets_.end() ? nullptr : &it->second;
}

const Synset& WordNetDb::synset(SynsetId id) const {
  const Synset* s = find(id);
  if (!s) throw LookupError("unknown synset " + id.str());
  return *s;
}

std::span<const SynsetId> WordNetDb::senses(std::string_view lemma) const {
  auto it = index_.find(text::to_lower(lemma));
  if (it == index_.end()) return {};
  return it->second;
}

bool WordNetDb::indexed(std::string_view lemma) const {
  return index_.count(text::to_lower(lemma)) > 0;
}

const std::vector<std::string>* WordNetDb::exception_bases(std::string_view form) const {
  auto it = exceptions_.find(text::to_lower(form));
  return it == exceptions_.end() ? nullptr : &it->second;
}

void WordNetDb::check_acyclic() const {
  enum class Mark { kNew, kActive, kDone };
  std::map<SynsetId, Mark> mark;
  for (const auto& [id, s] : synsets_) mark[id] = Mark::kNew;

  for (const auto& [start, unused] : synsets_) {
    if (mark[start] != Mark::kNew) continue;
    // Iterative DFS over hypernym edges: (node, next hypernym index).
    std::vector<std::pair<SynsetId, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::kActive;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& hyps = synsets_.at(node).hypernyms;
      if (next == hyps.size()) {
        mark[node] = Mark::kDone;
        stack.pop_back();
        continue;
      }
      SynsetId h = hyps[next++];
      if (mark[h] == Mark::kActive) {
        throw IntegrityError("hypernym cycle through " + h.str());
      }
      if (mark[h] == Mark::kNew) {
        mark[h] = Mark::kActive;
        stack.emplace_back(h, 0);
      }
    }
  }
}

void WordNetDb::build_graph() {
  int n = 0;
  for (const auto& [id, s] : synsets_) node_of_[id] = n++;
  const int root = n;
  adjacency_.assign(static_cast<std::size_t>(n) + 1, {});
  auto link = [&](int a, int b) {
    auto& la = adjacency_[static_cast<std::size_t>(a)];
    if (std::find(la.begin(), la.end(), b) != la.end()) return;
    la.push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
  };
  for (const auto& [id, s] : synsets_) {
    int u = node_of_[id];
    if (s.hypernyms.empty()) link(u, root);
    for (const auto& h : s.hypernyms) link(u, node_of_[h]);
  }
}

int WordNetDb::path_length(SynsetId a, SynsetId b) const {
  auto ia = node_of_.find(a);
  if (ia == node_of_.end()) throw LookupError("unknown synset " + a.str());
  auto ib = node_of_.find(b);
  if (ib == node_of_.end()) throw LookupError("unknown synset " + b.str());
  if (a == b) return 0;

  // Bidirectional BFS, one full level at a time from the smaller frontier.
  const std::size_t n = adjacency_.size();
  std::vector<int> dist_a(n, -1), dist_b(n, -1);
  std::vector<int> front_a{ia->second}, front_b{ib->second};
  dist_a[static_cast<std::size_t>(ia->second)] = 0;
  dist_b[static_cast<std::size_t>(ib->second)] = 0;

  while (!front_a.empty() && !front_b.empty()) {
    bool expand_a = front_a.size() <= front_b.size();
    auto& front = expand_a ? front_a : front_b;
    auto& mine = expand_a ? dist_a : dist_b;
    auto& theirs = expand_a ? dist_b : dist_a;

    int best = -1;
    std::vector<int> next;
    for (int u : front) {
      for (int v : adjacency_[static_cast<std::size_t>(u)]) {
        auto vi = static_cast<std::size_t>(v);
        if (mine[vi] != -1) continue;
        mine[vi] = mine[static_cast<std::size_t>(u)] + 1;
        if (theirs[vi] != -1) {
          int total = mine[vi] + theirs[vi];
          if (best == -1 || total < best) best = total;
        }
        next.push_back(v);
      }
    }
    if (best != -1) return best;
    front = std::move(next);
  }
  // Unreachable: the virtual root connects every component.
  throw IntegrityError("disconnected synsets " + a.str() + " and " + b.str());
}

}  // namespace multipun::lexres
