#include "synthetic_lexicon.h"

#include <cstdio>
#include <map>
#include <vector>

#include "multipun/text.h"

namespace multipun::testing {
namespace {

struct Node {
  std::string lemma;
  int lex_filenum;
  int hypernym;  // index into the node list, -1 for none
  std::string gloss;
};

constexpr int kTops = 3;
constexpr int kArtifact = 6;
constexpr int kCognition = 9;
constexpr int kPerson = 18;

// Appends a chain of `length` nodes under a fresh noun.Tops root and returns
// the index of the deepest node.
int add_chain(std::vector<Node>& nodes, const std::string& stem, int lex, int length) {
  nodes.push_back({stem + "root", kTops, -1, "a top level category"});
  int parent = static_cast<int>(nodes.size()) - 1;
  for (int i = 0; i < length; ++i) {
    nodes.push_back({stem + "level" + word_code(i), lex, parent, "an intermediate category"});
    parent = static_cast<int>(nodes.size()) - 1;
  }
  return parent;
}

std::string data_line(const Node& n, std::size_t offset, std::size_t hyper_offset) {
  char head[64];
  std::snprintf(head, sizeof head, "%08zu %02d n 01 ", offset, n.lex_filenum);
  std::string line = head + n.lemma + " 0 ";
  if (n.hypernym >= 0) {
    char ptr[48];
    std::snprintf(ptr, sizeof ptr, "001 @ %08zu n 0000", hyper_offset);
    line += ptr;
  } else {
    line += "000";
  }
  return line + " | " + n.gloss + "  \n";
}

std::string pronunciation(int i) {
  static const char* kConsonants[] = {"B", "D", "F", "G", "K", "L", "N", "R", "T", "V"};
  std::string p = "P AH1";
  std::string digits = std::to_string(i);
  for (char c : digits) p += std::string(" ") + kConsonants[c - '0'];
  return p + " IY0";
}

}  // namespace

std::string word_code(int i) {
  static constexpr std::string_view kLetters = "abcdefghijklnopqrtuv";
  std::string out;
  int v = i;
  for (int d = 0; d < 3 || v > 0; ++d) {
    out.insert(out.begin(), kLetters[static_cast<std::size_t>(v % 20)]);
    v /= 20;
  }
  return out;
}

SyntheticLexicon make_synthetic_lexicon(int homophone_pairs, int homograph_words) {
  std::vector<Node> nodes;
  const int art = add_chain(nodes, "artifact", kArtifact, 7);
  const int per = add_chain(nodes, "persona", kPerson, 4);
  const int cog = add_chain(nodes, "idea", kCognition, 2);

  std::map<std::string, std::vector<int>> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[i].lemma].push_back(i);

  SyntheticLexicon lex;
  lex.prondict = ";;; synthetic pronouncing dictionary\n";
  std::map<std::string, double> freq;

  for (int i = 0; i < homophone_pairs; ++i) {
    const std::string code = word_code(i);
    const std::string wp = "pa" + code;
    const std::string wa = "pe" + code;
    nodes.push_back({wp, kArtifact, art, "a handmade object kept on a shelf"});
    index[wp].push_back(static_cast<int>(nodes.size()) - 1);
    nodes.push_back({wa, kCognition, cog, "a feeling of quiet agreement between friends"});
    index[wa].push_back(static_cast<int>(nodes.size()) - 1);
    lex.prondict += text::to_lower(wp) + "  " + pronunciation(i) + "\n";
    lex.prondict += text::to_lower(wa) + "  " + pronunciation(i) + "\n";
    freq[wp] = 4.2;
    freq[wa] = 4.4;
  }
  for (int i = 0; i < homograph_words; ++i) {
    const std::string w = "ga" + word_code(i);
    nodes.push_back({w, kArtifact, art, "a household appliance that hums on the table"});
    index[w].push_back(static_cast<int>(nodes.size()) - 1);
    nodes.push_back({w, kPerson, per, "an eager supporter who cheers at every game"});
    index[w].push_back(static_cast<int>(nodes.size()) - 1);
    freq[w] = 4.6;
  }

  // Fixed-width fields make line lengths independent of offsets.
  std::vector<std::size_t> offsets(nodes.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    offsets[i] = pos;
    pos += data_line(nodes[i], 0, 0).size();
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t hyper = nodes[i].hypernym >= 0 ? offsets[static_cast<std::size_t>(nodes[i].hypernym)] : 0;
    lex.data_noun += data_line(nodes[i], offsets[i], hyper);
  }
  for (const auto& [lemma, ids] : index) {
    std::string line = lemma + " n " + std::to_string(ids.size()) + " 1 @ " +
                       std::to_string(ids.size()) + " 0";
    for (int id : ids) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %08zu", offsets[static_cast<std::size_t>(id)]);
      line += buf;
    }
    lex.index_noun += line + "  \n";
  }
  lex.freq = "# synthetic\n";
  for (const auto& [w, z] : freq) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", z);
    lex.freq += w + "\t" + buf + "\n";
  }
  return lex;
}

void write_synthetic_lexicon(const SyntheticLexicon& lex, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "wordnet");
  text::write_file((dir / "prondict.txt").string(), lex.prondict);
  text::write_file((dir / "freq.tsv").string(), lex.freq);
  text::write_file((dir / "wordnet" / "index.noun").string(), lex.index_noun);
  text::write_file((dir / "wordnet" / "data.noun").string(), lex.data_noun);
}

}  // namespace multipun::testing
