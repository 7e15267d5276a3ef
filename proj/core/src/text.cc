#include "multipun/text.h"

#include <openssl/evp.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "multipun/error.h"

namespace multipun::text {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

// Candidate surface forms of `word` that count as a mention.
bool is_form_of(std::string_view token, std::string_view word) {
  if (token == word) return true;
  if (token.size() <= word.size()) return false;
  if (token.size() == word.size() + 1 && token.starts_with(word) && token.back() == 's')
    return true;
  if (token.size() == word.size() + 2 && token.starts_with(word) && token.ends_with("es"))
    return true;
  if (word.size() >= 2 && word.back() == 'y' && token.size() == word.size() + 2 &&
      token.substr(0, word.size() - 1) == word.substr(0, word.size() - 1) &&
      token.ends_with("ies"))
    return true;
  return false;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> alpha_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !is_alpha(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && is_alpha(s[i])) ++i;
    if (i > start) out.push_back(to_lower(s.substr(start, i - start)));
  }
  return out;
}

bool mentions_word(std::string_view text, std::string_view word) {
  std::string w = to_lower(trim(word));
  if (w.empty()) return false;
  for (const auto& token : alpha_tokens(text)) {
    if (is_form_of(token, w)) return true;
  }
  return false;
}

std::string pluralize(std::string_view noun) {
  std::string n(noun);
  if (n.empty()) return n;
  auto ends = [&](std::string_view suf) { return n.ends_with(suf); };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) return n + "es";
  if (n.size() >= 2 && n.back() == 'y' &&
      std::string_view("aeiou").find(n[n.size() - 2]) == std::string_view::npos) {
    return n.substr(0, n.size() - 1) + "ies";
  }
  return n + "s";
}

std::string replace_word(std::string_view text, std::string_view word,
                         std::string_view replacement) {
  std::string w = to_lower(word);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_alpha(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && is_alpha(text[i])) ++i;
    std::string_view token = text.substr(start, i - start);
    std::string lower = to_lower(token);
    if (!is_form_of(lower, w)) {
      out.append(token);
      continue;
    }
    std::string rep = lower == w ? std::string(replacement) : pluralize(replacement);
    if (!rep.empty() && std::isupper(static_cast<unsigned char>(token[0]))) {
      rep[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rep[0])));
    }
    out += rep;
  }
  return out;
}

std::string strip_markup(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '*' && i + 1 < line.size() && line[i + 1] == '*') {
      ++i;
      continue;
    }
    out.push_back(line[i]);
  }
  std::string_view v = trim(out);
  if (v.size() >= 2 && (v[0] == '*' || v[0] == '-') && v[1] == ' ') v = trim(v.substr(2));
  return std::string(v);
}

std::optional<std::string> find_labeled(std::string_view text, std::string_view label,
                                        bool last) {
  std::optional<std::string> found;
  const std::string want = to_lower(label);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::string line = strip_markup(raw);
    if (line.size() <= want.size() || to_lower(line.substr(0, want.size())) != want) continue;
    std::string_view rest = trim(std::string_view(line).substr(want.size()));
    if (rest.empty() || rest.front() != ':') continue;
    found = std::string(trim(rest.substr(1)));
    if (!last) return found;
  }
  return found;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t stable_hash(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  // splitmix64 finaliser over the xor; good avalanche for small seeds.
  std::uint64_t z = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("short write to " + path);
}

SeededRng::SeededRng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t SeededRng::next() { return engine_(); }

std::uint64_t SeededRng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("SeededRng::below(0)");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double SeededRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace multipun::text
