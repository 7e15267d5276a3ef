#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace multipun::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Lowercased maximal runs of ASCII letters.
std::vector<std::string> alpha_tokens(std::string_view s);

// True when some token of `text` is `word` or a regular plural of it
// ("pear" matches "pears", "berry" matches "berries").
bool mentions_word(std::string_view text, std::string_view word);

// Replaces whole-word occurrences of `word` (and its regular plurals) with
// `replacement`, pluralising the replacement where the original was plural
// and keeping a leading capital.
std::string replace_word(std::string_view text, std::string_view word,
                         std::string_view replacement);

std::string pluralize(std::string_view noun);

// Removes `**` markers, surrounding whitespace and one leading "* " or "- "
// bullet.
std::string strip_markup(std::string_view line);

// Value of the first (or last) line of the form `Label: value`, ignoring
// markdown bold markers, a leading list bullet and the case of the label.
// The value is trimmed; nullopt when no line carries the label.
std::optional<std::string> find_labeled(std::string_view text, std::string_view label,
                                        bool last = false);

// Lowercase hex of a 64-bit value, zero-padded to 16 digits.
std::string hex64(std::uint64_t v);

// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t stable_hash(std::string_view bytes,
                          std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// std::mt19937_64 (whose output sequence is fixed by the standard) with
// bounded draws and shuffling done here, since the standard distributions
// are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double unit();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace multipun::text
