#pragma once

// Sample construction: positives from pun tuples, explicative-substitution
// (ES) and random-substitution (RS) negatives, and diversity de-duplication.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multipun/clients.h"
#include "multipun/miner.h"
#include "multipun/prompts.h"

namespace multipun::pipeline {

using miner::PunKind;
using miner::PunTuple;
using prompts::render_prompt;

enum class SampleKind { kPunHomophonic, kPunHomographic, kNonPunEs, kNonPunRs };
std::string_view to_string(SampleKind k);
SampleKind parse_sample_kind(std::string_view s);  // ArgumentError

enum class SubstitutionStrategy { kEs, kRs };
std::string_view to_string(SubstitutionStrategy s);
SubstitutionStrategy parse_substitution_strategy(std::string_view s);

struct SubstitutionRecord {
  SubstitutionStrategy strategy = SubstitutionStrategy::kEs;
  PunTuple source_tuple;
  std::string source_id;    // id of the positive the negative was built from
  std::string replacement;  // ES: the paraphrase inserted; RS: the substitute noun

  bool operator==(const SubstitutionRecord&) const = default;
};

// Annotation slots for manual review; never read by the pipeline.
struct HumanFlags {
  std::optional<bool> image_quality;
  std::optional<bool> coherence;
  std::optional<bool> ambiguity;
  std::optional<bool> naturalness;
  std::optional<std::string> note;

  bool operator==(const HumanFlags&) const = default;
};

struct GenerationInfo {
  std::string text_model;
  std::string image_model;
  std::uint64_t seed = 0;

  bool operator==(const GenerationInfo&) const = default;
};

struct Sample {
  std::string id;
  SampleKind kind = SampleKind::kPunHomophonic;
  std::string caption;
  std::string image_prompt;
  std::optional<clients::ImageRef> image;
  std::string interpretation;                       // positives only
  std::optional<PunTuple> tuple;                    // positives
  std::optional<SubstitutionRecord> substitution;   // negatives
  HumanFlags human;
  GenerationInfo provenance;

  bool is_pun() const {
    return kind == SampleKind::kPunHomophonic || kind == SampleKind::kPunHomographic;
  }
  // The tuple a positive realises, or the one a negative was derived from.
  const PunTuple& source_tuple() const;
  PunKind pun_type() const { return source_tuple().kind; }

  bool operator==(const Sample&) const = default;
};

SampleKind positive_kind(PunKind k);

// First 16 hex digits of sha256 over (kind, tuple, caption).
std::string sample_id(SampleKind kind, const PunTuple& tuple, std::string_view caption);

// Empty when the sample satisfies its kind-specific invariants, otherwise a
// description of the first violation.
std::string sample_violation(const Sample& s);
void check_sample(const Sample& s);  // throws ValidityError

// ---------------------------------------------------------------------------

struct GeneratedTriple {
  std::string image_description;
  std::string caption;
  std::string interpretation;
};

// Reads the "Image Description", "Caption" and "Interpretation" fields.
// Labels are case-insensitive and may be bold or bulleted; a field continues
// over following lines until the next label or a blank line. Throws
// GenerationFormatError (with the raw text) when a field is missing.
GeneratedTriple parse_generation(std::string_view text);

// Creative prompt for the tuple's kind, with definitions taken from its glosses.
std::string creative_prompt(const PunTuple& tuple);

Sample build_positive(const PunTuple& tuple, clients::TextGenerator& textgen,
                      clients::ImageGenerator& imagegen, std::uint64_t seed);

Sample build_es_negative(const Sample& positive, clients::TextGenerator& textgen,
                         std::uint64_t seed);

// Concrete nouns for random substitution, one per line, `#` comments.
class SubstitutePool {
 public:
  static SubstitutePool parse(std::string_view text);
  static const SubstitutePool& bundled();

  const std::vector<std::string>& nouns() const { return nouns_; }
  int version() const { return version_; }

  // Seeded permutation of the pool, skipping nouns that are, or are a form
  // of, any excluded word. Throws ConfigError when nothing remains.
  std::string draw(std::uint64_t seed, const std::vector<std::string>& exclude) const;

 private:
  std::vector<std::string> nouns_;
  int version_ = 0;
};

Sample build_rs_negative(const Sample& positive, clients::TextGenerator& textgen,
                         clients::ImageGenerator& imagegen, const SubstitutePool& pool,
                         std::uint64_t seed);

// Embeds each interpretation and keeps `k` samples via diversity_filter,
// preserving input order.
std::vector<Sample> dedupe_by_diversity(const std::vector<Sample>& samples,
                                        clients::Embedder& embedder, std::size_t k);

// ---------------------------------------------------------------------------
// Batch construction. Per-item seeds derive from `seed` and item content, so
// results do not depend on `workers` or completion order.

struct BatchResult {
  std::vector<Sample> samples;
  std::vector<std::string> failures;  // one message per dropped item
};

BatchResult build_positives(const std::vector<PunTuple>& tuples, clients::TextGenerator& textgen,
                            clients::ImageGenerator& imagegen, std::uint64_t seed,
                            unsigned workers = 1);

// For every positive emits [positive, ES, RS]. A positive whose negatives
// cannot both be built is dropped with them, keeping the 1:1:1 structure.
// Negatives already present in the input are discarded and rebuilt.
BatchResult build_negatives(const std::vector<Sample>& samples, clients::TextGenerator& textgen,
                            clients::ImageGenerator& imagegen, const SubstitutePool& pool,
                            std::uint64_t seed, unsigned workers = 1);

}  // namespace multipun::pipeline
