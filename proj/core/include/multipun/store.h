#pragma once

// JSONL persistence for tuples, samples, transcripts and metrics; dataset
// manifests; the train/test split; and fine-tuning data export.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multipun/divfilter.h"
#include "multipun/evalharness.h"
#include "multipun/miner.h"
#include "multipun/pipeline.h"

namespace multipun::store {

using miner::PunKind;
using miner::PunTuple;
using pipeline::Sample;

// --- single records --------------------------------------------------------
// Each encoder emits one compact JSON line (no trailing newline) with keys in
// sorted order. Decoders throw ParseError on malformed input.

std::string encode_tuple(const PunTuple& t);
PunTuple decode_tuple(std::string_view line);

std::string encode_sample(const Sample& s);
Sample decode_sample(std::string_view line);

std::string encode_record(const evalharness::EvalRecord& r);
evalharness::EvalRecord decode_record(std::string_view line);

// --- files ------------------------------------------------------------------
// Readers skip blank lines and report the 1-based line number of a bad line.

void save_tuples(const std::vector<PunTuple>& tuples, const std::string& path);
std::vector<PunTuple> load_tuples(const std::string& path);

void save_transcript(const std::vector<evalharness::EvalRecord>& records, const std::string& path);
std::vector<evalharness::EvalRecord> load_transcript(const std::string& path);

// One line per bias row then one per summary row, each tagged with "row".
void save_metrics(const evalharness::MetricsReport& report, const std::string& path);
std::string encode_metrics(const evalharness::MetricsReport& report);

// Lines of {"id": ..., "vector": [...]}.
divfilter::EmbeddingMatrix load_embeddings(const std::string& path);
void save_embeddings(const divfilter::EmbeddingMatrix& m, const std::string& path);

// --- manifest ---------------------------------------------------------------

struct KindCounts {
  long positives = 0, es = 0, rs = 0;

  bool operator==(const KindCounts&) const = default;
};

struct SplitSpec {
  std::uint64_t seed = 0;
  std::map<PunKind, long> train;  // positives per pun type
  std::map<PunKind, long> test;

  bool operator==(const SplitSpec&) const = default;
};

struct Manifest {
  std::map<PunKind, KindCounts> counts;  // both pun types always present
  std::uint64_t seed = 0;
  std::map<std::string, std::string> resources;  // name -> sha256 of contents
  std::optional<SplitSpec> split;                // set on split outputs
  std::string partition;                         // "train", "test" or empty

  // ES == RS == positives for every pun type.
  bool balanced() const;
  long total() const;

  bool operator==(const Manifest&) const = default;
};

Manifest count_samples(const std::vector<Sample>& samples);

std::string encode_manifest(const Manifest& m);
Manifest decode_manifest(std::string_view text);

// "d.jsonl" -> "d.manifest.json"; other names get ".manifest.json" appended.
std::string manifest_path(const std::string& dataset_path);

// sha256 of a file, or for a directory, of its sorted (name, file hash) list.
std::string fingerprint(const std::string& path);

struct DatasetInfo {
  std::uint64_t seed = 0;
  std::map<std::string, std::string> resources;
  std::optional<SplitSpec> split;
  std::string partition;
};

// Writes the samples and their manifest. Throws ArgumentError on a duplicate
// id and ValidityError on a sample that breaks its invariants.
Manifest save_dataset(const std::vector<Sample>& samples, const std::string& path,
                      const DatasetInfo& info = {});
// Recomputes the counts and throws IntegrityError when they disagree with the
// manifest, or when the manifest is missing.
std::vector<Sample> load_dataset(const std::string& path, Manifest* manifest = nullptr);

// --- split -----------------------------------------------------------------

// floor(n/2) train positives per pun type.
SplitSpec default_split(const std::vector<Sample>& samples, std::uint64_t seed);

struct SplitResult {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

// Shuffles each pun type's positives (ordered by id first) with a seeded
// permutation, takes the first `train` for training, and sends each
// positive's negatives to the same side. Output keeps input order. Throws
// ArgumentError when the spec does not match the positive counts, or when a
// positive lacks exactly one ES and one RS negative, or a negative is orphaned.
SplitResult split(const std::vector<Sample>& samples, const SplitSpec& spec);

// --- fine-tuning export ------------------------------------------------------

struct SftRecord {
  std::string sample_id;
  prompts::Bias bias = prompts::Bias::kToPun;
  std::string prompt;
  std::string target;  // compact JSON

  bool operator==(const SftRecord&) const = default;
};

// Two records per sample (to-pun first), using the vanilla explanation
// prompt. Throws ExportError when a positive has no interpretation or tuple.
std::vector<SftRecord> export_sft(const std::vector<Sample>& train);

std::string encode_sft(const SftRecord& r);
void save_sft(const std::vector<SftRecord>& records, const std::string& path);

}  // namespace multipun::store
