#pragma once

// Evaluation of a vision-language subject on detection, localization and
// explanation, under both prompt biases, with the full metric suite.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multipun/clients.h"
#include "multipun/lexres.h"
#include "multipun/pipeline.h"
#include "multipun/prompts.h"

namespace multipun::evalharness {

using miner::PunKind;
using miner::PunTuple;
using prompts::Bias;
using prompts::Strategy;
using prompts::Task;

struct TaskSpec {
  Task task = Task::kDetection;
  Bias bias = Bias::kToPun;
  Strategy strategy = Strategy::kVanilla;

  // ArgumentError for pun-cot outside explanation.
  void validate() const;
  // "detection/to-pun/vanilla"
  std::string key() const;
  static TaskSpec parse(std::string_view key);

  auto operator<=>(const TaskSpec&) const = default;
};

// Both biases of each task, vanilla strategy, plus pun-cot explanation when
// `with_pun_cot` is set.
std::vector<TaskSpec> standard_specs(const std::vector<Task>& tasks, bool with_pun_cot = false);

std::string build_task_prompt(const TaskSpec& spec, const pipeline::Sample& sample);
std::string build_task_prompt(const TaskSpec& spec, std::string_view caption);

// ---------------------------------------------------------------------------

struct ModelResponse {
  std::string raw;
  bool parse_ok = false;
  std::optional<bool> verdict;  // true = pun, in both bias variants
  std::optional<PunKind> pun_type;
  std::optional<std::string> pred_wp;
  std::optional<std::string> pred_wa;
  std::optional<std::string> pred_sp;
  std::optional<std::string> pred_sa;
  std::optional<std::string> explanation;
  std::string error;  // why parsing failed, or the transport failure

  bool operator==(const ModelResponse&) const = default;
};

// Finds the first balanced JSON object in `text` that parses (code fences and
// surrounding prose are skipped). parse_ok is false when there is none or when
// is_pun is missing or not a JSON boolean. Tuple fields are read for
// localization and explanation only.
ModelResponse parse_response(std::string_view text, Task task);

struct EvalRecord {
  std::string sample_id;
  bool gold_is_pun = false;
  PunKind pun_type = PunKind::kHomophonic;  // of the source tuple for negatives
  std::optional<PunTuple> gold_tuple;       // positives only
  std::string caption;
  std::string gold_interpretation;
  std::map<TaskSpec, ModelResponse> responses;

  bool operator==(const EvalRecord&) const = default;
};

EvalRecord make_record(const pipeline::Sample& sample);

// ---------------------------------------------------------------------------
// Metrics

struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long unparsed = 0;

  bool operator==(const Confusion&) const = default;
};

// Unparseable responses count against the subject: gold pun -> fn, gold
// non-pun -> fp. Throws HarnessError on an empty set or a missing response.
Confusion confusion(const std::vector<EvalRecord>& records, const TaskSpec& spec);

struct Rates {
  double tpr = 0, tnr = 0, precision = 0, f1 = 0;
};

// Throws ArgumentError when either class is empty.
Rates rates(long tp, long fp, long tn, long fn);
inline Rates rates(const Confusion& c) { return rates(c.tp, c.fp, c.tn, c.fn); }

// Value under the to-non-pun prompt minus value under the to-pun prompt.
inline double bias_delta(double under_non_pun, double under_pun) { return under_non_pun - under_pun; }

// (p_o - p_e) / (1 - p_e); when p_e == 1 the result is 1 if p_o == 1, else 0.
// Throws ArgumentError on empty or unequal-length inputs.
double cohens_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

// The prediction a record counts as: the parsed verdict, or the wrong answer
// when the response was unparseable.
bool effective_verdict(const EvalRecord& r, const TaskSpec& spec);

enum class MentionSlot { kWp, kWa };

// Lowercase, trim and strip boundary punctuation; then reduce to the first
// WordNet base form when `db` knows one.
std::string normalize_word(std::string_view w, const lexres::WordNetDb* db);

// Over gold-pun records predicted pun with a parsed response: the share whose
// predicted word matches the gold word. nullopt when that set is empty.
std::optional<double> mention_ratio(const std::vector<EvalRecord>& records, const TaskSpec& spec,
                                    MentionSlot which, const lexres::WordNetDb* db = nullptr);

struct PairwiseRates {
  double win = 0, tie = 0, loss = 0;
  long judged = 0;
  long format_errors = 0;  // excluded from the rates
  bool defined = false;    // false when nothing could be judged

  bool operator==(const PairwiseRates&) const = default;
};

// Judges each true-positive explanation against the gold interpretation.
PairwiseRates pairwise_rates(const std::vector<EvalRecord>& records, const TaskSpec& spec,
                             clients::PairJudge& judge, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reports

struct BiasRow {
  PunKind pun_type;
  TaskSpec spec;
  Confusion counts;
  Rates rates;
};

// One line of the summary table. TPR, TNR and F1 are taken under the
// to-pun prompt; deltas and kappa need both biases.
struct SummaryRow {
  PunKind pun_type;
  Task task;
  Strategy strategy;
  std::optional<double> tpr, tnr, f1;
  std::optional<double> delta_tpr, delta_tnr, kappa;
  std::optional<double> mention_wp, mention_wa;
  std::optional<PairwiseRates> pairwise;
  long unparsed = 0;  // summed over both biases
};

struct MetricsReport {
  std::vector<BiasRow> bias_rows;
  std::vector<SummaryRow> summary;
  std::string label;  // e.g. "run 1", "mean"
};

struct AggregateOptions {
  const lexres::WordNetDb* db = nullptr;  // for mention-ratio lemmatization
  clients::PairJudge* judge = nullptr;    // pairwise rates when set
  std::uint64_t seed = 0;
};

// Pure function of the records; the order of `records` does not matter.
MetricsReport aggregate(const std::vector<EvalRecord>& records, const std::vector<TaskSpec>& specs,
                        const AggregateOptions& opts = {});

struct EvaluateOptions {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  AggregateOptions aggregate;
};

struct EvalRun {
  std::vector<EvalRecord> records;  // sorted by sample id
  MetricsReport report;
};

// Queries `subject` once per (sample, spec). A query that throws is recorded
// as an unparseable response and never aborts the run.
EvalRun evaluate(const std::vector<pipeline::Sample>& dataset, clients::VlmSubject& subject,
                 const std::vector<TaskSpec>& specs, const EvaluateOptions& opts = {});

// Field-wise mean of defined values across runs with identical row keys.
MetricsReport mean_report(const std::vector<MetricsReport>& runs);

// Plain-text table: TPR, dTPR, TNR, dTNR, F1, kappa, then mention ratios and
// win/tie/loss. Values are rounded to three decimals here only.
std::string render_table(const MetricsReport& report);

}  // namespace multipun::evalharness
