#include "multipun/evalharness.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "multipun/error.h"
#include "multipun/parallel.h"
#include "multipun/text.h"

namespace multipun::evalharness {

using nlohmann::json;

void TaskSpec::validate() const {
  if (strategy == Strategy::kPunCot && task != Task::kExplanation) {
    throw ArgumentError("pun-cot is only defined for the explanation task");
  }
}

std::string TaskSpec::key() const {
  return std::string(prompts::to_string(task)) + "/" + std::string(prompts::to_string(bias)) +
         "/" + std::string(prompts::to_string(strategy));
}

TaskSpec TaskSpec::parse(std::string_view key) {
  std::size_t a = key.find('/');
  std::size_t b = a == std::string_view::npos ? a : key.find('/', a + 1);
  if (b == std::string_view::npos) throw ArgumentError("malformed task spec '" + std::string(key) + "'");
  TaskSpec s{prompts::parse_task(key.substr(0, a)), prompts::parse_bias(key.substr(a + 1, b - a - 1)),
             prompts::parse_strategy(key.substr(b + 1))};
  s.validate();
  return s;
}

std::vector<TaskSpec> standard_specs(const std::vector<Task>& tasks, bool with_pun_cot) {
  std::set<TaskSpec> specs;
  for (Task t : tasks) {
    for (Bias b : {Bias::kToPun, Bias::kToNonPun}) {
      specs.insert({t, b, Strategy::kVanilla});
      if (with_pun_cot && t == Task::kExplanation) specs.insert({t, b, Strategy::kPunCot});
    }
  }
  return {specs.begin(), specs.end()};
}

std::string build_task_prompt(const TaskSpec& spec, std::string_view caption) {
  spec.validate();
  return prompts::render_prompt(prompts::evaluation_template(spec.task, spec.bias, spec.strategy),
                                {{"caption", std::string(caption)}});
}

std::string build_task_prompt(const TaskSpec& spec, const pipeline::Sample& sample) {
  return build_task_prompt(spec, sample.caption);
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

// End (exclusive) of the balanced object starting at text[start] == '{', or
// npos when the braces never balance.
std::size_t balanced_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> first_json_object(std::string_view text) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    std::size_t end = balanced_end(text, start);
    if (end == std::string_view::npos) continue;
    json parsed = json::parse(text.substr(start, end - start), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

std::optional<std::string> string_field(const json& obj, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    auto it = obj.find(n);
    if (it != obj.end() && it->is_string()) return it->get<std::string>();
  }
  return std::nullopt;
}

}  // namespace

ModelResponse parse_response(std::string_view text, Task task) {
  ModelResponse r;
  r.raw = std::string(text);
  auto obj = first_json_object(text);
  if (!obj) {
    r.error = "no JSON object found";
    return r;
  }
  auto it = obj->find("is_pun");
  if (it == obj->end()) {
    r.error = "is_pun missing";
    return r;
  }
  if (!it->is_boolean()) {
    r.error = "is_pun is not a boolean";
    return r;
  }
  r.parse_ok = true;
  r.verdict = it->get<bool>();
  if (task == Task::kDetection) return r;

  if (auto type = string_field(*obj, {"type"})) {
    std::string t = text::to_lower(text::trim(*type));
    if (t == "homophonic") r.pun_type = PunKind::kHomophonic;
    if (t == "homographic") r.pun_type = PunKind::kHomographic;
  }
  r.explanation = task == Task::kExplanation ? string_field(*obj, {"explanation"}) : std::nullopt;
  auto tuple = obj->find("tuple");
  if (tuple != obj->end() && tuple->is_object()) {
    r.pred_wp = string_field(*tuple, {"wp", "w_p"});
    r.pred_wa = string_field(*tuple, {"wa", "w_a"});
    if (task == Task::kExplanation) {
      r.pred_sp = string_field(*tuple, {"Sp", "S_p", "sp"});
      r.pred_sa = string_field(*tuple, {"Sa", "S_a", "sa"});
    }
  }
  return r;
}

EvalRecord make_record(const pipeline::Sample& sample) {
  EvalRecord r;
  r.sample_id = sample.id;
  r.gold_is_pun = sample.is_pun();
  r.pun_type = sample.pun_type();
  if (sample.is_pun()) r.gold_tuple = sample.tuple;
  r.caption = sample.caption;
  r.gold_interpretation = sample.interpretation;
  return r;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

const ModelResponse& response_for(const EvalRecord& r, const TaskSpec& spec) {
  auto it = r.responses.find(spec);
  if (it == r.responses.end()) {
    throw HarnessError("record " + r.sample_id + " has no response for " + spec.key());
  }
  return it->second;
}

}  // namespace

bool effective_verdict(const EvalRecord& r, const TaskSpec& spec) {
  const auto& resp = response_for(r, spec);
  if (resp.parse_ok && resp.verdict) return *resp.verdict;
  return !r.gold_is_pun;
}

Confusion confusion(const std::vector<EvalRecord>& records, const TaskSpec& spec) {
  if (records.empty()) throw HarnessError("confusion over an empty record set");
  Confusion c;
  for (const auto& r : records) {
    const auto& resp = response_for(r, spec);
    if (!resp.parse_ok) ++c.unparsed;
    const bool pred = effective_verdict(r, spec);
    if (r.gold_is_pun) {
      pred ? ++c.tp : ++c.fn;
    } else {
      pred ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

Rates rates(long tp, long fp, long tn, long fn) {
  if (tp < 0 || fp < 0 || tn < 0 || fn < 0) throw ArgumentError("negative confusion count");
  if (tp + fn < 1) throw ArgumentError("no positive-class items");
  if (tn + fp < 1) throw ArgumentError("no negative-class items");
  Rates r;
  r.tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.f1 = r.precision + r.tpr == 0.0 ? 0.0 : 2.0 * r.precision * r.tpr / (r.precision + r.tpr);
  return r;
}

double cohens_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw ArgumentError("kappa inputs differ in length");
  if (a.empty()) throw ArgumentError("kappa over empty inputs");
  long agree = 0, a_true = 0, b_true = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a_true += a[i];
    b_true += b[i];
  }
  const double n = static_cast<double>(a.size());
  const double p_o = agree / n;
  const double pa = a_true / n;
  const double pb = b_true / n;
  const double p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (p_e == 1.0) return p_o == 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::string normalize_word(std::string_view w, const lexres::WordNetDb* db) {
  std::string s = text::to_lower(text::trim(w));
  auto boundary = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c));
  };
  std::size_t b = 0, e = s.size();
  while (b < e && boundary(s[b])) ++b;
  while (e > b && boundary(s[e - 1])) --e;
  s = s.substr(b, e - b);
  if (db && !s.empty()) {
    auto lemmas = lexres::lemmatize(*db, s);
    if (!lemmas.empty()) return lemmas.front();
  }
  return s;
}

std::optional<double> mention_ratio(const std::vector<EvalRecord>& records, const TaskSpec& spec,
                                    MentionSlot which, const lexres::WordNetDb* db) {
  if (spec.task == Task::kDetection) {
    throw ArgumentError("mention ratio needs localization or explanation responses");
  }
  long denom = 0, hits = 0;
  for (const auto& r : records) {
    if (!r.gold_is_pun || !r.gold_tuple) continue;
    const auto& resp = response_for(r, spec);
    if (!resp.parse_ok || !resp.verdict.value_or(false)) continue;
    ++denom;
    const auto& pred = which == MentionSlot::kWp ? resp.pred_wp : resp.pred_wa;
    const auto& gold = which == MentionSlot::kWp ? r.gold_tuple->w_p : r.gold_tuple->w_a;
    if (pred && normalize_word(*pred, db) == normalize_word(gold, db)) ++hits;
  }
  if (denom == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(denom);
}

PairwiseRates pairwise_rates(const std::vector<EvalRecord>& records, const TaskSpec& spec,
                             clients::PairJudge& judge, std::uint64_t seed) {
  if (spec.task != Task::kExplanation) throw ArgumentError("pairwise rates need explanation responses");
  PairwiseRates out;
  long win = 0, tie = 0, loss = 0;
  for (const auto& r : records) {
    if (!r.gold_is_pun) continue;
    const auto& resp = response_for(r, spec);
    if (!resp.parse_ok || !resp.verdict.value_or(false)) continue;
    if (!resp.explanation || text::trim(*resp.explanation).empty() ||
        text::trim(r.gold_interpretation).empty()) {
      ++out.format_errors;
      continue;
    }
    try {
      auto v = clients::judge_pair(judge, r.caption, *resp.explanation, r.gold_interpretation,
                                   text::hash_combine(seed, text::stable_hash(r.sample_id)));
      if (v == clients::JudgeVerdict::kWin) ++win;
      if (v == clients::JudgeVerdict::kTie) ++tie;
      if (v == clients::JudgeVerdict::kLoss) ++loss;
    } catch (const JudgeFormatError&) {
      ++out.format_errors;
    } catch (const TransportError&) {
      ++out.format_errors;
    }
  }
  out.judged = win + tie + loss;
  if (out.judged == 0) return out;
  out.defined = true;
  const double n = static_cast<double>(out.judged);
  out.win = win / n;
  out.tie = tie / n;
  out.loss = loss / n;
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

MetricsReport aggregate(const std::vector<EvalRecord>& input, const std::vector<TaskSpec>& specs_in,
                        const AggregateOptions& opts) {
  std::vector<EvalRecord> records = input;
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) { return a.sample_id < b.sample_id; });
  std::set<TaskSpec> specs(specs_in.begin(), specs_in.end());

  MetricsReport report;
  for (PunKind kind : {PunKind::kHomophonic, PunKind::kHomographic}) {
    std::vector<EvalRecord> subset;
    for (const auto& r : records) {
      if (r.pun_type == kind) subset.push_back(r);
    }
    if (subset.empty()) continue;

    for (const auto& spec : specs) {
      Confusion c = confusion(subset, spec);
      try {
        report.bias_rows.push_back({kind, spec, c, rates(c)});
      } catch (const ArgumentError& e) {
        throw HarnessError(std::string(miner::to_string(kind)) + " records: " + e.what());
      }
    }

    std::set<std::pair<Task, Strategy>> groups;
    for (const auto& spec : specs) groups.emplace(spec.task, spec.strategy);
    for (const auto& [task, strategy] : groups) {
      SummaryRow row{kind, task, strategy, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0};
      const TaskSpec pun{task, Bias::kToPun, strategy};
      const TaskSpec non{task, Bias::kToNonPun, strategy};
      const bool has_pun = specs.count(pun) > 0;
      const bool has_non = specs.count(non) > 0;
      std::optional<Rates> rp, rn;
      if (has_pun) {
        auto c = confusion(subset, pun);
        rp = rates(c);
        row.unparsed += c.unparsed;
      }
      if (has_non) {
        auto c = confusion(subset, non);
        rn = rates(c);
        row.unparsed += c.unparsed;
      }
      const Rates* headline = rp ? &*rp : (rn ? &*rn : nullptr);
      if (headline) {
        row.tpr = headline->tpr;
        row.tnr = headline->tnr;
        row.f1 = headline->f1;
      }
      if (rp && rn) {
        row.delta_tpr = bias_delta(rn->tpr, rp->tpr);
        row.delta_tnr = bias_delta(rn->tnr, rp->tnr);
        std::vector<bool> va, vb;
        for (const auto& r : subset) {
          va.push_back(effective_verdict(r, pun));
          vb.push_back(effective_verdict(r, non));
        }
        row.kappa = cohens_kappa(va, vb);
      }
      const TaskSpec& primary = has_pun ? pun : non;
      if (task != Task::kDetection) {
        row.mention_wp = mention_ratio(subset, primary, MentionSlot::kWp, opts.db);
        row.mention_wa = mention_ratio(subset, primary, MentionSlot::kWa, opts.db);
      }
      if (task == Task::kExplanation && opts.judge) {
        row.pairwise = pairwise_rates(subset, primary, *opts.judge, opts.seed);
      }
      report.summary.push_back(std::move(row));
    }
  }
  return report;
}

EvalRun evaluate(const std::vector<pipeline::Sample>& dataset, clients::VlmSubject& subject,
                 const std::vector<TaskSpec>& specs, const EvaluateOptions& opts) {
  if (dataset.empty()) throw HarnessError("evaluation dataset is empty");
  if (specs.empty()) throw HarnessError("no task specs to evaluate");
  for (const auto& s : specs) s.validate();

  std::vector<const pipeline::Sample*> samples;
  for (const auto& s : dataset) samples.push_back(&s);
  std::sort(samples.begin(), samples.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i]->id == samples[i - 1]->id) {
      throw HarnessError("duplicate sample id " + samples[i]->id);
    }
  }

  const std::set<TaskSpec> unique_specs(specs.begin(), specs.end());
  const std::vector<TaskSpec> spec_list(unique_specs.begin(), unique_specs.end());
  const std::size_t jobs = samples.size() * spec_list.size();
  std::vector<ModelResponse> answers(jobs);
  parallel_for(jobs, opts.workers, [&](std::size_t j) {
    const auto& sample = *samples[j / spec_list.size()];
    const auto& spec = spec_list[j % spec_list.size()];
    clients::SubjectQuery q{build_task_prompt(spec, sample), sample.image,
                            text::hash_combine(opts.seed, text::stable_hash(sample.id + "|" + spec.key()))};
    try {
      answers[j] = parse_response(subject.answer(q), spec.task);
    } catch (const Error& e) {
      answers[j] = ModelResponse{};
      answers[j].error = std::string("query failed: ") + e.what();
    }
  });

  EvalRun run;
  run.records.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EvalRecord r = make_record(*samples[i]);
    for (std::size_t k = 0; k < spec_list.size(); ++k) {
      r.responses.emplace(spec_list[k], std::move(answers[i * spec_list.size() + k]));
    }
    run.records.push_back(std::move(r));
  }
  run.report = aggregate(run.records, spec_list, opts.aggregate);
  return run;
}

// ---------------------------------------------------------------------------

namespace {

struct Mean {
  double sum = 0;
  int n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> get() const { return n ? std::optional<double>(sum / n) : std::nullopt; }
};

}  // namespace

MetricsReport mean_report(const std::vector<MetricsReport>& runs) {
  if (runs.empty()) throw ArgumentError("mean of zero reports");
  if (runs.size() == 1) {
    MetricsReport one = runs.front();
    one.label = "mean";
    return one;
  }
  MetricsReport out;
  out.label = "mean";
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.bias_rows.size() != first.bias_rows.size() || r.summary.size() != first.summary.size()) {
      throw ArgumentError("reports have different shapes");
    }
  }

  // Counts are summed; rates are averaged.
  for (std::size_t i = 0; i < first.bias_rows.size(); ++i) {
    BiasRow row = first.bias_rows[i];
    row.counts = {};
    Mean tpr, tnr, prec, f1;
    for (const auto& r : runs) {
      const auto& b = r.bias_rows[i];
      if (b.pun_type != row.pun_type || b.spec != row.spec) throw ArgumentError("report rows differ");
      row.counts.tp += b.counts.tp;
      row.counts.fp += b.counts.fp;
      row.counts.tn += b.counts.tn;
      row.counts.fn += b.counts.fn;
      row.counts.unparsed += b.counts.unparsed;
      tpr.add(b.rates.tpr);
      tnr.add(b.rates.tnr);
      prec.add(b.rates.precision);
      f1.add(b.rates.f1);
    }
    row.rates = {*tpr.get(), *tnr.get(), *prec.get(), *f1.get()};
    out.bias_rows.push_back(row);
  }

  for (std::size_t i = 0; i < first.summary.size(); ++i) {
    SummaryRow row = first.summary[i];
    Mean tpr, tnr, f1, dtpr, dtnr, kappa, mwp, mwa, win, tie, loss;
    long unparsed = 0, judged = 0, errors = 0;
    bool any_pairwise = false;
    for (const auto& r : runs) {
      const auto& s = r.summary[i];
      if (s.pun_type != row.pun_type || s.task != row.task || s.strategy != row.strategy) {
        throw ArgumentError("report rows differ");
      }
      tpr.add(s.tpr);
      tnr.add(s.tnr);
      f1.add(s.f1);
      dtpr.add(s.delta_tpr);
      dtnr.add(s.delta_tnr);
      kappa.add(s.kappa);
      mwp.add(s.mention_wp);
      mwa.add(s.mention_wa);
      unparsed += s.unparsed;
      if (s.pairwise) {
        any_pairwise = true;
        judged += s.pairwise->judged;
        errors += s.pairwise->format_errors;
        if (s.pairwise->defined) {
          win.add(s.pairwise->win);
          tie.add(s.pairwise->tie);
          loss.add(s.pairwise->loss);
        }
      }
    }
    row.tpr = tpr.get();
    row.tnr = tnr.get();
    row.f1 = f1.get();
    row.delta_tpr = dtpr.get();
    row.delta_tnr = dtnr.get();
    row.kappa = kappa.get();
    row.mention_wp = mwp.get();
    row.mention_wa = mwa.get();
    row.unparsed = unparsed;
    if (any_pairwise) {
      PairwiseRates p;
      p.judged = judged;
      p.format_errors = errors;
      p.defined = win.n > 0;
      p.win = win.get().value_or(0);
      p.tie = tie.get().value_or(0);
      p.loss = loss.get().value_or(0);
      row.pairwise = p;
    } else {
      row.pairwise.reset();
    }
    out.summary.push_back(row);
  }
  return out;
}

namespace {

std::string fmt(const std::optional<double>& v, bool sign = false) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, sign ? "%+.3f" : "%.3f", *v);
  // "-0.000" and "+0.000" read better as 0.000.
  std::string s = buf;
  if (s == "-0.000" || s == "+0.000") s = "0.000";
  return s;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_table(const MetricsReport& report) {
  std::string out;
  if (!report.label.empty()) out += "# " + report.label + "\n";
  const std::vector<std::pair<std::string, std::size_t>> cols = {
      {"type", 12}, {"task", 13}, {"strategy", 9}, {"TPR", 7},   {"dTPR", 7},
      {"TNR", 7},   {"dTNR", 7},  {"F1", 7},       {"kappa", 7}, {"m_wp", 7},
      {"m_wa", 7},  {"W/T/L", 18}, {"unparsed", 8}};
  for (const auto& [name, w] : cols) out += pad(name, w) + " ";
  out.back() = '\n';
  for (const auto& r : report.summary) {
    std::string wtl = "-";
    if (r.pairwise && r.pairwise->defined) {
      wtl = fmt(r.pairwise->win) + "/" + fmt(r.pairwise->tie) + "/" + fmt(r.pairwise->loss);
    }
    std::vector<std::string> cells = {std::string(miner::to_string(r.pun_type)),
                                      std::string(prompts::to_string(r.task)),
                                      std::string(prompts::to_string(r.strategy)),
                                      fmt(r.tpr),
                                      fmt(r.delta_tpr, true),
                                      fmt(r.tnr),
                                      fmt(r.delta_tnr, true),
                                      fmt(r.f1),
                                      fmt(r.kappa),
                                      fmt(r.mention_wp),
                                      fmt(r.mention_wa),
                                      wtl,
                                      std::to_string(r.unparsed)};
    for (std::size_t c = 0; c < cells.size(); ++c) out += pad(cells[c], cols[c].second) + " ";
    out.back() = '\n';
  }
  return out;
}

}  // namespace multipun::evalharness
