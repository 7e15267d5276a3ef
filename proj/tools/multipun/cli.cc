#include "cli.h"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multipun/clients.h"
#include "multipun/divfilter.h"
#include "multipun/error.h"
#include "multipun/evalharness.h"
#include "multipun/lexres.h"
#include "multipun/miner.h"
#include "multipun/pipeline.h"
#include "multipun/store.h"
#include "multipun/text.h"

namespace multipun::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Flags shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string prondict;
  std::string freq;
  std::string wordnet;
  std::string images;
  bool mock = false;
  unsigned workers = 4;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  sub->add_option("--config", c.config, "JSON configuration file");
  sub->add_option("--prondict", c.prondict, "Pronouncing dictionary (CMUdict format)");
  sub->add_option("--freq", c.freq, "Zipf frequency table (word<TAB>zipf)");
  sub->add_option("--wordnet", c.wordnet, "WordNet dict directory (index.noun, data.noun, noun.exc)");
  sub->add_option("--images", c.images, "Content-addressed image directory");
  sub->add_flag("--mock", c.mock, "Use deterministic offline clients");
  sub->add_option("--workers", c.workers, "Concurrent client calls")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
}

// --- configuration ----------------------------------------------------------

class Config {
 public:
  explicit Config(const Common& c) : common_(c) {
    if (!c.config.empty()) {
      doc_ = json::parse(text::read_file(c.config), nullptr, false);
      if (doc_.is_discarded() || !doc_.is_object()) {
        throw ConfigError(c.config + ": not a JSON object");
      }
    }
  }

  miner::MinerConfig miner() const {
    miner::MinerConfig m;
    auto it = doc_.find("miner");
    if (it == doc_.end()) return m;
    const json& j = *it;
    try {
      m.zipf_min_homophonic = j.value("zipf_min_homophonic", m.zipf_min_homophonic);
      m.zipf_min_homographic = j.value("zipf_min_homographic", m.zipf_min_homographic);
      m.top_k_senses = j.value("top_k_senses", m.top_k_senses);
      m.path_sim_max = j.value("path_sim_max", m.path_sim_max);
      m.gloss_substring_min_len = j.value("gloss_substring_min_len", m.gloss_substring_min_len);
      if (j.contains("visual_lexnames")) {
        m.visual_lexnames = j.at("visual_lexnames").get<std::set<std::string>>();
      }
      if (j.contains("natural_lexnames")) {
        m.natural_lexnames = j.at("natural_lexnames").get<std::set<std::string>>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("miner config: ") + e.what());
    }
    m.validate();
    return m;
  }

  clients::LiveConfig live(const std::string& section) const {
    auto it = doc_.find(section);
    if (it == doc_.end() || !it->is_object()) {
      throw ConfigError("no '" + section + "' section in --config; pass --mock for offline clients");
    }
    const json& j = *it;
    clients::LiveConfig cfg;
    try {
      cfg.base_url = j.value("base_url", cfg.base_url);
      cfg.model = j.value("model", cfg.model);
      cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
      cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
      cfg.max_retries = j.value("max_retries", cfg.max_retries);
      cfg.backoff_base_ms = j.value("backoff_base_ms", cfg.backoff_base_ms);
      cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
      cfg.jitter_seed = j.value("jitter_seed", common_.seed);
      cfg.audit_log = j.value("audit_log", cfg.audit_log);
    } catch (const json::exception& e) {
      throw ConfigError(section + " config: " + e.what());
    }
    cfg.validate();
    return cfg;
  }

  std::string image_dir() const {
    if (!common_.images.empty()) return common_.images;
    return doc_.value("image_dir", std::string());
  }

  std::shared_ptr<clients::ImageStore> image_store() const {
    std::string dir = image_dir();
    if (dir.empty()) return nullptr;
    return std::make_shared<clients::ImageStore>(dir);
  }

  std::shared_ptr<clients::TextGenerator> text_generator(const std::string& section = "text") const {
    if (common_.mock) return std::make_shared<clients::MockTextGenerator>();
    return clients::make_live_text_generator(live(section));
  }

  std::shared_ptr<clients::ImageGenerator> image_generator() const {
    if (common_.mock) return std::make_shared<clients::MockImageGenerator>(image_store());
    auto store = image_store();
    if (!store) throw ConfigError("live image generation needs --images or image_dir");
    return clients::make_live_image_generator(live("image"), store);
  }

  std::shared_ptr<clients::Embedder> embedder() const {
    if (common_.mock) return std::make_shared<clients::MockEmbedder>();
    return clients::make_live_embedder(live("embed"));
  }

  std::shared_ptr<clients::VlmSubject> subject(const std::string& mock_mode) const {
    if (common_.mock) {
      static const std::map<std::string, clients::MockSubject::Mode> kModes = {
          {"hashed", clients::MockSubject::Mode::kHashed},
          {"always-pun", clients::MockSubject::Mode::kAlwaysPun},
          {"never-pun", clients::MockSubject::Mode::kNeverPun},
          {"follows-bias", clients::MockSubject::Mode::kFollowsBias}};
      return std::make_shared<clients::MockSubject>(kModes.at(mock_mode));
    }
    return clients::make_live_subject(live("subject"), image_store());
  }

  std::shared_ptr<clients::PairJudge> judge() const {
    if (common_.mock) return std::make_shared<clients::MockJudge>();
    return std::make_shared<clients::LlmJudge>(text_generator("judge"));
  }

 private:
  const Common& common_;
  json doc_ = json::object();
};

// --- shared helpers -----------------------------------------------------------

std::string require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ArgumentError(flag + " is required");
  return value;
}

lexres::PronDict load_prondict(const Common& c) {
  return lexres::parse_pron_dict(text::read_file(require(c.prondict, "--prondict")));
}

lexres::FrequencyTable load_freq(const Common& c) {
  return lexres::parse_frequency_table(text::read_file(require(c.freq, "--freq")));
}

lexres::WordNetDb load_wordnet(const Common& c) {
  return lexres::WordNetDb::load_dir(require(c.wordnet, "--wordnet"));
}

std::map<std::string, std::string> resource_fingerprints(const Common& c) {
  std::map<std::string, std::string> out;
  if (!c.prondict.empty()) out["prondict"] = store::fingerprint(c.prondict);
  if (!c.freq.empty()) out["freq"] = store::fingerprint(c.freq);
  if (!c.wordnet.empty()) out["wordnet"] = store::fingerprint(c.wordnet);
  return out;
}

// "a/b.jsonl" + "run2" -> "a/b.run2.jsonl"
std::string with_tag(const std::string& path, const std::string& tag) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "." + tag + p.extension().string())).string();
}

void report_failures(const std::vector<std::string>& failures, std::ostream& err) {
  for (const auto& f : failures) err << "skipped: " << f << "\n";
}

std::string counts_line(const store::Manifest& m) {
  std::string s;
  for (const auto& [kind, c] : m.counts) {
    if (!s.empty()) s += ", ";
    s += std::string(miner::to_string(kind)) + " " + std::to_string(c.positives) + "/" +
         std::to_string(c.es) + "/" + std::to_string(c.rs);
  }
  return s + " (positives/ES/RS)";
}

// --- subcommands --------------------------------------------------------------

struct MineArgs {
  std::string out;
};

int cmd_mine(const Common& c, const MineArgs& a, miner::PunKind kind, std::ostream& out) {
  Config cfg(c);
  auto mc = cfg.miner();
  auto freq = load_freq(c);
  auto db = load_wordnet(c);
  std::vector<miner::PunTuple> tuples = kind == miner::PunKind::kHomophonic
                                            ? miner::mine_homophones(load_prondict(c), freq, db, mc)
                                            : miner::mine_homographs(freq, db, mc);
  store::save_tuples(tuples, require(a.out, "--out"));
  out << tuples.size() << " " << miner::to_string(kind) << " tuples written to " << a.out << "\n";
  return kExitOk;
}

struct GenerateArgs {
  std::vector<std::string> tuples;
  std::string out;
};

int cmd_generate(const Common& c, const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  Config cfg(c);
  if (a.tuples.empty()) throw ArgumentError("--tuples is required");
  std::vector<miner::PunTuple> tuples;
  for (const auto& path : a.tuples) {
    auto more = store::load_tuples(path);
    tuples.insert(tuples.end(), more.begin(), more.end());
  }
  auto textgen = cfg.text_generator();
  auto imagegen = cfg.image_generator();
  auto batch = pipeline::build_positives(tuples, *textgen, *imagegen, c.seed, c.workers);
  report_failures(batch.failures, err);
  auto resources = resource_fingerprints(c);
  for (std::size_t i = 0; i < a.tuples.size(); ++i) {
    resources[i == 0 ? "tuples" : "tuples." + std::to_string(i + 1)] = store::fingerprint(a.tuples[i]);
  }
  auto m = store::save_dataset(batch.samples, require(a.out, "--out"), {c.seed, resources, {}, ""});
  out << batch.samples.size() << " positives written to " << a.out << "; " << counts_line(m) << "\n";
  return kExitOk;
}

struct NegativesArgs {
  std::string dataset;
  std::string out;
  std::string pool;
};

int cmd_negatives(const Common& c, const NegativesArgs& a, std::ostream& out, std::ostream& err) {
  Config cfg(c);
  store::Manifest in;
  auto samples = store::load_dataset(require(a.dataset, "--dataset"), &in);
  pipeline::SubstitutePool pool = a.pool.empty()
                                      ? pipeline::SubstitutePool::bundled()
                                      : pipeline::SubstitutePool::parse(text::read_file(a.pool));
  auto textgen = cfg.text_generator();
  auto imagegen = cfg.image_generator();
  auto batch = pipeline::build_negatives(samples, *textgen, *imagegen, pool, c.seed, c.workers);
  report_failures(batch.failures, err);
  auto resources = in.resources;
  for (auto& [k, v] : resource_fingerprints(c)) resources[k] = v;
  resources["substitute_pool"] = a.pool.empty()
                                     ? "bundled-v" + std::to_string(pool.version())
                                     : store::fingerprint(a.pool);
  auto m = store::save_dataset(batch.samples, require(a.out, "--out"), {c.seed, resources, {}, ""});
  out << batch.samples.size() << " samples written to " << a.out << "; " << counts_line(m) << "\n";
  return kExitOk;
}

struct DivfilterArgs {
  std::string dataset;
  std::string embeddings;
  std::string out;
  std::optional<std::size_t> k;
  std::optional<std::size_t> k_homophonic;
  std::optional<std::size_t> k_homographic;
};

int cmd_divfilter(const Common& c, const DivfilterArgs& a, std::ostream& out) {
  Config cfg(c);
  require(a.out, "--out");
  if (a.dataset.empty() == a.embeddings.empty()) {
    throw ArgumentError("pass exactly one of --dataset and --embeddings");
  }

  if (!a.embeddings.empty()) {
    if (!a.k) throw ArgumentError("--k is required with --embeddings");
    auto matrix = store::load_embeddings(a.embeddings);
    auto result = divfilter::diversity_filter(matrix, *a.k);
    std::string ids;
    for (const auto& id : result.kept_ids) ids += id + "\n";
    text::write_file(a.out, ids);
    out << result.kept_ids.size() << " of " << matrix.size() << " kept; d_min " << result.d_min
        << "\n";
    return kExitOk;
  }

  store::Manifest in;
  auto samples = store::load_dataset(a.dataset, &in);
  auto embedder = cfg.embedder();
  std::set<std::string> kept;
  for (miner::PunKind kind : {miner::PunKind::kHomophonic, miner::PunKind::kHomographic}) {
    std::vector<pipeline::Sample> positives;
    for (const auto& s : samples) {
      if (s.is_pun() && s.pun_type() == kind) positives.push_back(s);
    }
    if (positives.empty()) continue;
    std::optional<std::size_t> k = kind == miner::PunKind::kHomophonic ? a.k_homophonic : a.k_homographic;
    if (!k) k = a.k;
    if (!k) throw ArgumentError("--k (or a per-type --k-*) is required with --dataset");
    std::size_t target = std::min(*k, positives.size());
    for (const auto& s : pipeline::dedupe_by_diversity(positives, *embedder, target)) kept.insert(s.id);
  }
  std::vector<pipeline::Sample> filtered;
  for (const auto& s : samples) {
    const std::string& anchor = s.is_pun() ? s.id : s.substitution->source_id;
    if (kept.count(anchor)) filtered.push_back(s);
  }
  auto m = store::save_dataset(filtered, a.out, {c.seed, in.resources, {}, ""});
  out << filtered.size() << " samples written to " << a.out << "; " << counts_line(m) << "\n";
  return kExitOk;
}

struct SplitArgs {
  std::string dataset;
  std::string train_out;
  std::string test_out;
  std::optional<long> train_homophonic, test_homophonic;
  std::optional<long> train_homographic, test_homographic;
};

int cmd_split(const Common& c, const SplitArgs& a, std::ostream& out) {
  Config cfg(c);
  store::Manifest in;
  auto samples = store::load_dataset(require(a.dataset, "--dataset"), &in);
  store::SplitSpec spec = store::default_split(samples, c.seed);
  auto apply = [&](miner::PunKind kind, const std::optional<long>& train,
                   const std::optional<long>& test) {
    const long total = in.counts[kind].positives;
    if (train) {
      spec.train[kind] = *train;
      spec.test[kind] = test ? *test : total - *train;
    } else if (test) {
      spec.test[kind] = *test;
      spec.train[kind] = total - *test;
    }
  };
  apply(miner::PunKind::kHomophonic, a.train_homophonic, a.test_homophonic);
  apply(miner::PunKind::kHomographic, a.train_homographic, a.test_homographic);

  auto result = store::split(samples, spec);
  std::string train_path = a.train_out.empty() ? with_tag(a.dataset, "train") : a.train_out;
  std::string test_path = a.test_out.empty() ? with_tag(a.dataset, "test") : a.test_out;
  auto mt = store::save_dataset(result.train, train_path, {in.seed, in.resources, spec, "train"});
  auto ms = store::save_dataset(result.test, test_path, {in.seed, in.resources, spec, "test"});
  out << "train: " << result.train.size() << " samples, " << counts_line(mt) << " -> " << train_path
      << "\n";
  out << "test: " << result.test.size() << " samples, " << counts_line(ms) << " -> " << test_path
      << "\n";
  return kExitOk;
}

struct ExportArgs {
  std::string dataset;
  std::string out;
};

int cmd_export(const Common& c, const ExportArgs& a, std::ostream& out) {
  Config cfg(c);
  store::Manifest in;
  auto samples = store::load_dataset(require(a.dataset, "--dataset"), &in);
  if (in.partition == "test") throw ArgumentError(a.dataset + " is a test partition");
  auto records = store::export_sft(samples);
  store::save_sft(records, require(a.out, "--out"));
  out << records.size() << " SFT records written to " << a.out << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string dataset;
  std::vector<std::string> tasks;
  bool pun_cot = false;
  int repeat = 1;
  std::string subject_mode = "hashed";
  bool judge = false;
  std::string transcript;
  std::string metrics;
  std::string table;
};

std::vector<evalharness::Task> parse_tasks(const std::vector<std::string>& names) {
  std::vector<evalharness::Task> tasks;
  for (const auto& n : names) tasks.push_back(prompts::parse_task(n));
  if (tasks.empty()) {
    tasks = {evalharness::Task::kDetection, evalharness::Task::kLocalization,
             evalharness::Task::kExplanation};
  }
  return tasks;
}

void emit_reports(const std::vector<evalharness::MetricsReport>& reports, const std::string& metrics,
                  const std::string& table, std::ostream& out) {
  std::string metrics_text, table_text;
  for (const auto& r : reports) {
    metrics_text += store::encode_metrics(r);
    table_text += evalharness::render_table(r);
  }
  if (!metrics.empty()) text::write_file(metrics, metrics_text);
  if (!table.empty()) text::write_file(table, table_text);
  out << table_text;
}

std::vector<evalharness::MetricsReport> with_mean(std::vector<evalharness::MetricsReport> runs) {
  if (runs.size() > 1) {
    auto mean = evalharness::mean_report(runs);
    runs.push_back(std::move(mean));
  }
  return runs;
}

int cmd_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out) {
  Config cfg(c);
  auto samples = store::load_dataset(require(a.dataset, "--dataset"));
  auto specs = evalharness::standard_specs(parse_tasks(a.tasks), a.pun_cot);
  auto subject = cfg.subject(a.subject_mode);
  std::optional<lexres::WordNetDb> db;
  if (!c.wordnet.empty()) db = load_wordnet(c);
  std::shared_ptr<clients::PairJudge> judge;
  if (a.judge) judge = cfg.judge();

  std::vector<evalharness::MetricsReport> reports;
  for (int run = 1; run <= a.repeat; ++run) {
    evalharness::EvaluateOptions opts;
    opts.seed = a.repeat == 1 ? c.seed : text::hash_combine(c.seed, static_cast<std::uint64_t>(run));
    opts.workers = c.workers;
    opts.aggregate = {db ? &*db : nullptr, judge.get(), opts.seed};
    auto result = evalharness::evaluate(samples, *subject, specs, opts);
    result.report.label = a.repeat == 1 ? "run" : "run " + std::to_string(run);
    if (!a.transcript.empty()) {
      std::string path = a.repeat == 1 ? a.transcript : with_tag(a.transcript, "run" + std::to_string(run));
      store::save_transcript(result.records, path);
    }
    reports.push_back(std::move(result.report));
  }
  emit_reports(with_mean(std::move(reports)), a.metrics, a.table, out);
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> transcripts;
  bool judge = false;
  std::string metrics;
  std::string table;
};

int cmd_report(const Common& c, const ReportArgs& a, std::ostream& out) {
  Config cfg(c);
  std::optional<lexres::WordNetDb> db;
  if (!c.wordnet.empty()) db = load_wordnet(c);
  std::shared_ptr<clients::PairJudge> judge;
  if (a.judge) judge = cfg.judge();

  std::vector<evalharness::MetricsReport> reports;
  for (std::size_t i = 0; i < a.transcripts.size(); ++i) {
    auto records = store::load_transcript(a.transcripts[i]);
    std::set<evalharness::TaskSpec> specs;
    for (const auto& r : records) {
      for (const auto& [spec, resp] : r.responses) specs.insert(spec);
    }
    auto report = evalharness::aggregate(records, {specs.begin(), specs.end()},
                                         {db ? &*db : nullptr, judge.get(), c.seed});
    report.label = a.transcripts.size() == 1 ? "run" : "run " + std::to_string(i + 1);
    reports.push_back(std::move(report));
  }
  emit_reports(with_mean(std::move(reports)), a.metrics, a.table, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimodal pun benchmark toolkit", "multipun"};
  app.require_subcommand(1);

  Common common;
  MineArgs mine_hp, mine_hg;
  GenerateArgs gen;
  NegativesArgs neg;
  DivfilterArgs div;
  SplitArgs spl;
  ExportArgs exp;
  EvaluateArgs ev;
  ReportArgs rep;

  auto* c_mine_hp = app.add_subcommand("mine-homophones", "Mine homophonic pun tuples");
  add_common(c_mine_hp, common);
  c_mine_hp->add_option("--out", mine_hp.out, "Output tuples JSONL")->required();

  auto* c_mine_hg = app.add_subcommand("mine-homographs", "Mine homographic pun tuples");
  add_common(c_mine_hg, common);
  c_mine_hg->add_option("--out", mine_hg.out, "Output tuples JSONL")->required();

  auto* c_gen = app.add_subcommand("generate", "Build positive samples from tuples");
  add_common(c_gen, common);
  c_gen->add_option("--tuples", gen.tuples, "Input tuples JSONL (repeatable)")->required();
  c_gen->add_option("--out", gen.out, "Output dataset JSONL")->required();

  auto* c_neg = app.add_subcommand("negatives", "Add ES and RS negatives for every positive");
  add_common(c_neg, common);
  c_neg->add_option("--dataset", neg.dataset, "Input dataset JSONL")->required();
  c_neg->add_option("--out", neg.out, "Output dataset JSONL")->required();
  c_neg->add_option("--pool", neg.pool, "Substitute noun list (default: bundled)");

  auto* c_div = app.add_subcommand("divfilter", "Keep a diverse subset of positives");
  add_common(c_div, common);
  c_div->add_option("--dataset", div.dataset, "Input dataset JSONL");
  c_div->add_option("--embeddings", div.embeddings, "Input id+vector JSONL");
  c_div->add_option("--out", div.out, "Output dataset JSONL, or id list with --embeddings")->required();
  c_div->add_option("--k", div.k, "Survivors (per pun type with --dataset)");
  c_div->add_option("--k-homophonic", div.k_homophonic, "Homophonic survivors");
  c_div->add_option("--k-homographic", div.k_homographic, "Homographic survivors");

  auto* c_split = app.add_subcommand("split", "Split into train and test partitions");
  add_common(c_split, common);
  c_split->add_option("--dataset", spl.dataset, "Input dataset JSONL")->required();
  c_split->add_option("--train-out", spl.train_out, "Train partition path");
  c_split->add_option("--test-out", spl.test_out, "Test partition path");
  c_split->add_option("--train-homophonic", spl.train_homophonic);
  c_split->add_option("--test-homophonic", spl.test_homophonic);
  c_split->add_option("--train-homographic", spl.train_homographic);
  c_split->add_option("--test-homographic", spl.test_homographic);

  auto* c_exp = app.add_subcommand("export-sft", "Export fine-tuning records from a train split");
  add_common(c_exp, common);
  c_exp->add_option("--dataset", exp.dataset, "Train partition JSONL")->required();
  c_exp->add_option("--out", exp.out, "Output SFT JSONL")->required();

  auto* c_eval = app.add_subcommand("evaluate", "Query a subject model and score it");
  add_common(c_eval, common);
  c_eval->add_option("--dataset", ev.dataset, "Dataset JSONL")->required();
  c_eval->add_option("--task", ev.tasks, "detection, localization or explanation (repeatable)")
      ->check(CLI::IsMember({"detection", "localization", "explanation"}));
  c_eval->add_flag("--pun-cot", ev.pun_cot, "Also run the staged-reasoning explanation prompt");
  c_eval->add_option("--repeat", ev.repeat, "Independent runs; a mean row is added")
      ->check(CLI::Range(1, 100));
  c_eval->add_option("--subject-mode", ev.subject_mode, "Mock subject behaviour")
      ->check(CLI::IsMember({"hashed", "always-pun", "never-pun", "follows-bias"}))
      ->capture_default_str();
  c_eval->add_flag("--judge", ev.judge, "Compute pairwise win/tie/loss against the gold explanation");
  c_eval->add_option("--transcript", ev.transcript, "Per-sample responses JSONL");
  c_eval->add_option("--metrics", ev.metrics, "Metrics JSONL");
  c_eval->add_option("--table", ev.table, "Plain-text table");

  auto* c_rep = app.add_subcommand("report", "Re-aggregate saved transcripts");
  add_common(c_rep, common);
  c_rep->add_option("--transcript", rep.transcripts, "Transcript JSONL (repeatable)")->required();
  c_rep->add_flag("--judge", rep.judge, "Compute pairwise win/tie/loss");
  c_rep->add_option("--metrics", rep.metrics, "Metrics JSONL");
  c_rep->add_option("--table", rep.table, "Plain-text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_mine_hp->parsed()) return cmd_mine(common, mine_hp, miner::PunKind::kHomophonic, out);
    if (c_mine_hg->parsed()) return cmd_mine(common, mine_hg, miner::PunKind::kHomographic, out);
    if (c_gen->parsed()) return cmd_generate(common, gen, out, err);
    if (c_neg->parsed()) return cmd_negatives(common, neg, out, err);
    if (c_div->parsed()) return cmd_divfilter(common, div, out);
    if (c_split->parsed()) return cmd_split(common, spl, out);
    if (c_exp->parsed()) return cmd_export(common, exp, out);
    if (c_eval->parsed()) return cmd_evaluate(common, ev, out);
    if (c_rep->parsed()) return cmd_report(common, rep, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace multipun::cli
