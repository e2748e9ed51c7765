#include "reasonforge/cli.hpp"

#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "reasonforge/analysis.hpp"
#include "reasonforge/budget.hpp"
#include "reasonforge/error.hpp"
#include "reasonforge/service.hpp"
#include "reasonforge/text.hpp"

namespace rforge {

Json rollout_to_json(const Rollout& r) {
  Json j;
  j["problemId"] = r.problem_id;
  j["sampleIndex"] = r.sample_index;
  j["outputText"] = r.output_text;
  return j;
}

Rollout rollout_from_json(const Json& j) {
  try {
    return Rollout{j.at("problemId").get<std::string>(), j.value("sampleIndex", std::uint64_t{0}),
                   j.at("outputText").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("rollout: ") + e.what());
  }
}

namespace {

template <typename F>
void read_jsonl(const std::string& path, F&& each) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    try {
      each(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidArgument, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

// Runs f(i) for i in [0, n) over contiguous chunks.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t start = 0; start < n; start += chunk) {
    jobs.push_back(std::async(std::launch::async, [&, start] {
      for (std::size_t i = start; i < std::min(n, start + chunk); ++i) f(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

std::unordered_map<std::string, const CorpusRecord*> index_corpus(const std::vector<CorpusRecord>& gold) {
  std::unordered_map<std::string, const CorpusRecord*> by_id;
  for (const auto& r : gold) by_id.try_emplace(r.id, &r);
  return by_id;
}

const CorpusRecord& lookup(const std::unordered_map<std::string, const CorpusRecord*>& by_id, const std::string& id) {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw Error(Errc::InvalidArgument, "problem '" + id + "' is not in the gold corpus");
  return *it->second;
}

}  // namespace

std::vector<Rollout> read_rollouts(const std::string& path) {
  std::vector<Rollout> out;
  read_jsonl(path, [&](const Json& j) { out.push_back(rollout_from_json(j)); });
  return out;
}

std::vector<SampleRecord> evaluate_rollouts(const std::vector<CorpusRecord>& gold, const std::vector<Rollout>& rollouts,
                                            unsigned threads) {
  auto by_id = index_corpus(gold);
  for (const auto& r : rollouts) lookup(by_id, r.problem_id);
  std::vector<SampleRecord> out(rollouts.size());
  parallel_for(rollouts.size(), threads, [&](std::size_t i) {
    const auto& r = rollouts[i];
    const CorpusRecord& g = lookup(by_id, r.problem_id);
    out[i] = SampleRecord{r.problem_id, r.sample_index, g.op, g.template_id,
                          evaluate_solution(g.graph, r.output_text, {}, g.graph.answer)};
  });
  return out;
}

std::vector<Json> reward_rollouts(const std::vector<CorpusRecord>& gold, const std::vector<Rollout>& rollouts,
                                  const RewardConfig& cfg, unsigned threads) {
  cfg.check();
  auto by_id = index_corpus(gold);
  for (const auto& r : rollouts) lookup(by_id, r.problem_id);
  std::vector<Json> out(rollouts.size());
  parallel_for(rollouts.size(), threads, [&](std::size_t i) {
    const auto& r = rollouts[i];
    const CorpusRecord& g = lookup(by_id, r.problem_id);
    Json j;
    j["problemId"] = r.problem_id;
    j["sampleIndex"] = r.sample_index;
    j.update(score_solution(g.graph, g.graph.answer, r.output_text, {}, cfg));
    out[i] = std::move(j);
  });
  return out;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeedChoice {
  std::uint64_t value = 0;
  std::string source;
};

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw UsageError(what + " is not a seed: '" + text + "'");
  return v;
}

// Flag, then REASON_FORGE_SEED, then the recipe's own seed, then a fresh one.
SeedChoice resolve_seed(const std::optional<std::uint64_t>& flag, const std::optional<std::uint64_t>& fallback = {}) {
  if (flag) return {*flag, "flag"};
  if (const char* env = std::getenv("REASON_FORGE_SEED"); env && *env) {
    return {parse_seed(env, "REASON_FORGE_SEED"), "env"};
  }
  if (fallback) return {*fallback, "recipe"};
  std::random_device rd;
  return {(static_cast<std::uint64_t>(rd()) << 32) ^ rd(), "generated"};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, path + ": " + e.what());
  }
}

// Writes to `path`, or to `fallback` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(Errc::Io, "cannot write " + path);
  f << text;
  if (!f) throw Error(Errc::Io, "write failed for " + path);
}

std::vector<std::uint64_t> parse_ks(const std::string& text) {
  std::vector<std::uint64_t> ks;
  for (const auto& part : split(text, ',')) {
    auto k = parse_seed(trim(part), "--k entry");
    if (k == 0) throw UsageError("--k entries must be positive");
    ks.push_back(k);
  }
  if (ks.empty()) throw UsageError("--k is empty");
  return ks;
}

Json sample_to_json(const SampleRecord& s) {
  Json j;
  j["type"] = "sample";
  j["problemId"] = s.problem_id;
  j["sampleIndex"] = s.sample_index;
  j["op"] = s.op_count;
  j["template"] = s.template_id;
  j.update(to_json(s.result));
  return j;
}

EvalResult eval_result_from_json(const Json& j) {
  EvalResult r;
  r.process_acc = parse_rational(j.at("process_acc").get<std::string>());
  r.answer_correct = j.at("answer_correct").get<bool>();
  r.verified_correct = j.at("verified_correct").get<bool>();
  for (const auto& e : j.at("per_node")) {
    r.per_node.push_back({e.at(0).get<NodeId>(), failure_from_name(e.at(1).get<std::string>())});
  }
  return r;
}

struct Options {
  // shared
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out;
  // generate
  std::string recipe;
  std::string preset;
  std::optional<std::uint64_t> budget;
  std::string split;
  std::vector<std::string> template_files;
  // dedup
  std::vector<std::string> inputs;
  std::string scope = "across-splits";
  std::string dropped;
  // evaluate / reward / analyze
  std::string gold;
  std::string rollouts;
  std::string ks = "1";
  std::string buckets;
  std::string csv;
  std::string report;
  std::string reward_preset;
  std::string alpha;
  std::string mode;
  // budget
  std::string total;
  std::string beta;
  std::optional<int> gamma;
  std::optional<std::string> rollouts_per_prompt;
  std::optional<std::string> seq_len;
  std::optional<std::string> rl_batch;
  std::optional<std::string> mid_tokens_per_step;
  std::optional<std::string> params;
  std::string totals;
  std::string betas;
  std::string table_preset;
  bool as_csv = false;
  // serve
  std::string corpus;
  std::string socket;
  unsigned workers = 1;
  // selfcheck
  std::uint64_t n = 1000;
  std::int64_t op_min = 2;
  std::int64_t op_max = 20;
};

RewardConfig reward_from(const Options& o) {
  RewardConfig cfg;
  if (!o.config.empty()) {
    Json j = load_json_file(o.config);
    if (j.contains("reward")) cfg = reward_config_from_json(j["reward"]);
  }
  if (!o.reward_preset.empty()) cfg = reward_preset(o.reward_preset);
  if (!o.alpha.empty()) cfg.alpha = parse_rational(o.alpha);
  if (!o.mode.empty()) {
    if (o.mode == "COMPOSITE" || o.mode == "composite") {
      cfg.mode = RewardMode::Composite;
    } else if (o.mode == "STRICT" || o.mode == "strict") {
      cfg.mode = RewardMode::Strict;
    } else {
      throw UsageError("--mode must be COMPOSITE or STRICT");
    }
  }
  cfg.check();
  return cfg;
}

BudgetConstants constants_from(const Options& o) {
  BudgetConstants c;
  if (!o.config.empty()) {
    Json j = load_json_file(o.config);
    if (j.contains("budget")) c = budget_constants_from_json(j["budget"], c);
  }
  auto integer = [](const std::string& s) {
    Rational q = parse_rational(s);
    if (denominator(q) != 1) throw Error(Errc::InvalidArgument, "'" + s + "' is not an integer");
    return BigInt(numerator(q));
  };
  if (o.params) c.params = parse_rational(*o.params);
  if (o.gamma) c.gamma = *o.gamma;
  if (o.rollouts_per_prompt) c.rollouts = integer(*o.rollouts_per_prompt);
  if (o.seq_len) c.seq_len = integer(*o.seq_len);
  if (o.rl_batch) c.rl_batch = integer(*o.rl_batch);
  if (o.mid_tokens_per_step) c.mid_tokens_per_step = integer(*o.mid_tokens_per_step);
  c.check();
  return c;
}

int cmd_generate(const Options& o, std::ostream& out) {
  if (o.recipe.empty() == o.preset.empty()) throw UsageError("give exactly one of --recipe / --preset");
  if (o.out.empty()) throw UsageError("--out is required");
  TemplateRegistry templates = TemplateRegistry::builtin();
  for (const auto& f : o.template_files) templates.load_file(f);

  RecipeSpec spec;
  std::optional<std::uint64_t> recipe_seed;
  if (!o.recipe.empty()) {
    Json j = load_json_file(o.recipe);
    spec = recipe_from_json(j);
    if (j.contains("seed")) recipe_seed = spec.seed;
  } else {
    spec = recipe_preset(o.preset);
  }
  if (o.budget) spec.budget = *o.budget;
  if (!o.split.empty()) spec.split = o.split;
  SeedChoice seed = resolve_seed(o.seed, recipe_seed);
  spec.seed = seed.value;

  auto t0 = std::chrono::steady_clock::now();
  auto records = build_corpus(spec, templates, o.threads);
  write_corpus(o.out, records);

  std::uint64_t tokens = 0;
  for (const auto& r : records) tokens += r.tokens;
  Json meta;
  meta["v"] = kCorpusSchemaVersion;
  meta["hash"] = kHashAlgorithm;
  meta["seed"] = seed.value;
  meta["seedSource"] = seed.source;
  meta["records"] = records.size();
  meta["tokens"] = tokens;
  meta["recipe"] = to_json(spec);
  emit(o.out + ".meta.json", meta.dump(2) + "\n", out);

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "wrote " << records.size() << " records (" << tokens << " tokens) to " << o.out << " seed=" << seed.value
      << " [" << seed.source << "] in " << std::fixed << std::setprecision(2) << secs << "s\n";
  return 0;
}

int cmd_dedup(const Options& o, std::ostream& out) {
  if (o.inputs.empty()) throw UsageError("--in is required");
  DedupScope scope;
  if (o.scope == "across-splits") {
    scope = DedupScope::AcrossSplits;
  } else if (o.scope == "within-split") {
    scope = DedupScope::WithinSplit;
  } else {
    throw UsageError("--scope must be within-split or across-splits");
  }
  std::vector<CorpusRecord> all;
  for (const auto& path : o.inputs) {
    auto part = read_corpus(path);
    std::move(part.begin(), part.end(), std::back_inserter(all));
  }
  auto result = dedup(std::move(all), scope);
  if (!o.out.empty()) write_corpus(o.out, result.kept);
  if (!o.dropped.empty()) write_corpus(o.dropped, result.dropped);
  auto findings = verify_disjoint(result.kept);
  out << "kept " << result.kept.size() << " dropped " << result.dropped.size() << " cross-split " << findings.size()
      << "\n";
  for (const auto& f : findings) out << "  " << f.id << " in " << join(f.splits, ",") << "\n";
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  if (o.gold.empty() || o.rollouts.empty()) throw UsageError("--gold and --rollouts are required");
  auto ks = parse_ks(o.ks);
  auto buckets = parse_buckets(o.buckets.empty() ? "difficulty" : o.buckets);
  auto gold = read_corpus(o.gold);
  auto samples = evaluate_rollouts(gold, read_rollouts(o.rollouts), o.threads);
  auto cells = bucketed_report(aggregate_problems(samples), buckets, ks);

  std::ostringstream report;
  for (const auto& s : samples) report << dump_compact(sample_to_json(s)) << "\n";
  for (const auto& c : cells) {
    Json j;
    j["type"] = "cell";
    j.update(to_json(c));
    report << dump_compact(j) << "\n";
  }
  emit(o.out, report.str(), out);
  if (!o.csv.empty()) emit(o.csv, report_csv(cells, ks), out);
  if (!o.out.empty() && o.out != "-") out << report_csv(cells, ks);
  return 0;
}

int cmd_reward(const Options& o, std::ostream& out) {
  if (o.gold.empty() || o.rollouts.empty()) throw UsageError("--gold and --rollouts are required");
  RewardConfig cfg = reward_from(o);
  auto rows = reward_rollouts(read_corpus(o.gold), read_rollouts(o.rollouts), cfg, o.threads);
  std::ostringstream text;
  for (const auto& r : rows) text << dump_compact(r) << "\n";
  emit(o.out, text.str(), out);
  return 0;
}

int cmd_budget(const Options& o, std::ostream& out) {
  if (o.total.empty() || o.beta.empty()) throw UsageError("--total and --beta are required");
  BudgetPlan plan = allocate(parse_rational(o.total), parse_rational(o.beta), constants_from(o));
  if (o.as_csv) {
    emit(o.out, plans_csv({plan}), out);
  } else {
    emit(o.out, to_json(plan).dump(2) + "\n", out);
  }
  return 0;
}

int cmd_budget_table(const Options& o, std::ostream& out) {
  BudgetConstants c = constants_from(o);
  if (!o.table_preset.empty()) {
    if (o.table_preset != "table5") throw UsageError("unknown table preset '" + o.table_preset + "'");
    auto rows = comparison_table(c);
    emit(o.out, o.as_csv ? comparison_csv(rows) : comparison_text(rows), out);
    return 0;
  }
  if (o.totals.empty() || o.betas.empty()) throw UsageError("give --preset, or --totals and --betas");
  std::vector<Rational> totals;
  std::vector<Rational> betas;
  for (const auto& t : split(o.totals, ',')) totals.push_back(parse_rational(trim(t)));
  for (const auto& b : split(o.betas, ',')) betas.push_back(parse_rational(trim(b)));
  emit(o.out, plans_csv(plan_table(totals, betas, c)), out);
  return 0;
}

int cmd_similarity(const Options& o, std::ostream& out) {
  if (o.gold.empty() || o.rollouts.empty()) throw UsageError("--gold and --rollouts are required");
  auto buckets = parse_buckets(o.buckets.empty() ? "similarity" : o.buckets);
  auto gold = read_corpus(o.gold);
  auto by_id = index_corpus(gold);
  std::vector<SimilarityItem> items;
  std::size_t skipped = 0;
  for (const auto& r : read_rollouts(o.rollouts)) {
    const CorpusRecord& g = lookup(by_id, r.problem_id);
    ParsedTrace trace = parse_trace(r.output_text);
    if (!evaluate_trace(g.graph, trace, g.graph.answer).verified_correct) continue;
    auto structure = trace_structure(trace);
    if (!structure) {
      ++skipped;
      continue;
    }
    items.push_back({g.op, struct_signature(*structure), struct_signature(g.graph)});
  }
  emit(o.out, histogram_csv(similarity_distribution(items, buckets)), out);
  if (skipped) out << "skipped " << skipped << " traces without a recoverable structure\n";
  return 0;
}

int cmd_errors(const Options& o, std::ostream& out) {
  if (o.report.empty()) throw UsageError("--report is required");
  std::vector<EvalResult> results;
  read_jsonl(o.report, [&](const Json& j) {
    if (j.value("type", std::string()) == "sample") results.push_back(eval_result_from_json(j));
  });
  emit(o.out, error_csv(error_distribution(results)), out);
  return 0;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<CorpusRecord> corpus;
  if (!o.corpus.empty()) corpus = read_corpus(o.corpus);
  Service service(std::move(corpus), reward_from(o));
  reset_stop();
  install_stop_handlers();
  err << "serving v1 (" << service.corpus_size() << " gold records, " << o.workers << " workers)\n" << std::flush;
  if (!o.socket.empty()) {
    service.serve_unix(o.socket, o.workers);
  } else {
    service.run(STDIN_FILENO, [&](const std::string& line) { out << line << '\n' << std::flush; }, o.workers);
  }
  return 0;
}

int cmd_selfcheck(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.op_min < 2 || o.op_max < o.op_min) throw UsageError("invalid --op-min/--op-max");
  SeedChoice seed = resolve_seed(o.seed);
  const auto& templates = TemplateRegistry::builtin();
  const auto ids = templates.ids();
  const std::uint64_t span = static_cast<std::uint64_t>(o.op_max - o.op_min + 1);
  std::vector<std::string> failures(o.n);
  std::vector<char> ok(o.n, 0);

  parallel_for(o.n, o.threads, [&](std::size_t i) {
    StructuralConfig scfg;
    scfg.op_min = scfg.op_max = o.op_min + static_cast<std::int64_t>((i / (2 * ids.size())) % span);
    InstanceConfig icfg;
    icfg.mode = (i / ids.size()) % 2 ? Mode::Reverse : Mode::Forward;
    const Template& t = templates.get(ids[i % ids.size()]);
    try {
      CorpusRecord r = make_record(t, scfg, icfg, derive_seed(seed.value, i), "selfcheck");
      EvalResult e = evaluate_solution(r.graph, r.solution, r.answer, r.graph.answer);
      ok[i] = e.verified_correct && r.answer == std::to_string(r.graph.answer);
      if (!ok[i]) failures[i] = "process_acc " + to_decimal(e.process_acc);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  std::size_t verified = 0;
  for (std::size_t i = 0; i < o.n; ++i) {
    if (ok[i]) {
      ++verified;
    } else {
      err << "instance " << i << ": " << failures[i] << "\n";
    }
  }
  out << verified << "/" << o.n << " verified (seed " << seed.value << ")\n";
  return verified == o.n ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic reasoning corpora, trace verification, rewards and budgets", "reasonforge"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON file with \"budget\" and/or \"reward\" sections");

  auto* gen = app.add_subcommand("generate", "Build a corpus from a recipe");
  gen->add_option("--recipe", o.recipe, "Recipe JSON file");
  gen->add_option("--preset", o.preset, "Named recipe: " + join(recipe_preset_names(), ", "));
  gen->add_option("--out", o.out, "Output JSONL path")->required();
  gen->add_option("--seed", o.seed, "Seed (else REASON_FORGE_SEED, the recipe seed, or a fresh one)");
  gen->add_option("--budget", o.budget, "Override the recipe budget (tokens for PRE/MID, samples for POST)");
  gen->add_option("--split", o.split, "Split label");
  gen->add_option("--templates", o.template_files, "Extra template JSON files");
  gen->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* ded = app.add_subcommand("dedup", "Drop exact duplicates and report cross-split overlap");
  ded->add_option("--in", o.inputs, "Corpus files, in priority order")->required();
  ded->add_option("--out", o.out, "Deduplicated corpus");
  ded->add_option("--dropped", o.dropped, "Dropped records");
  ded->add_option("--scope", o.scope, "within-split | across-splits");

  auto* ev = app.add_subcommand("evaluate", "Verify rollouts against gold graphs and report pass@k");
  ev->add_option("--gold", o.gold, "Gold corpus")->required();
  ev->add_option("--rollouts", o.rollouts, "Rollout JSONL")->required();
  ev->add_option("--k", o.ks, "Comma-separated k values");
  ev->add_option("--buckets", o.buckets, "difficulty | similarity | op2-10,op11-20,...");
  ev->add_option("--out", o.out, "Report JSONL (sample and cell records)");
  ev->add_option("--csv", o.csv, "Bucketed table as CSV");
  ev->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* rw = app.add_subcommand("reward", "Score rollouts into rewards");
  rw->add_option("--gold", o.gold, "Gold corpus")->required();
  rw->add_option("--rollouts", o.rollouts, "Rollout JSONL")->required();
  rw->add_option("--reward", o.reward_preset, "outcome_only | pv_only | mix_0.2 | strict");
  rw->add_option("--alpha", o.alpha, "Outcome weight in [0,1]");
  rw->add_option("--mode", o.mode, "COMPOSITE | STRICT");
  rw->add_option("--out", o.out, "Output JSONL");
  rw->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* bud = app.add_subcommand("budget", "Split a token budget between mid-training and RL");
  auto add_constants = [&](CLI::App* c) {
    c->add_option("--params", o.params, "Non-embedding parameters");
    c->add_option("--gamma", o.gamma, "1 when a reference-model pass is paid")->check(CLI::Range(0, 1));
    c->add_option("--rollouts", o.rollouts_per_prompt, "Samples per prompt");
    c->add_option("--seq-len", o.seq_len, "Tokens per rollout");
    c->add_option("--rl-batch", o.rl_batch, "Prompts per RL step");
    c->add_option("--mid-tokens-per-step", o.mid_tokens_per_step, "Mid-training tokens per step");
    c->add_flag("--csv", o.as_csv, "CSV output");
    c->add_option("--out", o.out, "Output path");
  };
  bud->add_option("--total", o.total, "Total token-equivalents, e.g. 4.2e9");
  bud->add_option("--beta", o.beta, "RL share in [0,1]");
  add_constants(bud);
  auto* table = bud->add_subcommand("table", "Budget grid");
  table->add_option("--preset", o.table_preset, "table5");
  table->add_option("--totals", o.totals, "Comma-separated totals");
  table->add_option("--betas", o.betas, "Comma-separated RL shares");
  add_constants(table);

  auto* an = app.add_subcommand("analyze", "Post-hoc analyses");
  an->require_subcommand(1);
  auto* sim = an->add_subcommand("similarity", "Topological similarity histogram of verified traces");
  sim->add_option("--gold", o.gold, "Gold corpus")->required();
  sim->add_option("--rollouts", o.rollouts, "Rollout JSONL")->required();
  sim->add_option("--buckets", o.buckets, "Buckets (default op2-10,op11-20)");
  sim->add_option("--out", o.out, "Histogram CSV");
  auto* errs = an->add_subcommand("errors", "Step failure distribution of an evaluate report");
  errs->add_option("--report", o.report, "Report JSONL from evaluate")->required();
  errs->add_option("--out", o.out, "CSV output");

  auto* srv = app.add_subcommand("serve", "Reward service over newline-delimited JSON");
  srv->add_option("--corpus", o.corpus, "Gold corpus resolvable by corpus_id");
  srv->add_option("--reward", o.reward_preset, "Default reward preset");
  srv->add_option("--alpha", o.alpha, "Default outcome weight");
  srv->add_option("--mode", o.mode, "COMPOSITE | STRICT");
  srv->add_option("--workers", o.workers, "Concurrent requests")->check(CLI::PositiveNumber);
  srv->add_option("--socket", o.socket, "Listen on a unix socket instead of stdin/stdout");

  auto* sc = app.add_subcommand("selfcheck", "Render fresh instances and re-verify their gold solutions");
  sc->add_option("--n", o.n, "Instances")->check(CLI::PositiveNumber);
  sc->add_option("--seed", o.seed, "Seed (else REASON_FORGE_SEED or a fresh one)");
  sc->add_option("--op-min", o.op_min, "Smallest operation count");
  sc->add_option("--op-max", o.op_max, "Largest operation count");
  sc->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"reasonforge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out);
    if (ded->parsed()) return cmd_dedup(o, out);
    if (ev->parsed()) return cmd_evaluate(o, out);
    if (rw->parsed()) return cmd_reward(o, out);
    if (table->parsed()) return cmd_budget_table(o, out);
    if (bud->parsed()) return cmd_budget(o, out);
    if (sim->parsed()) return cmd_similarity(o, out);
    if (errs->parsed()) return cmd_errors(o, out);
    if (srv->parsed()) return cmd_serve(o, out, err);
    if (sc->parsed()) return cmd_selfcheck(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rforge
