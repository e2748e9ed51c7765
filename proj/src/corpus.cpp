#include "reasonforge/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "reasonforge/error.hpp"
#include "reasonforge/renderer.hpp"
#include "reasonforge/rng.hpp"
#include "reasonforge/text.hpp"

namespace rforge {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Pre: return "PRE";
    case Phase::Mid: return "MID";
    case Phase::Post: return "POST";
  }
  return "POST";
}

Phase phase_from_name(std::string_view name) {
  if (name == "PRE") return Phase::Pre;
  if (name == "MID") return Phase::Mid;
  if (name == "POST") return Phase::Post;
  throw Error(Errc::InvalidArgument, "unknown phase '" + std::string(name) + "'");
}

std::string RecipeSpec::split_name() const {
  if (!split.empty()) return split;
  std::string s(phase_name(phase));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void RecipeSpec::check(const TemplateRegistry& templates) const {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidArgument, "recipe: " + m); };
  if (mixture.empty()) bad("mixture is empty");
  double total = 0;
  for (const auto& item : mixture) {
    if (item.op_min < 2 || item.op_max < item.op_min) bad("invalid opRange");
    if (item.fraction < 0) bad("negative fraction");
    total += item.fraction;
    double share = 0;
    for (const auto& [id, w] : item.contexts) {
      if (!templates.contains(id)) bad("unknown template '" + id + "'");
      if (w < 0) bad("negative context weight");
      share += w;
    }
    if (std::abs(share - 1.0) > 1e-9) bad("context weights must sum to 1");
  }
  if (std::abs(total - 1.0) > 1e-9) bad("mixture fractions must sum to 1");
  if (reverse_fraction < 0 || reverse_fraction > 1) bad("reverseFraction outside [0,1]");
  structural.check();
  instance.check();
}

RecipeSpec recipe_from_json(const Json& j) {
  try {
    RecipeSpec r;
    r.phase = phase_from_name(j.at("phase").get<std::string>());
    r.split = j.value("split", std::string());
    r.budget = j.at("budget").get<std::uint64_t>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.reverse_fraction = j.value("reverseFraction", 0.5);
    for (const auto& m : j.at("mixture")) {
      MixtureItem item;
      item.op_min = m.at("opRange").at(0).get<std::int64_t>();
      item.op_max = m.at("opRange").at(1).get<std::int64_t>();
      item.contexts = m.at("contexts").get<std::map<std::string, double>>();
      item.fraction = m.at("fraction").get<double>();
      r.mixture.push_back(std::move(item));
    }
    if (j.contains("structural")) r.structural = structural_config_from_json(j["structural"]);
    if (j.contains("instance")) r.instance = instance_config_from_json(j["instance"]);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("recipe: ") + e.what());
  }
}

Json to_json(const RecipeSpec& r) {
  Json j;
  j["phase"] = phase_name(r.phase);
  j["split"] = r.split_name();
  j["budget"] = r.budget;
  j["seed"] = r.seed;
  j["reverseFraction"] = r.reverse_fraction;
  Json mix = Json::array();
  for (const auto& m : r.mixture) {
    Json item;
    item["opRange"] = {m.op_min, m.op_max};
    item["contexts"] = m.contexts;
    item["fraction"] = m.fraction;
    mix.push_back(std::move(item));
  }
  j["mixture"] = std::move(mix);
  j["structural"] = to_json(r.structural);
  j["instance"] = to_json(r.instance);
  return j;
}

namespace {

constexpr std::uint64_t kPretrainTokens = 10'000'000'000ULL;
constexpr std::uint64_t kPosttrainSamples = 204'800;

std::map<std::string, double> thirds() { return {{"A", 1.0 / 3}, {"B", 1.0 / 3}, {"C", 1.0 / 3}}; }

RecipeSpec recipe(Phase phase, std::uint64_t budget, std::vector<MixtureItem> mixture) {
  RecipeSpec r;
  r.phase = phase;
  r.budget = budget;
  r.mixture = std::move(mixture);
  return r;
}

RecipeSpec post_two_context(std::int64_t lo, std::int64_t hi, double a_share) {
  std::map<std::string, double> ctx;
  if (a_share > 0) ctx["A"] = a_share;
  if (a_share < 1) ctx["B"] = 1 - a_share;
  return recipe(Phase::Post, kPosttrainSamples, {{lo, hi, ctx, 1.0}});
}

RecipeSpec pre_with_b_op2(double b_fraction) {
  return recipe(Phase::Pre, kPretrainTokens, {{2, 20, {{"A", 1.0}}, 1 - b_fraction}, {2, 2, {{"B", 1.0}}, b_fraction}});
}

RecipeSpec pre_three_bands(double f1, double f2, double f3) {
  return recipe(Phase::Pre, kPretrainTokens, {{2, 4, thirds(), f1}, {5, 7, thirds(), f2}, {8, 10, thirds(), f3}});
}

const std::vector<std::pair<std::string, std::function<RecipeSpec()>>>& presets() {
  static const std::vector<std::pair<std::string, std::function<RecipeSpec()>>> table = {
      {"competence-pre", [] { return pre_three_bands(0.2, 0.3, 0.5); }},
      {"competence-post-op8-10", [] { return recipe(Phase::Post, kPosttrainSamples, {{8, 10, thirds(), 1.0}}); }},
      {"competence-post-op9-12", [] { return recipe(Phase::Post, kPosttrainSamples, {{9, 12, thirds(), 1.0}}); }},
      {"competence-post-op11-14", [] { return recipe(Phase::Post, kPosttrainSamples, {{11, 14, thirds(), 1.0}}); }},
      {"competence-post-op17-20", [] { return recipe(Phase::Post, kPosttrainSamples, {{17, 20, thirds(), 1.0}}); }},
      {"exposure-pre-0", [] { return pre_with_b_op2(0.0); }},
      {"exposure-pre-0.1", [] { return pre_with_b_op2(0.001); }},
      {"exposure-pre-1", [] { return pre_with_b_op2(0.01); }},
      {"exposure-pre-10", [] { return pre_with_b_op2(0.1); }},
      {"exposure-post", [] { return post_two_context(2, 20, 0.5); }},
      {"shared-pre", [] {
         return recipe(Phase::Pre, kPretrainTokens, {{2, 20, {{"A", 0.999}, {"B", 0.001}}, 1.0}});
       }},
      {"shared-post-A100", [] { return post_two_context(2, 20, 1.0); }},
      {"shared-post-A98B2", [] { return post_two_context(2, 20, 0.98); }},
      {"shared-post-A90B10", [] { return post_two_context(2, 20, 0.9); }},
      {"shared-post-A50B50", [] { return post_two_context(2, 20, 0.5); }},
      {"shared-post-B100", [] { return post_two_context(2, 20, 0.0); }},
      {"atomic-pre", [] { return pre_with_b_op2(0.01); }},
      {"atomic-post-A100", [] { return post_two_context(2, 20, 1.0); }},
      {"atomic-post-A99B1", [] { return post_two_context(2, 20, 0.99); }},
      {"atomic-post-A90B10", [] { return post_two_context(2, 20, 0.9); }},
      {"atomic-post-A50B50", [] { return post_two_context(2, 20, 0.5); }},
      {"atomic-post-B100", [] { return post_two_context(2, 20, 0.0); }},
      {"coverage-pre-1", [] {
         return recipe(Phase::Pre, kPretrainTokens, {{2, 6, thirds(), 0.999}, {8, 20, thirds(), 0.001}});
       }},
      {"coverage-pre-2", [] { return pre_three_bands(0.4995, 0.4995, 0.001); }},
      {"coverage-pre-3", [] { return pre_three_bands(0.475, 0.475, 0.05); }},
      {"coverage-pre-4", [] { return pre_three_bands(0.5, 0.3, 0.2); }},
      {"coverage-pre-5", [] { return pre_three_bands(0.2, 0.3, 0.5); }},
      {"coverage-post", [] { return recipe(Phase::Post, kPosttrainSamples, {{11, 14, thirds(), 1.0}}); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> recipe_preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : presets()) out.push_back(name);
  return out;
}

RecipeSpec recipe_preset(std::string_view name) {
  for (const auto& [n, make] : presets()) {
    if (n == name) return make();
  }
  throw Error(Errc::InvalidArgument, "unknown recipe preset '" + std::string(name) + "'");
}

// --- records ----------------------------------------------------------------------

Json record_to_json(const CorpusRecord& r) {
  Json j;
  j["id"] = r.id;
  j["split"] = r.split;
  j["template"] = r.template_id;
  j["op"] = r.op;
  j["mode"] = mode_name(r.mode);
  j["question"] = r.question;
  j["solution"] = r.solution;
  j["answer"] = r.answer;
  j["graph"] = graph_to_json(r.graph);
  j["tokens"] = r.tokens;
  j["v"] = kCorpusSchemaVersion;
  return j;
}

CorpusRecord record_from_json(const Json& j) {
  try {
    if (j.value("v", kCorpusSchemaVersion) != kCorpusSchemaVersion) {
      throw Error(Errc::InvalidArgument, "unsupported corpus schema version");
    }
    CorpusRecord r;
    r.id = j.at("id").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.template_id = j.at("template").get<std::string>();
    r.op = j.at("op").get<std::int64_t>();
    r.mode = mode_from_name(j.at("mode").get<std::string>());
    r.question = j.at("question").get<std::string>();
    r.solution = j.at("solution").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.graph = graph_from_json(j.at("graph"));
    r.tokens = j.value("tokens", std::uint64_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("corpus record: ") + e.what());
  }
}

std::string record_line(const CorpusRecord& r) { return dump_compact(record_to_json(r)); }

std::string canonicalize(std::string_view text) { return collapse_whitespace(normalize_numbers(text)); }

std::string canonical_form(const CorpusRecord& r) {
  return "[question]" + canonicalize(r.question) + "[/question][solution]" + canonicalize(r.solution) +
         "[/solution][answer]" + canonicalize(r.answer) + "[/answer]";
}

std::string content_hash(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::Io, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < 16; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

DedupResult dedup(std::vector<CorpusRecord> records, DedupScope scope) {
  DedupResult out;
  std::unordered_set<std::string> seen;
  seen.reserve(records.size());
  for (auto& r : records) {
    std::string key = scope == DedupScope::AcrossSplits ? r.id : r.split + '\x1f' + r.id;
    if (seen.insert(std::move(key)).second) {
      out.kept.push_back(std::move(r));
    } else {
      out.dropped.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<DisjointFinding> verify_disjoint(const std::vector<CorpusRecord>& records) {
  std::unordered_map<std::string, std::set<std::string>> splits;
  std::vector<std::string> order;
  for (const auto& r : records) {
    auto [it, fresh] = splits.try_emplace(r.id);
    if (fresh) order.push_back(r.id);
    it->second.insert(r.split);
  }
  std::vector<DisjointFinding> out;
  for (const auto& id : order) {
    const auto& s = splits[id];
    if (s.size() >= 2) out.push_back({id, {s.begin(), s.end()}});
  }
  return out;
}

CorpusRecord make_record(const Template& t, const StructuralConfig& scfg, const InstanceConfig& icfg,
                         std::uint64_t seed, const std::string& split) {
  DependencyGraph g = generate_graph(scfg, icfg, seed);
  g.visibility = select_explicit(g, ExplicitPolicy::ratio(t.implicit_ratio), seed);
  RenderedTriple tri = render(g, t, seed);
  CorpusRecord r;
  r.split = split;
  r.template_id = t.id;
  r.op = static_cast<std::int64_t>(op_count(tri.graph));
  r.mode = tri.graph.mode;
  r.question = std::move(tri.question);
  r.solution = std::move(tri.solution);
  r.answer = std::move(tri.answer);
  r.graph = std::move(tri.graph);
  r.tokens = count_tokens(r.question) + count_tokens(r.solution);
  r.id = content_hash(canonical_form(r));
  return r;
}

namespace {

struct Cell {
  const MixtureItem* item = nullptr;
  std::string template_id;
  double weight = 0;
  std::uint64_t quota = 0;
  std::uint64_t filled = 0;
  std::uint64_t attempts = 0;
  std::vector<CorpusRecord> records;
};

// Largest-remainder apportionment of `budget` over the cell weights.
void apportion(std::vector<Cell>& cells, std::uint64_t budget) {
  std::vector<std::pair<double, std::size_t>> remainders;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double exact = cells[i].weight * static_cast<double>(budget);
    cells[i].quota = static_cast<std::uint64_t>(std::floor(exact));
    assigned += cells[i].quota;
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < budget && k < remainders.size(); ++k, ++assigned) {
    if (cells[remainders[k].second].weight > 0) ++cells[remainders[k].second].quota;
  }
}

void fill(Cell& cell, std::size_t index, const RecipeSpec& spec, const Template& t, bool by_tokens,
          std::unordered_set<std::string>& seen) {
  StructuralConfig scfg = spec.structural;
  scfg.op_min = cell.item->op_min;
  scfg.op_max = cell.item->op_max;
  const std::uint64_t limit = 64 * cell.quota + 1024;
  const std::string split = spec.split_name();
  while (cell.filled < cell.quota) {
    if (cell.attempts > limit) {
      throw Error(Errc::InfeasibleConfig, "cannot fill corpus cell op" + std::to_string(scfg.op_min) + "-" +
                                              std::to_string(scfg.op_max) + " " + cell.template_id);
    }
    const std::uint64_t seed = derive_seed(spec.seed, index, cell.attempts++);
    InstanceConfig icfg = spec.instance;
    icfg.mode = Rng(seed).bernoulli(spec.reverse_fraction) ? Mode::Reverse : Mode::Forward;
    CorpusRecord r = make_record(t, scfg, icfg, seed, split);
    if (!seen.insert(r.id).second) continue;
    cell.filled += by_tokens ? r.tokens : 1;
    cell.records.push_back(std::move(r));
  }
}

}  // namespace

std::vector<CorpusRecord> build_corpus(const RecipeSpec& spec, const TemplateRegistry& templates, unsigned threads) {
  spec.check(templates);
  std::vector<Cell> cells;
  for (const auto& item : spec.mixture) {
    for (const auto& [id, share] : item.contexts) cells.push_back(Cell{&item, id, item.fraction * share, 0, 0, 0, {}});
  }
  apportion(cells, spec.budget);
  const bool by_tokens = spec.phase != Phase::Post;

  // Cells are independent: fill them concurrently with private id sets.
  threads = std::max(1u, threads);
  std::vector<std::unordered_set<std::string>> local(cells.size());
  for (std::size_t start = 0; start < cells.size(); start += threads) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = start; i < std::min(cells.size(), start + threads); ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        fill(cells[i], i, spec, templates.get(cells[i].template_id), by_tokens, local[i]);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  // Serial merge in cell order; cross-cell duplicates are dropped and refilled.
  std::unordered_set<std::string> global;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& cell = cells[i];
    std::vector<CorpusRecord> kept;
    for (auto& r : cell.records) {
      if (global.insert(r.id).second) {
        kept.push_back(std::move(r));
      } else {
        cell.filled -= by_tokens ? r.tokens : 1;
      }
    }
    cell.records = std::move(kept);
    fill(cell, i, spec, templates.get(cell.template_id), by_tokens, global);
  }

  std::vector<CorpusRecord> out;
  for (auto& cell : cells) {
    for (auto& r : cell.records) out.push_back(std::move(r));
  }
  Rng rng(derive_seed(spec.seed, 0x636f72707573ULL));
  rng.shuffle(std::span<CorpusRecord>(out));
  return out;
}

std::vector<CorpusRecord> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open corpus " + path);
  std::vector<CorpusRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidArgument, path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  for (const auto& r : records) out << record_line(r) << '\n';
  if (!out) throw Error(Errc::Io, "write failed for " + path);
}

}  // namespace rforge
