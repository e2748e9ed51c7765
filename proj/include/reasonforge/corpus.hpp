#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reasonforge/generator.hpp"
#include "reasonforge/graph_json.hpp"
#include "reasonforge/templates.hpp"

namespace rforge {

enum class Phase { Pre, Mid, Post };

std::string_view phase_name(Phase p);
Phase phase_from_name(std::string_view name);

struct MixtureItem {
  std::int64_t op_min = 2;
  std::int64_t op_max = 10;
  std::map<std::string, double> contexts;  ///< template id -> share
  double fraction = 1.0;                   ///< share of the phase budget
};

/// Budgets are emitted tokens for PRE/MID and samples for POST.
struct RecipeSpec {
  Phase phase = Phase::Post;
  std::string split;  ///< defaults to the lower-case phase name
  std::vector<MixtureItem> mixture;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  double reverse_fraction = 0.5;
  StructuralConfig structural;
  InstanceConfig instance;

  /// Throws InvalidArgument.
  void check(const TemplateRegistry& templates) const;
  std::string split_name() const;
};

RecipeSpec recipe_from_json(const Json& j);
Json to_json(const RecipeSpec& r);

/// Named recipes covering the published data mixtures.
std::vector<std::string> recipe_preset_names();
RecipeSpec recipe_preset(std::string_view name);

constexpr int kCorpusSchemaVersion = 1;
constexpr std::string_view kHashAlgorithm = "sha256-128";

struct CorpusRecord {
  std::string id;
  std::string split;
  std::string template_id;
  std::int64_t op = 0;
  Mode mode = Mode::Forward;
  std::string question;
  std::string solution;
  std::string answer;
  DependencyGraph graph;
  std::uint64_t tokens = 0;
};

Json record_to_json(const CorpusRecord& r);
CorpusRecord record_from_json(const Json& j);
std::string record_line(const CorpusRecord& r);

/// Whitespace collapsed, ends trimmed, numeric literals normalized. Idempotent.
std::string canonicalize(std::string_view text);
/// Canonical serialization of a record's question/solution/answer triple.
std::string canonical_form(const CorpusRecord& r);
/// First 128 bits of SHA-256, as 32 lowercase hex digits.
std::string content_hash(std::string_view bytes);

enum class DedupScope { WithinSplit, AcrossSplits };

struct DedupResult {
  std::vector<CorpusRecord> kept;
  std::vector<CorpusRecord> dropped;
};

/// Stable: the first occurrence of an id survives.
DedupResult dedup(std::vector<CorpusRecord> records, DedupScope scope);

struct DisjointFinding {
  std::string id;
  std::vector<std::string> splits;
};

/// Ids present in two or more splits; empty when the splits are disjoint.
std::vector<DisjointFinding> verify_disjoint(const std::vector<CorpusRecord>& records);

/// Generates, renders and hashes one instance.
CorpusRecord make_record(const Template& t, const StructuralConfig& scfg, const InstanceConfig& icfg,
                         std::uint64_t seed, const std::string& split);

/// Stratified build: exact per-(mixture item, template) quotas, in-corpus
/// duplicates regenerated, output shuffled under the recipe seed.
std::vector<CorpusRecord> build_corpus(const RecipeSpec& spec, const TemplateRegistry& templates,
                                       unsigned threads = 1);

std::vector<CorpusRecord> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records);

}  // namespace rforge
