#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reasonforge/graph.hpp"
#include "reasonforge/graph_json.hpp"
#include "reasonforge/rational.hpp"
#include "reasonforge/trace_parser.hpp"

namespace rforge {

enum class Failure : std::uint8_t { Ok, MissingNode, WrongParents, WrongValue };

std::string_view failure_name(Failure f);
Failure failure_from_name(std::string_view name);

struct NodeScore {
  NodeId node = 0;
  Failure failure = Failure::Ok;
};

struct EvalResult {
  std::vector<NodeScore> per_node;
  Rational process_acc;
  bool answer_correct = false;
  bool verified_correct = false;

  std::size_t ok_count() const;
  std::map<Failure, std::size_t> failure_counts() const;
};

/// First violated clause in the order MISSING_NODE, WRONG_PARENTS, WRONG_VALUE.
Failure step_score(const DependencyGraph& gold, const ParsedTrace& trace, NodeId v);

EvalResult evaluate_trace(const DependencyGraph& gold, const ParsedTrace& trace, std::int64_t gold_answer);

/// Parses `solution` (plus optional answer text) and scores it.
EvalResult evaluate_solution(const DependencyGraph& gold, std::string_view solution, std::string_view answer_text,
                             std::int64_t gold_answer);

Json to_json(const EvalResult& r);

/// 1 - C(n-c, k) / C(n, k). Throws KExceedsN when k > n, InvalidArgument when c > n or k == 0.
Rational pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k);

struct Bucket {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::int64_t op) const { return op >= lo && op <= hi; }
};

/// "difficulty": ID [2,10], OOD-edge [11,14], OOD-hard [15,20];
/// "similarity": op2-10, op11-20. Throws InvalidArgument.
std::vector<Bucket> bucket_preset(std::string_view name);
/// "op2-10,op11-20" or a preset name.
std::vector<Bucket> parse_buckets(std::string_view spec);

struct SampleRecord {
  std::string problem_id;
  std::uint64_t sample_index = 0;
  std::int64_t op_count = 0;
  std::string template_id;
  EvalResult result;
};

struct ProblemOutcome {
  std::string problem_id;
  std::int64_t op_count = 0;
  std::string template_id;
  std::uint64_t n = 0;
  std::uint64_t c = 0;
  Rational mean_process_acc;
};

/// Groups samples by problem id, in order of first appearance.
std::vector<ProblemOutcome> aggregate_problems(const std::vector<SampleRecord>& samples);

struct ReportCell {
  std::string bucket;
  std::string template_id;
  std::size_t problems = 0;
  std::map<std::uint64_t, Rational> pass_at_k;
  Rational process_acc;
};

/// Mean pass@k and process accuracy per (bucket, template) cell; empty cells
/// are absent. Throws KExceedsN when a problem has fewer than k samples.
std::vector<ReportCell> bucketed_report(const std::vector<ProblemOutcome>& problems, const std::vector<Bucket>& buckets,
                                        const std::vector<std::uint64_t>& ks);

Json to_json(const ReportCell& cell);
/// Header plus one row per cell; decimals to 6 places.
std::string report_csv(const std::vector<ReportCell>& cells, const std::vector<std::uint64_t>& ks);

}  // namespace rforge
