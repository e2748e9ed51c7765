#include "reasonforge/verifier.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "reasonforge/error.hpp"
#include "reasonforge/text.hpp"

namespace rforge {

std::string_view failure_name(Failure f) {
  switch (f) {
    case Failure::Ok: return "OK";
    case Failure::MissingNode: return "MISSING_NODE";
    case Failure::WrongParents: return "WRONG_PARENTS";
    case Failure::WrongValue: return "WRONG_VALUE";
  }
  return "OK";
}

Failure failure_from_name(std::string_view name) {
  for (Failure f : {Failure::Ok, Failure::MissingNode, Failure::WrongParents, Failure::WrongValue}) {
    if (failure_name(f) == name) return f;
  }
  throw Error(Errc::InvalidArgument, "unknown failure label '" + std::string(name) + "'");
}

std::size_t EvalResult::ok_count() const {
  return static_cast<std::size_t>(
      std::count_if(per_node.begin(), per_node.end(), [](const NodeScore& s) { return s.failure == Failure::Ok; }));
}

std::map<Failure, std::size_t> EvalResult::failure_counts() const {
  std::map<Failure, std::size_t> out{{Failure::MissingNode, 0}, {Failure::WrongParents, 0}, {Failure::WrongValue, 0}};
  for (const auto& s : per_node) {
    if (s.failure != Failure::Ok) ++out[s.failure];
  }
  return out;
}

Failure step_score(const DependencyGraph& gold, const ParsedTrace& trace, NodeId v) {
  const auto& node = gold.nodes.at(v);
  const PredictedNode* pred = trace.find(normalize_role(node.role));
  if (!pred) return Failure::MissingNode;
  std::set<std::string> want, got(pred->parent_roles.begin(), pred->parent_roles.end());
  for (NodeId p : node.parents) want.insert(normalize_role(gold.nodes.at(p).role));
  if (want != got) return Failure::WrongParents;
  if (!pred->value || *pred->value != node.value) return Failure::WrongValue;
  return Failure::Ok;
}

EvalResult evaluate_trace(const DependencyGraph& gold, const ParsedTrace& trace, std::int64_t gold_answer) {
  EvalResult r;
  for (const auto& n : gold.nodes) r.per_node.push_back({n.id, step_score(gold, trace, n.id)});
  r.process_acc = gold.nodes.empty() ? Rational(0) : Rational(static_cast<long long>(r.ok_count()),
                                                              static_cast<long long>(gold.nodes.size()));
  r.answer_correct = trace.final_answer && *trace.final_answer == gold_answer;
  r.verified_correct = r.process_acc == 1 && r.answer_correct;
  return r;
}

EvalResult evaluate_solution(const DependencyGraph& gold, std::string_view solution, std::string_view answer_text,
                             std::int64_t gold_answer) {
  return evaluate_trace(gold, parse_trace(solution, answer_text), gold_answer);
}

Json to_json(const EvalResult& r) {
  Json j;
  j["process_acc"] = to_decimal(r.process_acc);
  j["answer_correct"] = r.answer_correct;
  j["verified_correct"] = r.verified_correct;
  Json nodes = Json::array();
  for (const auto& s : r.per_node) nodes.push_back({s.node, failure_name(s.failure)});
  j["per_node"] = std::move(nodes);
  return j;
}

namespace {

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace

Rational pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be positive");
  if (c > n) throw Error(Errc::InvalidArgument, "c=" + std::to_string(c) + " exceeds n=" + std::to_string(n));
  if (k > n) throw Error(Errc::KExceedsN, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  return Rational(1) - Rational(binomial(n - c, k), binomial(n, k));
}

std::vector<Bucket> bucket_preset(std::string_view name) {
  if (name == "difficulty") return {{"ID", 2, 10}, {"OOD-edge", 11, 14}, {"OOD-hard", 15, 20}};
  if (name == "similarity") return {{"op2-10", 2, 10}, {"op11-20", 11, 20}};
  throw Error(Errc::InvalidArgument, "unknown bucket preset '" + std::string(name) + "'");
}

std::vector<Bucket> parse_buckets(std::string_view spec) {
  if (spec == "difficulty" || spec == "similarity") return bucket_preset(spec);
  std::vector<Bucket> out;
  for (const auto& raw : split(spec, ',')) {
    auto item = trim(raw);
    auto body = item.rfind("op", 0) == 0 ? item.substr(2) : item;
    auto dash = body.find('-');
    try {
      Bucket b;
      b.name = item;
      if (dash == std::string::npos) {
        b.lo = b.hi = std::stoll(body);
      } else {
        b.lo = std::stoll(body.substr(0, dash));
        b.hi = std::stoll(body.substr(dash + 1));
      }
      if (b.hi < b.lo) throw Error(Errc::InvalidArgument, "empty bucket range '" + item + "'");
      out.push_back(b);
    } catch (const std::logic_error&) {
      throw Error(Errc::InvalidArgument, "bad bucket '" + item + "'");
    }
  }
  return out;
}

std::vector<ProblemOutcome> aggregate_problems(const std::vector<SampleRecord>& samples) {
  std::vector<ProblemOutcome> out;
  std::map<std::string, std::size_t> index;
  std::vector<Rational> acc_sum;
  for (const auto& s : samples) {
    auto [it, fresh] = index.emplace(s.problem_id, out.size());
    if (fresh) {
      out.push_back({s.problem_id, s.op_count, s.template_id, 0, 0, 0});
      acc_sum.emplace_back(0);
    }
    auto& p = out[it->second];
    ++p.n;
    if (s.result.verified_correct) ++p.c;
    acc_sum[it->second] += s.result.process_acc;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].mean_process_acc = acc_sum[i] / static_cast<long long>(out[i].n);
  return out;
}

std::vector<ReportCell> bucketed_report(const std::vector<ProblemOutcome>& problems, const std::vector<Bucket>& buckets,
                                        const std::vector<std::uint64_t>& ks) {
  std::set<std::string> templates;
  for (const auto& p : problems) templates.insert(p.template_id);
  std::vector<ReportCell> cells;
  for (const auto& b : buckets) {
    for (const auto& t : templates) {
      ReportCell cell;
      cell.bucket = b.name;
      cell.template_id = t;
      for (auto k : ks) cell.pass_at_k[k] = 0;
      cell.process_acc = 0;
      for (const auto& p : problems) {
        if (p.template_id != t || !b.contains(p.op_count)) continue;
        ++cell.problems;
        for (auto k : ks) cell.pass_at_k[k] += pass_at_k(p.n, p.c, k);
        cell.process_acc += p.mean_process_acc;
      }
      if (cell.problems == 0) continue;
      const auto count = static_cast<long long>(cell.problems);
      for (auto& [k, v] : cell.pass_at_k) v /= count;
      cell.process_acc /= count;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

Json to_json(const ReportCell& cell) {
  Json j;
  j["bucket"] = cell.bucket;
  j["template"] = cell.template_id;
  j["problems"] = cell.problems;
  Json pk = Json::object();
  for (const auto& [k, v] : cell.pass_at_k) pk[std::to_string(k)] = to_decimal(v);
  j["pass_at_k"] = std::move(pk);
  j["process_acc"] = to_decimal(cell.process_acc);
  return j;
}

std::string report_csv(const std::vector<ReportCell>& cells, const std::vector<std::uint64_t>& ks) {
  std::ostringstream out;
  out << "bucket,template,problems";
  for (auto k : ks) out << ",pass@" << k;
  out << ",process_acc\n";
  for (const auto& c : cells) {
    out << c.bucket << ',' << c.template_id << ',' << c.problems;
    for (auto k : ks) out << ',' << to_decimal(c.pass_at_k.at(k));
    out << ',' << to_decimal(c.process_acc) << '\n';
  }
  return out.str();
}

}  // namespace rforge
