#include <string>

#include "doctest.h"
#include "properties.hpp"
#include "reasonforge/corpus.hpp"
#include "reasonforge/error.hpp"
#include "reasonforge/verifier.hpp"
#include "support.hpp"

using namespace rforge;

namespace {

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

Failure score_of(const std::string& solution, NodeId v) {
  return step_score(rftest::worked_gold(), parse_trace(solution), v);
}

SampleRecord sample(const std::string& pid, std::int64_t op, const std::string& tmpl, bool ok, Rational acc) {
  SampleRecord s;
  s.problem_id = pid;
  s.op_count = op;
  s.template_id = tmpl;
  s.result.verified_correct = ok;
  s.result.answer_correct = ok;
  s.result.process_acc = acc;
  return s;
}

}  // namespace

TEST_CASE("worked example verifies") {
  auto gold = rftest::worked_gold();
  auto r = evaluate_solution(gold, rftest::worked_solution(), "", gold.answer);
  CHECK(r.per_node.size() == 9);
  CHECK(r.process_acc == 1);
  CHECK(r.answer_correct);
  CHECK(r.verified_correct);
  CHECK(to_json(r)["process_acc"] == "1.000000");
}

TEST_CASE("step scores report the first violated clause") {
  const std::string sol = rftest::worked_solution();
  SUBCASE("missing node") {
    auto s = replaced(sol, "Define regional medical school in Brightford as $Q$; so $Q = y = 8$.", "");
    CHECK(score_of(s, 4) == Failure::MissingNode);
    // Its child now cites an undefined variable, so its parent set is wrong.
    CHECK(score_of(s, 5) == Failure::WrongParents);
    CHECK(score_of(s, 0) == Failure::Ok);
  }
  SUBCASE("wrong parents") {
    auto s = replaced(sol, "so $h = 2$", "so $h = U - 1 = 2$");
    CHECK(score_of(s, 2) == Failure::WrongParents);
  }
  SUBCASE("wrong value") {
    auto s = replaced(sol, "so $U = 3$", "so $U = 4$");
    CHECK(score_of(s, 0) == Failure::WrongValue);
    auto r = evaluate_solution(rftest::worked_gold(), s, "", 2);
    CHECK(r.process_acc == Rational(8, 9));
    CHECK(r.answer_correct);
    CHECK_FALSE(r.verified_correct);
  }
  SUBCASE("empty solution") {
    auto r = evaluate_solution(rftest::worked_gold(), "", "", 2);
    CHECK(r.process_acc == 0);
    CHECK_FALSE(r.answer_correct);
    CHECK(r.failure_counts().at(Failure::MissingNode) == 9);
  }
}

TEST_CASE("extra steps never lower process accuracy") {
  auto gold = rftest::worked_gold();
  const std::string sol = rftest::worked_solution();
  const std::string extra =
      "Define number of chess clubs in Brightford as $w$; so $w = 41$.\n"
      "Define number of music halls in Evervale City as $v$; so $v = w + 3 = 44$.\n";
  auto base = evaluate_solution(gold, sol, "", gold.answer);
  auto padded = evaluate_solution(gold, replaced(sol, "Define public highschool in Westhaven", extra +
                                                     "Define public highschool in Westhaven"),
                                  "", gold.answer);
  CHECK(padded.process_acc == base.process_acc);
  CHECK(padded.verified_correct);
}

TEST_CASE("generated gold solutions verify and strictness holds") {
  const auto& reg = TemplateRegistry::builtin();
  Rng rng(4242);
  for (std::uint64_t i = 0; i < 300; ++i) {
    StructuralConfig s;
    s.op_min = 2;
    s.op_max = 20;
    InstanceConfig ic;
    ic.mode = i % 2 ? Mode::Reverse : Mode::Forward;
    auto rec = make_record(reg.get(reg.ids()[i % 3]), s, ic, i, "t");
    auto good = evaluate_solution(rec.graph, rec.solution, rec.answer, rec.graph.answer);
    REQUIRE(good.verified_correct);
    // Truncating the solution can only lose verification.
    auto cut = rec.solution.substr(0, static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(rec.solution.size()))));
    auto partial = evaluate_solution(rec.graph, cut, "", rec.graph.answer);
    REQUIRE(partial.process_acc <= 1);
    REQUIRE(partial.verified_correct == (partial.process_acc == 1 && partial.answer_correct));
    auto wrong = evaluate_solution(rec.graph, rec.solution, std::to_string(rec.graph.answer + 1), rec.graph.answer);
    REQUIRE_FALSE(wrong.verified_correct);
  }
}

TEST_CASE("pass@k matches subset enumeration") {
  CHECK(rftest::pass_at_k_mismatches(10) == 0);
  CHECK(pass_at_k(2, 1, 1) == Rational(1, 2));
  CHECK(pass_at_k(2, 1, 2) == 1);
  CHECK(pass_at_k(5, 0, 3) == 0);
  CHECK(pass_at_k(5, 5, 1) == 1);
  CHECK(pass_at_k(128, 1, 128) == 1);
  CHECK(pass_at_k(128, 1, 1) == Rational(1, 128));
  CHECK_THROWS_WITH_AS(pass_at_k(3, 1, 4), doctest::Contains("KExceedsN"), Error);
  CHECK_THROWS_AS(pass_at_k(3, 4, 1), Error);
  CHECK_THROWS_AS(pass_at_k(3, 1, 0), Error);
  for (std::uint64_t n = 1; n <= 30; ++n) {
    for (std::uint64_t c = 0; c <= n; ++c) {
      for (std::uint64_t k = 1; k < n; ++k) {
        REQUIRE(pass_at_k(n, c, k) <= pass_at_k(n, c, k + 1));
        if (c < n) REQUIRE(pass_at_k(n, c, k) <= pass_at_k(n, c + 1, k));
      }
    }
  }
}

TEST_CASE("buckets") {
  auto d = bucket_preset("difficulty");
  std::vector<std::string> hits;
  for (const auto& b : d) {
    if (b.contains(12)) hits.push_back(b.name);
  }
  CHECK(hits == std::vector<std::string>{"OOD-edge"});
  auto custom = parse_buckets("op2-10, op11-20,7");
  REQUIRE(custom.size() == 3);
  CHECK(custom[1].lo == 11);
  CHECK(custom[2].hi == 7);
  CHECK_THROWS_AS(parse_buckets("op9-3"), Error);
  CHECK_THROWS_AS(parse_buckets("opx"), Error);
  CHECK_THROWS_AS(bucket_preset("nope"), Error);
}

TEST_CASE("bucketed report means") {
  std::vector<SampleRecord> samples = {
      sample("p1", 5, "A", true, 1),         sample("p1", 5, "A", false, Rational(1, 2)),
      sample("p2", 8, "A", false, 0),        sample("p2", 8, "A", false, Rational(1, 4)),
      sample("p3", 12, "A", true, 1),        sample("p3", 12, "A", true, 1),
      sample("p4", 3, "B", false, Rational(1, 3)), sample("p4", 3, "B", true, 1),
  };
  auto problems = aggregate_problems(samples);
  REQUIRE(problems.size() == 4);
  CHECK(problems[0].n == 2);
  CHECK(problems[0].c == 1);
  CHECK(problems[0].mean_process_acc == Rational(3, 4));

  auto cells = bucketed_report(problems, bucket_preset("difficulty"), {1, 2});
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].bucket == "ID");
  CHECK(cells[0].template_id == "A");
  CHECK(cells[0].problems == 2);
  CHECK(cells[0].pass_at_k.at(1) == Rational(1, 4));
  CHECK(cells[0].pass_at_k.at(2) == Rational(1, 2));
  CHECK(cells[0].process_acc == Rational(7, 16));
  CHECK(cells[1].template_id == "B");
  CHECK(cells[2].bucket == "OOD-edge");
  CHECK(cells[2].pass_at_k.at(2) == 1);
  CHECK_THROWS_AS(bucketed_report(problems, bucket_preset("difficulty"), {3}), Error);

  auto csv = report_csv(cells, {1, 2});
  CHECK(csv.rfind("bucket,template,problems,pass@1,pass@2,process_acc\n", 0) == 0);
  CHECK(csv.find("ID,A,2,0.250000,0.500000,0.437500\n") != std::string::npos);
}

TEST_CASE("failure names round trip") {
  for (Failure f : {Failure::Ok, Failure::MissingNode, Failure::WrongParents, Failure::WrongValue}) {
    CHECK(failure_from_name(failure_name(f)) == f);
  }
  CHECK_THROWS_AS(failure_from_name("BAD"), Error);
}
