#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "reasonforge/corpus.hpp"
#include "reasonforge/error.hpp"
#include "reasonforge/verifier.hpp"

using namespace rforge;

namespace {

CorpusRecord synthetic(std::size_t i, const std::string& split) {
  CorpusRecord r;
  r.split = split;
  r.template_id = "A";
  r.op = 2;
  r.question = "How many items are in box " + std::to_string(i) + "?";
  r.solution = "Define box as b; so b = " + std::to_string(i) + ".";
  r.answer = std::to_string(i);
  r.id = content_hash(canonical_form(r));
  return r;
}

RecipeSpec small_recipe(std::uint64_t budget, std::uint64_t seed) {
  RecipeSpec r;
  r.phase = Phase::Post;
  r.budget = budget;
  r.seed = seed;
  r.mixture = {{2, 6, {{"A", 0.7}, {"B", 0.3}}, 0.25}, {7, 12, {{"C", 1.0}}, 0.75}};
  return r;
}

}  // namespace

TEST_CASE("canonicalization") {
  CHECK(canonicalize("There are 16.0 lions.") == canonicalize("There are 16 lions."));
  CHECK(canonicalize("a  b\n\tc ") == "a b c");
  CHECK(canonicalize(" 1,000 and  2.50 ") == "1000 and 2.5");
  for (const char* s : {"  x  = 3.0 ,  y=004 ", "", "no numbers", "1,234,567.000 end"}) {
    CHECK(canonicalize(canonicalize(s)) == canonicalize(s));
  }
}

TEST_CASE("content hash") {
  CHECK(content_hash("") == "e3b0c44298fc1c149afbf4c8996fb924");
  CHECK(content_hash("abc") == "ba7816bf8f01cfea414140de5dae2223");
  auto r = synthetic(7, "train");
  auto id = content_hash(canonical_form(r));
  CHECK(id.size() == 32);
  CorpusRecord spaced = r;
  spaced.question = "How  many items are in box 7.0?";
  CHECK(content_hash(canonical_form(spaced)) == id);
  for (std::size_t i = 0; i < r.question.size(); ++i) {
    CorpusRecord flipped = r;
    flipped.question[i] = static_cast<char>(flipped.question[i] ^ 0x01);
    if (canonicalize(flipped.question) == canonicalize(r.question)) continue;
    REQUIRE(content_hash(canonical_form(flipped)) != id);
  }
  CHECK(canonical_form(r).find("[question]") == 0);
}

TEST_CASE("record serialization round trip") {
  auto rec = make_record(TemplateRegistry::builtin().get("B"), StructuralConfig{}, InstanceConfig{}, 5, "train");
  CHECK(rec.id == content_hash(canonical_form(rec)));
  CHECK(rec.tokens > 0);
  auto line = record_line(rec);
  CHECK(line.find('\n') == std::string::npos);
  auto back = record_from_json(Json::parse(line));
  CHECK(record_line(back) == line);
  auto j = Json::parse(line);
  j["v"] = 99;
  CHECK_THROWS_AS(record_from_json(j), Error);
}

TEST_CASE("dedup is stable, idempotent and scoped") {
  std::vector<CorpusRecord> rs;
  for (std::size_t i = 0; i < 50; ++i) rs.push_back(synthetic(i, i % 2 ? "train" : "test"));
  rs.push_back(synthetic(3, "train"));   // same split duplicate
  rs.push_back(synthetic(4, "train"));   // 4 lives in test
  rs.push_back(synthetic(10, "test"));   // same split duplicate

  auto within = dedup(rs, DedupScope::WithinSplit);
  CHECK(within.kept.size() == 51);
  CHECK(within.dropped.size() == 2);
  CHECK(verify_disjoint(within.kept).size() == 1);
  CHECK(verify_disjoint(within.kept)[0].splits == std::vector<std::string>{"test", "train"});

  auto across = dedup(rs, DedupScope::AcrossSplits);
  CHECK(across.kept.size() == 50);
  CHECK(verify_disjoint(across.kept).empty());
  for (std::size_t i = 0; i < 50; ++i) CHECK(across.kept[i].id == rs[i].id);

  auto again = dedup(across.kept, DedupScope::AcrossSplits);
  CHECK(again.dropped.empty());
  CHECK(again.kept.size() == across.kept.size());
}

TEST_CASE("recipes") {
  auto names = recipe_preset_names();
  CHECK(names.size() >= 20);
  for (const auto& n : names) {
    auto r = recipe_preset(n);
    CHECK_NOTHROW(r.check(TemplateRegistry::builtin()));
    auto back = recipe_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
  }
  CHECK(recipe_preset("competence-post-op11-14").budget == 204800);
  CHECK(recipe_preset("competence-pre").budget == 10'000'000'000ULL);
  CHECK(recipe_preset("competence-pre").phase == Phase::Pre);
  CHECK_THROWS_AS(recipe_preset("nope"), Error);

  auto bad = small_recipe(10, 1);
  bad.mixture[0].contexts["Q"] = 1.0;
  CHECK_THROWS_AS(bad.check(TemplateRegistry::builtin()), Error);
  bad = small_recipe(10, 1);
  bad.mixture[0].fraction = 0.5;
  CHECK_THROWS_AS(bad.check(TemplateRegistry::builtin()), Error);
  CHECK_THROWS_AS(recipe_from_json(Json::parse(R"({"phase":"POST"})")), Error);
  CHECK_THROWS_AS(phase_from_name("LATE"), Error);
}

TEST_CASE("built corpora honour the mixture, verify and reproduce") {
  auto spec = small_recipe(2000, 17);
  auto corpus = build_corpus(spec, TemplateRegistry::builtin(), 4);
  REQUIRE(corpus.size() == 2000);

  std::map<std::pair<bool, std::string>, std::size_t> cells;
  std::set<std::string> ids;
  std::size_t reverse = 0;
  for (const auto& r : corpus) {
    const bool high = r.op >= 7;
    REQUIRE(r.op >= (high ? 7 : 2));
    REQUIRE(r.op <= (high ? 12 : 6));
    ++cells[{high, r.template_id}];
    ids.insert(r.id);
    reverse += r.mode == Mode::Reverse;
    REQUIRE(r.split == "post");
    REQUIRE(evaluate_solution(r.graph, r.solution, r.answer, r.graph.answer).verified_correct);
  }
  CHECK(ids.size() == corpus.size());
  auto share = [&](bool high, const char* t) { return cells[{high, t}] / 2000.0; };
  CHECK(std::abs(share(false, "A") - 0.175) <= 0.005);
  CHECK(std::abs(share(false, "B") - 0.075) <= 0.005);
  CHECK(std::abs(share(true, "C") - 0.75) <= 0.005);
  CHECK(std::abs(reverse / 2000.0 - 0.5) < 0.05);

  auto again = build_corpus(spec, TemplateRegistry::builtin(), 1);
  REQUIRE(again.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) REQUIRE(record_line(again[i]) == record_line(corpus[i]));

  auto other = build_corpus(small_recipe(2000, 18), TemplateRegistry::builtin(), 4);
  CHECK(record_line(other[0]) != record_line(corpus[0]));
}

TEST_CASE("token budgets for pre-training phases") {
  RecipeSpec spec;
  spec.phase = Phase::Pre;
  spec.budget = 20'000;
  spec.seed = 3;
  spec.mixture = {{2, 5, {{"A", 1.0}}, 1.0}};
  auto corpus = build_corpus(spec, TemplateRegistry::builtin(), 2);
  std::uint64_t tokens = 0;
  for (const auto& r : corpus) tokens += r.tokens;
  CHECK(tokens >= spec.budget);
  CHECK(tokens - corpus.back().tokens < spec.budget + 2000);
  CHECK(corpus.front().split == "pre");
}

TEST_CASE("corpus files round trip") {
  auto corpus = build_corpus(small_recipe(60, 2), TemplateRegistry::builtin(), 2);
  auto path = (std::filesystem::temp_directory_path() / "rf_corpus_test.jsonl").string();
  write_corpus(path, corpus);
  auto back = read_corpus(path);
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(record_line(back[i]) == record_line(corpus[i]));
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_corpus("/nonexistent/corpus.jsonl"), Error);
}
