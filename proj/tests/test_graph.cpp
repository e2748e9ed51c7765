#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "reasonforge/error.hpp"
#include "reasonforge/generator.hpp"
#include "reasonforge/graph.hpp"
#include "reasonforge/graph_json.hpp"
#include "support.hpp"

using namespace rforge;

namespace {

GraphNode leaf(NodeId id, std::int64_t v) { return {id, "n" + std::to_string(id), Op::Leaf, {}, v, {}}; }
GraphNode inner(NodeId id, Op op, std::vector<NodeId> ps, std::int64_t v = 0) {
  return {id, "n" + std::to_string(id), op, std::move(ps), v, {}};
}

DependencyGraph small() {
  DependencyGraph g;
  g.nodes = {leaf(0, 12), leaf(1, 4), inner(2, Op::Div, {0, 1}, 3), inner(3, Op::Sub, {0, 2}, 9),
             inner(4, Op::Sum, {2, 3, 1}, 16)};
  g.query = 4;
  g.answer = 16;
  set_all_explicit(g);
  return g;
}

bool has(const std::vector<Violation>& vs, const std::string& name) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.invariant == name; });
}

// Relabels nodes by `perm` (old id -> new id).
Structure permuted(const Structure& s, const std::vector<std::uint32_t>& perm) {
  Structure out;
  out.nodes.resize(s.nodes.size());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    StructNode n = s.nodes[i];
    for (auto& p : n.parents) p = perm[p];
    out.nodes[perm[i]] = n;
  }
  return out;
}

}  // namespace

TEST_CASE("evaluation and op count") {
  auto g = small();
  CHECK(evaluate(g) == std::vector<std::int64_t>{12, 4, 3, 9, 16});
  CHECK(op_count(g) == 7);
  CHECK(validate(g).empty());
  auto order = topological_order(g);
  CHECK(order.back() == 4);
  CHECK(node_depths(g) == std::vector<std::uint32_t>{0, 0, 1, 2, 3});
}

TEST_CASE("worked example graph is valid with eleven operations") {
  auto g = rftest::worked_gold();
  CHECK(validate(g).empty());
  CHECK(op_count(g) == 11);
  CHECK(evaluate(g)[8] == 22);
  CHECK(g.nodes[5].is_scale());
  CHECK(g.nodes[1].is_copy());
}

TEST_CASE("validation catches each broken invariant") {
  SUBCASE("cycle") {
    auto g = small();
    g.nodes[2].parents = {0, 4};
    set_all_explicit(g);
    CHECK(has(validate(g), "CycleDetected"));
    CHECK_THROWS_AS(topological_order(g), Error);
  }
  SUBCASE("inexact division") {
    auto g = small();
    g.nodes[1].value = 5;
    auto vs = validate(g);
    CHECK(has(vs, "DivisionNotExact"));
  }
  SUBCASE("negative subtraction") {
    auto g = small();
    g.nodes[0].value = 2;
    g.nodes[1].value = 1;
    g.nodes[2].value = 2;
    g.nodes[3].parents = {1, 0};
    CHECK(has(validate(g), "NegativeResult"));
  }
  SUBCASE("stale value") {
    auto g = small();
    g.nodes[4].value = 17;
    CHECK(has(validate(g), "ValueMismatch"));
    CHECK(has(validate(g), "AnswerMismatch"));
  }
  SUBCASE("arity") {
    auto g = small();
    g.nodes[3].parents = {0};
    set_all_explicit(g);
    CHECK(has(validate(g), "ArityViolation"));
  }
  SUBCASE("visibility partition") {
    auto g = small();
    g.visibility.erase(Edge{0, 2});
    CHECK(has(validate(g), "VisibilityMismatch"));
  }
  SUBCASE("reverse fields") {
    auto g = small();
    g.mode = Mode::Reverse;
    CHECK(has(validate(g), "ModeFieldsInconsistent"));
  }
  SUBCASE("overflow") {
    DependencyGraph g;
    g.nodes = {leaf(0, INT64_MAX), leaf(1, 2), inner(2, Op::Mul, {0, 1}, 0)};
    g.query = 2;
    set_all_explicit(g);
    CHECK(has(validate(g), "ValueOverflow"));
    CHECK_THROWS_AS(evaluate(g), Error);
  }
}

TEST_CASE("json round trip is exact") {
  for (auto g : {small(), rftest::worked_gold()}) {
    std::string once = dump_compact(graph_to_json(g));
    auto back = graph_from_json(Json::parse(once));
    CHECK(dump_compact(graph_to_json(back)) == once);
    CHECK(back.visibility == g.visibility);
    CHECK(back.constraint == g.constraint);
  }
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"nodes": 3})")), Error);
  CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"nodes": [{"id":0,"op":"POW","parents":[],"value":1}]})")), Error);
}

TEST_CASE("signatures ignore labels, values and node numbering") {
  StructuralConfig cfg;
  cfg.op_min = 2;
  cfg.op_max = 20;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto g = sample_structure(cfg, rng);
    Structure s = structure_of(g);
    std::vector<std::uint32_t> perm(s.nodes.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::uint32_t>(perm));
    REQUIRE(struct_signature(permuted(s, perm)) == struct_signature(s));
  }
}

TEST_CASE("signatures separate different structures") {
  Structure a{{{Op::Leaf, {}}, {Op::Leaf, {}}, {Op::Sum, {0, 1}}}};
  Structure b{{{Op::Leaf, {}}, {Op::Leaf, {}}, {Op::Mul, {0, 1}}}};
  Structure c{{{Op::Leaf, {}}, {Op::Leaf, {}}, {Op::Sub, {0, 1}}}};
  Structure d{{{Op::Leaf, {}}, {Op::Sum, {0}}, {Op::Sub, {0, 1}}}};
  Structure e{{{Op::Leaf, {}}, {Op::Sum, {0}}, {Op::Sub, {1, 0}}}};
  CHECK(struct_signature(a) != struct_signature(b));
  CHECK(struct_signature(a) != struct_signature(c));
  // Operand order matters only for SUB and DIV.
  CHECK(struct_signature(d) != struct_signature(e));
  Structure f{{{Op::Leaf, {}}, {Op::Sum, {0}}, {Op::Sum, {0, 1}}}};
  Structure h{{{Op::Leaf, {}}, {Op::Sum, {0}}, {Op::Sum, {1, 0}}}};
  CHECK(struct_signature(f) == struct_signature(h));
}
