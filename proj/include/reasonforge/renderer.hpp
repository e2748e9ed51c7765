#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reasonforge/graph.hpp"
#include "reasonforge/templates.hpp"

namespace rforge {

struct RenderedTriple {
  std::string question;
  std::string solution;
  std::string answer;
  std::string template_id;
  /// Source graph with lexicalized roles; this is the gold graph for scoring.
  DependencyGraph graph;

  /// "[question]...[/question]\n[solution]...[/solution]\n[answer]...[/answer]"
  std::string to_text() const;
};

/// Identifiers for solution variables: a seeded permutation of the 52 ASCII
/// letters, then two-letter names (common English words skipped).
/// With `reserve_x`, "x" is never handed out.
std::vector<std::string> variable_letters(std::size_t n, std::uint64_t seed, bool reserve_x = false);

struct ExplicitPolicy {
  /// Probability that a decomposition (a total summing its parts) is left implicit.
  double implicit_ratio = 0.0;

  static ExplicitPolicy all_explicit() { return {}; }
  static ExplicitPolicy ratio(double r) { return {r}; }
};

/// A SUM over two or more parents whose role names a total.
bool is_decomposition(const DependencyGraph& g, NodeId id);

/// Each decomposition node has all of its in-edges IMPLICIT with probability
/// `implicit_ratio`; every other edge is EXPLICIT.
std::map<Edge, Visibility> select_explicit(const DependencyGraph& g, const ExplicitPolicy& policy, std::uint64_t seed);

/// Copy of `g` with every role replaced by its template surface form.
/// Throws LexiconGap when roles are missing or collide.
DependencyGraph lexicalize_graph(const DependencyGraph& g, const Template& t);

/// Throws LexiconGap / PatternGap.
RenderedTriple render(const DependencyGraph& g, const Template& t, std::uint64_t seed);

}  // namespace rforge
