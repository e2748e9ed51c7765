#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rforge {

using NodeId = std::uint32_t;

/// Arithmetic kind attached to a node. SUM with one parent is a value copy;
/// MUL with one parent scales it by a constant `factor`.
enum class Op : std::uint8_t { Leaf, Sum, Sub, Mul, Div };
enum class Visibility : std::uint8_t { Explicit, Implicit };
enum class Mode : std::uint8_t { Forward, Reverse };

std::string_view op_name(Op op);
Op op_from_name(std::string_view name);
std::string_view mode_name(Mode mode);
Mode mode_from_name(std::string_view name);
std::string_view visibility_name(Visibility v);
Visibility visibility_from_name(std::string_view name);

struct GraphNode {
  NodeId id = 0;
  std::string role;
  Op op = Op::Leaf;
  std::vector<NodeId> parents;
  std::int64_t value = 0;
  std::optional<std::int64_t> factor;

  bool is_leaf() const { return op == Op::Leaf; }
  bool is_copy() const { return op == Op::Sum && parents.size() == 1; }
  bool is_scale() const { return op == Op::Mul && parents.size() == 1; }
};

struct Edge {
  NodeId parent = 0;
  NodeId child = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Asserted value of a downstream node in REVERSE mode.
struct Constraint {
  NodeId node = 0;
  std::int64_t value = 0;
  bool positive_unknown = true;
  bool operator==(const Constraint&) const = default;
};

struct DependencyGraph {
  std::vector<GraphNode> nodes;
  NodeId query = 0;
  std::int64_t answer = 0;
  std::map<Edge, Visibility> visibility;
  Mode mode = Mode::Forward;
  std::optional<NodeId> unknown;
  std::optional<Constraint> constraint;

  const GraphNode& node(NodeId id) const { return nodes.at(id); }
  GraphNode& node(NodeId id) { return nodes.at(id); }
  std::size_t size() const { return nodes.size(); }

  /// Edges in (child, parent position) order.
  std::vector<Edge> edges() const;
  std::vector<std::vector<NodeId>> children() const;
};

/// |E|, the sum of arities over non-leaf nodes.
std::size_t op_count(const DependencyGraph& g);

/// Applies a node's operation to already-known parent values.
/// Throws DivisionNotExact, NegativeResult or ValueOverflow.
std::int64_t apply_op(const GraphNode& node, const std::vector<std::int64_t>& values);

/// Recomputes every node from the leaf values, in topological order.
/// Result is indexed by NodeId.
std::vector<std::int64_t> evaluate(const DependencyGraph& g);

/// Kahn order with ties broken by smallest NodeId. Throws CycleDetected.
std::vector<NodeId> topological_order(const DependencyGraph& g);

/// Longest path length from any leaf; indexed by NodeId. Requires acyclic g.
std::vector<std::uint32_t> node_depths(const DependencyGraph& g);

struct Violation {
  std::string invariant;
  std::optional<NodeId> node;
  std::optional<Edge> edge;
  std::string detail;

  std::string str() const;
};

/// Empty iff every graph invariant holds.
std::vector<Violation> validate(const DependencyGraph& g);

/// Marks every edge EXPLICIT.
void set_all_explicit(DependencyGraph& g);

// --- structural signatures -------------------------------------------------

/// Label- and value-free view of a graph: only ops and parent lists.
struct StructNode {
  Op op = Op::Leaf;
  std::vector<std::uint32_t> parents;
};

struct Structure {
  std::vector<StructNode> nodes;
};

Structure structure_of(const DependencyGraph& g);

struct SignatureEntry {
  std::uint32_t rank = 0;
  Op op = Op::Leaf;
  std::vector<std::uint32_t> parents;
  auto operator<=>(const SignatureEntry&) const = default;
};

struct StructSignature {
  std::vector<SignatureEntry> entries;

  bool operator==(const StructSignature&) const = default;
  std::string str() const;
};

/// Canonical form: nodes ranked by (depth, refined structural colour) with
/// ties broken by individualization, each
/// entry listing op and parent ranks. Parent ranks are sorted except for
/// SUB/DIV, whose operand order is part of the structure.
/// Requires an acyclic structure; throws CycleDetected otherwise.
StructSignature struct_signature(const Structure& s);
StructSignature struct_signature(const DependencyGraph& g);

}  // namespace rforge
