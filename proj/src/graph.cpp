#include "reasonforge/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "reasonforge/error.hpp"

namespace rforge {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "LEAF";
    case Op::Sum: return "SUM";
    case Op::Sub: return "SUB";
    case Op::Mul: return "MUL";
    case Op::Div: return "DIV";
  }
  return "LEAF";
}

Op op_from_name(std::string_view name) {
  if (name == "LEAF") return Op::Leaf;
  if (name == "SUM") return Op::Sum;
  if (name == "SUB") return Op::Sub;
  if (name == "MUL") return Op::Mul;
  if (name == "DIV") return Op::Div;
  throw Error(Errc::InvalidArgument, "unknown op '" + std::string(name) + "'");
}

std::string_view mode_name(Mode mode) { return mode == Mode::Forward ? "FORWARD" : "REVERSE"; }

Mode mode_from_name(std::string_view name) {
  if (name == "FORWARD") return Mode::Forward;
  if (name == "REVERSE") return Mode::Reverse;
  throw Error(Errc::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::string_view visibility_name(Visibility v) {
  return v == Visibility::Explicit ? "EXPLICIT" : "IMPLICIT";
}

Visibility visibility_from_name(std::string_view name) {
  if (name == "EXPLICIT") return Visibility::Explicit;
  if (name == "IMPLICIT") return Visibility::Implicit;
  throw Error(Errc::InvalidArgument, "unknown visibility '" + std::string(name) + "'");
}

std::vector<Edge> DependencyGraph::edges() const {
  std::vector<Edge> out;
  for (const auto& n : nodes) {
    for (NodeId p : n.parents) out.push_back({p, n.id});
  }
  return out;
}

std::vector<std::vector<NodeId>> DependencyGraph::children() const {
  std::vector<std::vector<NodeId>> out(nodes.size());
  for (const auto& n : nodes) {
    for (NodeId p : n.parents) {
      if (p < nodes.size()) out[p].push_back(n.id);
    }
  }
  return out;
}

std::size_t op_count(const DependencyGraph& g) {
  std::size_t total = 0;
  for (const auto& n : g.nodes) {
    if (!n.is_leaf()) total += n.parents.size();
  }
  return total;
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::ValueOverflow, "addition overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::ValueOverflow, "multiplication overflow");
  return r;
}

}  // namespace

std::int64_t apply_op(const GraphNode& node, const std::vector<std::int64_t>& values) {
  auto pv = [&](std::size_t i) { return values.at(node.parents.at(i)); };
  const std::string where = " at node " + std::to_string(node.id);
  switch (node.op) {
    case Op::Leaf:
      return node.value;
    case Op::Sum: {
      std::int64_t acc = 0;
      for (std::size_t i = 0; i < node.parents.size(); ++i) acc = checked_add(acc, pv(i));
      return acc;
    }
    case Op::Sub: {
      std::int64_t r = pv(0) - pv(1);
      if (r < 0) throw Error(Errc::NegativeResult, std::to_string(pv(0)) + " - " + std::to_string(pv(1)) + where);
      return r;
    }
    case Op::Mul:
      if (node.parents.size() == 1) return checked_mul(node.factor.value_or(1), pv(0));
      return checked_mul(pv(0), pv(1));
    case Op::Div: {
      std::int64_t a = pv(0), b = pv(1);
      if (b == 0 || a % b != 0) {
        throw Error(Errc::DivisionNotExact, std::to_string(a) + " / " + std::to_string(b) + where);
      }
      return a / b;
    }
  }
  return 0;
}

std::vector<NodeId> topological_order(const DependencyGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<NodeId>> kids(n);
  for (const auto& node : g.nodes) {
    for (NodeId p : node.parents) {
      if (p >= n) throw Error(Errc::InvalidGraph, "parent id out of range at node " + std::to_string(node.id));
      kids[p].push_back(node.id);
      ++indegree[node.id];
    }
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId c : kids[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != n) {
    for (NodeId i = 0; i < n; ++i) {
      if (indegree[i] > 0) throw Error(Errc::CycleDetected, "cycle through node " + std::to_string(i));
    }
  }
  return order;
}

std::vector<std::int64_t> evaluate(const DependencyGraph& g) {
  std::vector<std::int64_t> values(g.nodes.size(), 0);
  for (NodeId id : topological_order(g)) {
    values[id] = apply_op(g.nodes[id], values);
  }
  return values;
}

std::vector<std::uint32_t> node_depths(const DependencyGraph& g) {
  std::vector<std::uint32_t> depth(g.nodes.size(), 0);
  for (NodeId id : topological_order(g)) {
    for (NodeId p : g.nodes[id].parents) depth[id] = std::max(depth[id], depth[p] + 1);
  }
  return depth;
}

std::string Violation::str() const {
  std::string s = invariant;
  if (node) s += "@node" + std::to_string(*node);
  if (edge) s += "@edge(" + std::to_string(edge->parent) + "->" + std::to_string(edge->child) + ")";
  if (!detail.empty()) s += ": " + detail;
  return s;
}

namespace {

bool arity_ok(const GraphNode& n) {
  switch (n.op) {
    case Op::Leaf: return n.parents.empty() && !n.factor;
    case Op::Sum: return !n.parents.empty() && !n.factor;
    case Op::Sub:
    case Op::Div: return n.parents.size() == 2 && !n.factor;
    case Op::Mul: return (n.parents.size() == 2 && !n.factor) || (n.parents.size() == 1 && n.factor);
  }
  return false;
}

// Nodes that can reach themselves.
std::vector<bool> cycle_members(const DependencyGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<NodeId>> kids(n);
  for (const auto& node : g.nodes) {
    for (NodeId p : node.parents) {
      if (p < n && node.id < n) kids[p].push_back(node.id);
    }
  }
  std::vector<bool> on_cycle(n, false);
  for (NodeId s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<NodeId> stack(kids[s].begin(), kids[s].end());
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (v == s) {
        on_cycle[s] = true;
        break;
      }
      if (seen[v]) continue;
      seen[v] = true;
      for (NodeId c : kids[v]) stack.push_back(c);
    }
  }
  return on_cycle;
}

}  // namespace

std::vector<Violation> validate(const DependencyGraph& g) {
  std::vector<Violation> out;
  const std::size_t n = g.nodes.size();
  if (n == 0) {
    out.push_back({"EmptyGraph", std::nullopt, std::nullopt, "graph has no nodes"});
    return out;
  }

  bool structural_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = g.nodes[i];
    if (node.id != i) {
      out.push_back({"NonContiguousId", static_cast<NodeId>(i), std::nullopt,
                     "node at index " + std::to_string(i) + " has id " + std::to_string(node.id)});
      structural_ok = false;
    }
    std::set<NodeId> seen;
    for (NodeId p : node.parents) {
      if (p >= n) {
        out.push_back({"UnknownParent", node.id, Edge{p, node.id}, "parent id out of range"});
        structural_ok = false;
      } else if (!seen.insert(p).second) {
        out.push_back({"DuplicateParent", node.id, Edge{p, node.id}, ""});
      }
    }
    if (!arity_ok(node)) {
      out.push_back({"ArityViolation", node.id, std::nullopt,
                     std::string(op_name(node.op)) + " with " + std::to_string(node.parents.size()) + " parents"});
    }
    if (node.value < 0) out.push_back({"NegativeValue", node.id, std::nullopt, ""});
  }
  if (!structural_ok) return out;

  auto on_cycle = cycle_members(g);
  bool acyclic = true;
  for (NodeId i = 0; i < n; ++i) {
    if (on_cycle[i]) {
      out.push_back({"CycleDetected", i, std::nullopt, ""});
      acyclic = false;
    }
  }

  if (acyclic) {
    std::vector<std::int64_t> stored(n);
    for (std::size_t i = 0; i < n; ++i) stored[i] = g.nodes[i].value;
    for (const auto& node : g.nodes) {
      if (node.is_leaf() || !arity_ok(node)) continue;
      try {
        std::int64_t expect = apply_op(node, stored);
        if (expect != node.value) {
          out.push_back({"ValueMismatch", node.id, std::nullopt,
                         "stored " + std::to_string(node.value) + ", recomputed " + std::to_string(expect)});
        }
      } catch (const Error& e) {
        out.push_back({std::string(errc_name(e.code())), node.id, std::nullopt, ""});
      }
    }
  }

  if (g.query >= n) {
    out.push_back({"QueryOutOfRange", std::nullopt, std::nullopt, "query " + std::to_string(g.query)});
  } else if (g.nodes[g.query].value != g.answer) {
    out.push_back({"AnswerMismatch", g.query, std::nullopt,
                   "answer " + std::to_string(g.answer) + " vs node value " + std::to_string(g.nodes[g.query].value)});
  }

  std::set<Edge> edge_set;
  for (const auto& e : g.edges()) edge_set.insert(e);
  for (const auto& e : edge_set) {
    if (!g.visibility.contains(e)) out.push_back({"VisibilityMismatch", e.child, e, "edge has no visibility"});
  }
  for (const auto& [e, v] : g.visibility) {
    if (!edge_set.contains(e)) out.push_back({"VisibilityMismatch", e.child, e, "visibility for non-edge"});
  }

  if (g.mode == Mode::Forward) {
    if (g.unknown || g.constraint) {
      out.push_back({"ModeFieldsInconsistent", std::nullopt, std::nullopt, "FORWARD graph carries reverse fields"});
    }
  } else {
    if (!g.unknown || !g.constraint) {
      out.push_back({"ModeFieldsInconsistent", std::nullopt, std::nullopt, "REVERSE graph lacks unknown or constraint"});
    } else {
      NodeId u = *g.unknown;
      if (u >= n || !g.nodes[u].is_leaf()) {
        out.push_back({"ReverseUnknownInvalid", u, std::nullopt, "unknown must be a leaf"});
      } else {
        if (g.query != u) out.push_back({"ReverseUnknownInvalid", u, std::nullopt, "query must be the unknown"});
        if (g.constraint->positive_unknown && g.nodes[u].value <= 0) {
          out.push_back({"ReverseUnknownInvalid", u, std::nullopt, "unknown must be positive"});
        }
      }
      const auto& c = *g.constraint;
      if (c.node >= n) {
        out.push_back({"ConstraintMismatch", std::nullopt, std::nullopt, "constraint node out of range"});
      } else if (g.nodes[c.node].value != c.value) {
        out.push_back({"ConstraintMismatch", c.node, std::nullopt,
                       "asserted " + std::to_string(c.value) + ", evaluated " + std::to_string(g.nodes[c.node].value)});
      }
    }
  }
  return out;
}

void set_all_explicit(DependencyGraph& g) {
  g.visibility.clear();
  for (const auto& e : g.edges()) g.visibility[e] = Visibility::Explicit;
}

// --- signatures ----------------------------------------------------------

Structure structure_of(const DependencyGraph& g) {
  Structure s;
  s.nodes.reserve(g.nodes.size());
  for (const auto& n : g.nodes) {
    s.nodes.push_back({n.op, std::vector<std::uint32_t>(n.parents.begin(), n.parents.end())});
  }
  return s;
}

namespace {

bool ordered_operands(Op op) { return op == Op::Sub || op == Op::Div; }

std::vector<std::uint32_t> structure_depths(const Structure& s) {
  const std::size_t n = s.nodes.size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::uint32_t>> kids(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (auto p : s.nodes[i].parents) {
      if (p >= n) throw Error(Errc::InvalidGraph, "parent out of range in structure");
      kids[p].push_back(i);
      ++indeg[i];
    }
  }
  std::vector<std::uint32_t> depth(n, 0);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) queue.push_back(i);
  }
  std::size_t head = 0;
  while (head < queue.size()) {
    auto v = queue[head++];
    for (auto c : kids[v]) {
      depth[c] = std::max(depth[c], depth[v] + 1);
      if (--indeg[c] == 0) queue.push_back(c);
    }
  }
  if (queue.size() != n) throw Error(Errc::CycleDetected, "structure has a cycle");
  return depth;
}

using ColorKey = std::tuple<std::uint32_t, std::vector<std::uint32_t>, std::vector<std::uint32_t>>;

// Replaces keys by dense ranks in sorted key order.
template <typename Key>
std::vector<std::uint32_t> compress(const std::vector<Key>& keys) {
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  }
  return out;
}

std::size_t class_count(const std::vector<std::uint32_t>& color) {
  std::size_t k = 0;
  for (auto c : color) k = std::max<std::size_t>(k, c + 1);
  return k;
}

// Canonical labelling by individualization-refinement. Interchangeable
// siblings (same parents, same children at the same operand slots) are
// automorphic, so only one of them is individualized per cell.
class Canonizer {
 public:
  explicit Canonizer(const Structure& s) : s_(s), n_(s.nodes.size()), kids_(n_) {
    for (std::uint32_t i = 0; i < n_; ++i) {
      const auto& ps = s.nodes[i].parents;
      for (std::uint32_t j = 0; j < ps.size(); ++j) {
        kids_[ps[j]].push_back(i);
      }
    }
    std::vector<std::tuple<std::uint8_t, std::vector<std::uint32_t>, std::vector<std::pair<std::uint32_t, int>>>> twin(n_);
    for (std::uint32_t i = 0; i < n_; ++i) {
      const auto& node = s.nodes[i];
      std::vector<std::uint32_t> ps(node.parents.begin(), node.parents.end());
      if (!ordered_operands(node.op)) std::sort(ps.begin(), ps.end());
      std::get<0>(twin[i]) = static_cast<std::uint8_t>(node.op);
      std::get<1>(twin[i]) = std::move(ps);
    }
    for (std::uint32_t c = 0; c < n_; ++c) {
      const auto& node = s.nodes[c];
      for (std::uint32_t j = 0; j < node.parents.size(); ++j) {
        int slot = ordered_operands(node.op) ? static_cast<int>(j) : -1;
        std::get<2>(twin[node.parents[j]]).push_back({c, slot});
      }
    }
    for (auto& t : twin) std::sort(std::get<2>(t).begin(), std::get<2>(t).end());
    twin_ = compress(twin);
  }

  std::vector<std::uint32_t> run(std::vector<std::uint32_t> color) {
    search(refine(std::move(color)));
    return best_;
  }

 private:
  static constexpr std::size_t kMaxLeaves = 1 << 14;

  std::vector<std::uint32_t> refine(std::vector<std::uint32_t> color) const {
    std::size_t classes = class_count(color);
    for (;;) {
      std::vector<ColorKey> keys(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        std::vector<std::uint32_t> pc;
        for (auto p : s_.nodes[i].parents) pc.push_back(color[p]);
        if (!ordered_operands(s_.nodes[i].op)) std::sort(pc.begin(), pc.end());
        std::vector<std::uint32_t> cc;
        for (auto c : kids_[i]) cc.push_back(color[c]);
        std::sort(cc.begin(), cc.end());
        keys[i] = {color[i], std::move(pc), std::move(cc)};
      }
      auto next = compress(keys);
      std::size_t next_classes = class_count(next);
      color = std::move(next);
      if (next_classes == classes) return color;
      classes = next_classes;
    }
  }

  std::vector<SignatureEntry> entries(const std::vector<std::uint32_t>& rank) const {
    std::vector<SignatureEntry> out(n_);
    for (std::uint32_t i = 0; i < n_; ++i) {
      SignatureEntry e{rank[i], s_.nodes[i].op, {}};
      for (auto p : s_.nodes[i].parents) e.parents.push_back(rank[p]);
      if (!ordered_operands(e.op)) std::sort(e.parents.begin(), e.parents.end());
      out[rank[i]] = std::move(e);
    }
    return out;
  }

  void search(const std::vector<std::uint32_t>& color) {
    if (leaves_ >= kMaxLeaves) return;
    // First non-singleton cell in colour order.
    std::vector<std::uint32_t> size(n_, 0);
    for (auto c : color) ++size[c];
    std::uint32_t cell = static_cast<std::uint32_t>(n_);
    for (std::uint32_t c = 0; c < n_; ++c) {
      if (size[c] > 1) {
        cell = c;
        break;
      }
    }
    if (cell == n_) {
      ++leaves_;
      auto e = entries(color);
      if (best_.empty() || e < best_entries_) {
        best_entries_ = std::move(e);
        best_ = color;
      }
      return;
    }
    std::vector<std::uint32_t> tried;
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (color[v] != cell) continue;
      if (std::find(tried.begin(), tried.end(), twin_[v]) != tried.end()) continue;
      tried.push_back(twin_[v]);
      std::vector<std::pair<std::uint32_t, std::uint32_t>> keys(n_);
      for (std::uint32_t i = 0; i < n_; ++i) keys[i] = {color[i], i == v ? 0u : 1u};
      search(refine(compress(keys)));
    }
  }

  const Structure& s_;
  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> kids_;
  std::vector<std::uint32_t> twin_;
  std::vector<std::uint32_t> best_;
  std::vector<SignatureEntry> best_entries_;
  std::size_t leaves_ = 0;
};

}  // namespace

StructSignature struct_signature(const Structure& s) {
  const std::size_t n = s.nodes.size();
  auto depth = structure_depths(s);
  std::vector<std::tuple<std::uint32_t, std::uint8_t, std::size_t>> init(n);
  for (std::size_t i = 0; i < n; ++i) {
    init[i] = {depth[i], static_cast<std::uint8_t>(s.nodes[i].op), s.nodes[i].parents.size()};
  }
  Canonizer canon(s);
  auto rank = canon.run(compress(init));

  StructSignature sig;
  sig.entries.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    SignatureEntry e{rank[i], s.nodes[i].op, {}};
    for (auto p : s.nodes[i].parents) e.parents.push_back(rank[p]);
    if (!ordered_operands(e.op)) std::sort(e.parents.begin(), e.parents.end());
    sig.entries[rank[i]] = std::move(e);
  }
  return sig;
}

StructSignature struct_signature(const DependencyGraph& g) { return struct_signature(structure_of(g)); }

std::string StructSignature::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ';';
    const auto& e = entries[i];
    os << e.rank << ':' << op_name(e.op);
    if (!e.parents.empty()) {
      os << '(';
      for (std::size_t j = 0; j < e.parents.size(); ++j) {
        if (j) os << ',';
        os << e.parents[j];
      }
      os << ')';
    }
  }
  return os.str();
}

}  // namespace rforge
