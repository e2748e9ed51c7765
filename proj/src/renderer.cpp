#include "reasonforge/renderer.hpp"

#include <algorithm>
#include <set>

#include "reasonforge/error.hpp"
#include "reasonforge/generator.hpp"
#include "reasonforge/linear.hpp"
#include "reasonforge/rng.hpp"
#include "reasonforge/text.hpp"

namespace rforge {

std::string RenderedTriple::to_text() const {
  return "[question]\n" + question + "\n[/question]\n[solution]\n" + solution + "\n[/solution]\n[answer]" + answer +
         "[/answer]";
}

std::vector<std::string> variable_letters(std::size_t n, std::uint64_t seed, bool reserve_x) {
  static const std::set<std::string> kWords = {"am", "an", "as", "at", "be", "by", "do", "go", "he", "hi", "if",
                                               "in", "is", "it", "me", "my", "no", "of", "oh", "ok", "on", "or",
                                               "so", "to", "up", "us", "we"};
  std::vector<std::string> singles;
  for (char c = 'a'; c <= 'z'; ++c) singles.emplace_back(1, c);
  for (char c = 'A'; c <= 'Z'; ++c) singles.emplace_back(1, c);
  Rng rng(derive_seed(seed, 0x6c657474657273ULL));
  rng.shuffle(std::span<std::string>(singles));

  std::vector<std::string> out;
  out.reserve(n);
  for (const auto& s : singles) {
    if (out.size() == n) return out;
    if (reserve_x && s == "x") continue;
    out.push_back(s);
  }
  for (char a = 'a'; a <= 'z' && out.size() < n; ++a) {
    for (char b = 'a'; b <= 'z' && out.size() < n; ++b) {
      std::string s{a, b};
      if (!kWords.count(s)) out.push_back(s);
    }
  }
  for (std::size_t i = 0; out.size() < n; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

bool is_decomposition(const DependencyGraph& g, NodeId id) {
  const auto& n = g.nodes.at(id);
  return n.op == Op::Sum && n.parents.size() >= 2 && is_total_role(n.role);
}

std::map<Edge, Visibility> select_explicit(const DependencyGraph& g, const ExplicitPolicy& policy, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x76697369626c65ULL));
  std::map<Edge, Visibility> vis;
  for (const auto& n : g.nodes) {
    bool hide = false;
    if (is_decomposition(g, n.id)) hide = rng.bernoulli(policy.implicit_ratio);
    for (NodeId p : n.parents) vis[Edge{p, n.id}] = hide ? Visibility::Implicit : Visibility::Explicit;
  }
  return vis;
}

DependencyGraph lexicalize_graph(const DependencyGraph& g, const Template& t) {
  DependencyGraph out = g;
  std::set<std::string> seen;
  for (auto& n : out.nodes) {
    if (n.role.empty()) throw Error(Errc::LexiconGap, "node " + std::to_string(n.id) + " has no role");
    n.role = t.lexicalize(n.role);
    if (!seen.insert(normalize_role(n.role)).second) {
      throw Error(Errc::LexiconGap, "two nodes share the role '" + n.role + "'");
    }
  }
  return out;
}

namespace {

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

char op_symbol(Op op) {
  switch (op) {
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
    default: return '+';
  }
}

std::string join_list(const std::vector<std::string>& items, const std::string& conj) {
  if (items.size() == 1) return items[0];
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out + " " + conj + " " + items.back();
}

std::vector<std::string> question_sentences(const DependencyGraph& g, const Template& t) {
  std::vector<std::string> out;
  auto ref = [&](NodeId id) { return t.reference(g.nodes[id].role); };
  for (const auto& n : g.nodes) {
    const std::string target = capitalize(ref(n.id));
    if (n.is_leaf()) {
      if (g.mode == Mode::Reverse && g.unknown == n.id) continue;
      out.push_back(fill(t.pattern("leaf"), {{"Target", target}, {"value", std::to_string(n.value)}}));
      continue;
    }
    bool hidden = std::any_of(n.parents.begin(), n.parents.end(), [&](NodeId p) {
      auto it = g.visibility.find(Edge{p, n.id});
      return it != g.visibility.end() && it->second == Visibility::Implicit;
    });
    if (hidden) continue;
    std::map<std::string, std::string> vals{{"Target", target}};
    for (std::size_t i = 0; i < n.parents.size(); ++i) vals["p" + std::to_string(i + 1)] = ref(n.parents[i]);
    std::string key;
    if (n.is_copy()) {
      key = "copy";
    } else if (n.is_scale()) {
      key = "scale";
      vals["factor"] = std::to_string(n.factor.value_or(1));
    } else if (n.op == Op::Sum) {
      key = "sum";
      std::vector<std::string> refs;
      for (NodeId p : n.parents) refs.push_back(ref(p));
      vals["parents"] = join_list(refs, t.list_and);
    } else if (n.op == Op::Sub) {
      key = "sub";
    } else if (n.op == Op::Mul) {
      key = "mul";
    } else {
      key = "div";
    }
    out.push_back(fill(t.pattern(key), vals));
  }
  if (g.mode == Mode::Reverse && g.constraint && g.unknown) {
    const auto& c = *g.constraint;
    out.push_back(fill(t.pattern("constraint"), {{"Target", capitalize(ref(c.node))}, {"value", std::to_string(c.value)}}));
    if (c.positive_unknown) out.push_back(fill(t.pattern("positivity"), {{"Target", capitalize(ref(*g.unknown))}}));
  }
  return out;
}

// Nodes downstream of the unknown (including it).
std::vector<bool> unknown_dependents(const DependencyGraph& g) {
  std::vector<bool> dep(g.size(), false);
  if (!g.unknown) return dep;
  for (NodeId id : topological_order(g)) {
    if (id == *g.unknown) {
      dep[id] = true;
      continue;
    }
    for (NodeId p : g.nodes[id].parents) dep[id] = dep[id] || dep[p];
  }
  return dep;
}

struct StepWriter {
  const DependencyGraph& g;
  const std::vector<std::string>& name;
  const std::vector<LinearValue>& value;
  const std::vector<bool>& symbolic;
  std::vector<std::string> helper_pool;
  std::size_t next_helper = 0;

  std::string val(NodeId id) const { return value[id].str(); }

  // "lhs = a + b = 3 + 4 = 7" or, for symbolic operands, "lhs = a + b = x + 4".
  static std::string chain(const std::string& lhs, const std::string& names, const std::string& numbers,
                           const LinearValue& result, bool is_symbolic) {
    if (is_symbolic) return lhs + " = " + names + " = " + result.str();
    if (numbers == result.str()) return lhs + " = " + names + " = " + numbers;
    return lhs + " = " + names + " = " + numbers + " = " + result.str();
  }

  std::string body(NodeId id) {
    const auto& n = g.nodes[id];
    const std::string& v = name[id];
    const bool sym = symbolic[id];
    if (n.is_leaf()) return "so " + v + " = " + val(id) + ".";
    if (n.is_copy()) {
      return "so " + v + " = " + name[n.parents[0]] + " = " + val(id) + ".";
    }
    if (n.is_scale()) {
      NodeId p = n.parents[0];
      auto f = std::to_string(n.factor.value_or(1));
      return "so " + chain(v, f + " * " + name[p], f + " * " + val(p), value[id], sym) + ".";
    }
    const std::string sep = std::string(" ") + op_symbol(n.op) + " ";
    std::string prefix;
    std::string acc_name = name[n.parents[0]];
    LinearValue acc = value[n.parents[0]];
    std::string acc_num = val(n.parents[0]);
    bool acc_sym = symbolic[n.parents[0]];
    // n-ary sums fold pairwise through helper variables.
    for (std::size_t i = 1; i + 1 < n.parents.size(); ++i) {
      NodeId p = n.parents[i];
      const std::string& h = helper_pool.at(next_helper++);
      auto next = lin_add(acc, value[p]).value();
      bool next_sym = acc_sym || symbolic[p];
      prefix += chain(h, acc_name + sep + name[p], acc_num + sep + val(p), next, next_sym) + ", ";
      acc_name = h;
      acc = next;
      acc_num = next.str();
      acc_sym = next_sym;
    }
    NodeId last = n.parents.back();
    std::string names = acc_name + sep + name[last];
    std::string numbers = acc_num + sep + val(last);
    return prefix + "so " + chain(v, names, numbers, value[id], sym) + ".";
  }
};

std::string resolution_sentence(const DependencyGraph& g, const std::vector<std::string>& name,
                                const std::vector<LinearValue>& value, std::int64_t x) {
  const auto& c = *g.constraint;
  const LinearValue& f = value[c.node];
  std::string out = "Since " + name[c.node] + " = " + std::to_string(c.value) + ": ";
  std::vector<std::string> eqs;
  const LinearValue ax{f.coeff, 0};
  if (f.constant != 0) eqs.push_back(f.str() + " = " + std::to_string(c.value));
  if (f.coeff != 1) eqs.push_back(ax.str() + " = " + std::to_string(c.value - f.constant));
  eqs.push_back("x = " + std::to_string(x));
  return out + join(eqs, ", ") + ".";
}

}  // namespace

RenderedTriple render(const DependencyGraph& source, const Template& t, std::uint64_t seed) {
  DependencyGraph g = lexicalize_graph(source, t);
  if (g.visibility.empty()) set_all_explicit(g);
  const bool reverse = g.mode == Mode::Reverse;
  if (reverse && (!g.unknown || !g.constraint)) throw Error(Errc::InvalidGraph, "REVERSE graph lacks unknown/constraint");

  RenderedTriple out;
  out.template_id = t.id;
  out.answer = std::to_string(g.answer);

  auto sentences = question_sentences(g, t);
  Rng rng(derive_seed(seed, 0x7175657374696f6eULL));
  rng.shuffle(std::span<std::string>(sentences));
  sentences.push_back(t.question(g.nodes[g.query].role));
  out.question = join(sentences, " ");

  // Solution order: topological, with the unknown's dependents moved last.
  auto order = topological_order(g);
  std::vector<bool> symbolic = unknown_dependents(g);
  std::stable_partition(order.begin(), order.end(), [&](NodeId id) { return !symbolic[id]; });

  std::vector<LinearValue> value(g.size());
  if (reverse) {
    auto forms = linear_forms(g, *g.unknown);
    if (!forms) throw Error(Errc::NonlinearConstraint, "constraint is not linear in the unknown");
    value = *forms;
  } else {
    for (const auto& n : g.nodes) value[n.id] = LinearValue::number(n.value);
  }

  std::size_t helpers = 0;
  for (const auto& n : g.nodes) {
    if (n.op == Op::Sum && n.parents.size() > 2) helpers += n.parents.size() - 2;
  }
  const std::size_t named = g.size() - (reverse ? 1 : 0);
  auto letters = variable_letters(named + helpers, seed, reverse);
  std::vector<std::string> name(g.size());
  std::size_t next = 0;
  for (NodeId id : order) name[id] = (reverse && id == *g.unknown) ? "x" : letters[next++];

  StepWriter writer{g, name, value, symbolic, {letters.begin() + static_cast<std::ptrdiff_t>(named), letters.end()}};
  std::vector<std::string> lines;
  if (reverse) lines.push_back(t.pattern("reverse_preamble"));
  for (NodeId id : order) {
    std::string line = "Define " + g.nodes[id].role + " as " + name[id];
    if (reverse && id == *g.unknown) {
      lines.push_back(line + " (unknown).");
      continue;
    }
    line += "; " + writer.body(id);
    if (reverse && id == g.constraint->node) line += " " + resolution_sentence(g, name, value, g.nodes[*g.unknown].value);
    lines.push_back(line);
  }
  out.solution = join(lines, "\n");
  out.graph = std::move(g);
  return out;
}

}  // namespace rforge
