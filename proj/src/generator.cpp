#include "reasonforge/generator.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>

#include "reasonforge/error.hpp"

namespace rforge {

void StructuralConfig::check() const {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidArgument, "StructuralConfig: " + m); };
  if (op_min < 2) bad("opRange lower bound must be >= 2");
  if (op_max < op_min) bad("opRange upper bound below lower bound");
  if (max_in_degree < 2) bad("maxInDegree must be >= 2");
  std::array<double, 4> w{op_mix.sum, op_mix.sub, op_mix.mul, op_mix.div};
  double total = 0;
  for (double x : w) {
    if (x < 0) bad("opMix weights must be non-negative");
    total += x;
  }
  if (total <= 0) bad("opMix weights are all zero");
  if (!layering.empty()) {
    if (layering.back() != 1) bad("layering must end with a single sink layer");
    for (auto wd : layering) {
      if (wd == 0) bad("layer widths must be positive");
    }
  }
  for (double p : {copy_prob, scale_prob, share_prob, leaf_reuse_prob, decomposition_prob}) {
    if (p < 0 || p > 1) bad("probabilities must lie in [0,1]");
  }
  if (num_entities == 0 || num_categories < 2) bad("role pool too small");
}

void InstanceConfig::check() const {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidArgument, "InstanceConfig: " + m); };
  if (leaf_min < 0 || leaf_max < leaf_min) bad("invalid leafValueRange");
  if (leaf_max > value_cap) bad("leafValueRange exceeds value cap");
  if (factor_min < 1 || factor_max < factor_min) bad("invalid factorRange");
  if (positivity && leaf_min < 1 && mode == Mode::Reverse) bad("positivity requires leaf values >= 1");
}

std::string instance_role_key(std::uint32_t entity, std::uint32_t category) {
  return "E" + std::to_string(entity) + ".C" + std::to_string(category);
}

std::string total_role_key(std::uint32_t entity) { return "E" + std::to_string(entity) + ".TOTAL"; }

// --- structure ------------------------------------------------------------

namespace {

struct NodeSpec {
  Op op = Op::Sum;
  std::uint32_t arity = 2;
};

std::optional<NodeSpec> draw_spec(const StructuralConfig& cfg, Rng& rng, std::int64_t remaining) {
  const std::array<double, 4> weights{cfg.op_mix.sum, cfg.op_mix.sub, cfg.op_mix.mul, cfg.op_mix.div};
  const std::array<Op, 4> ops{Op::Sum, Op::Sub, Op::Mul, Op::Div};
  Op op = ops[rng.weighted(weights)];
  auto unary = [&]() -> std::optional<NodeSpec> {
    if (cfg.op_mix.sum > 0 && (cfg.op_mix.mul <= 0 || rng.bernoulli(0.5))) return NodeSpec{Op::Sum, 1};
    if (cfg.op_mix.mul > 0) return NodeSpec{Op::Mul, 1};
    return std::nullopt;
  };
  if (remaining < 1) return std::nullopt;
  switch (op) {
    case Op::Sum: {
      if (remaining == 1 || rng.bernoulli(cfg.copy_prob)) return NodeSpec{Op::Sum, 1};
      auto hi = std::min<std::int64_t>(cfg.max_in_degree, remaining);
      return NodeSpec{Op::Sum, static_cast<std::uint32_t>(rng.uniform(2, hi))};
    }
    case Op::Mul:
      if (remaining == 1 || rng.bernoulli(cfg.scale_prob)) return NodeSpec{Op::Mul, 1};
      return NodeSpec{Op::Mul, 2};
    default:
      if (remaining == 1) return unary();
      return NodeSpec{op, 2};
  }
}

std::vector<std::uint32_t> auto_widths(std::size_t k, Rng& rng) {
  std::vector<std::uint32_t> top_down{1};
  std::size_t rem = k - 1;
  std::uint32_t prev = 1;
  while (rem > 0) {
    auto next = static_cast<std::uint32_t>(
        std::min<std::int64_t>(static_cast<std::int64_t>(rem), rng.uniform(1, 2 * static_cast<std::int64_t>(prev))));
    top_down.push_back(next);
    rem -= next;
    prev = next;
  }
  return {top_down.rbegin(), top_down.rend()};
}

struct Proto {
  NodeSpec spec;
  bool leaf = false;
  std::size_t layer = 0;
  std::vector<std::size_t> parents;
};

// Builds the layered DAG; nullopt when the arity layout cannot connect every layer.
std::optional<std::vector<Proto>> build_layers(const StructuralConfig& cfg, std::vector<NodeSpec> specs,
                                               const std::vector<std::uint32_t>& widths, Rng& rng) {
  // Choose an assignment of specs to layers such that each layer has enough
  // parent slots to consume every node of the layer below.
  std::vector<std::vector<NodeSpec>> layers;
  bool feasible = false;
  for (int tries = 0; tries < 16 && !feasible; ++tries) {
    rng.shuffle(std::span<NodeSpec>(specs));
    layers.assign(widths.size(), {});
    std::size_t pos = 0;
    for (std::size_t j = 0; j < widths.size(); ++j) {
      for (std::uint32_t w = 0; w < widths[j]; ++w) layers[j].push_back(specs[pos++]);
    }
    feasible = true;
    for (std::size_t j = 1; j < layers.size(); ++j) {
      std::size_t slots = 0;
      for (const auto& s : layers[j]) slots += s.arity;
      if (slots < layers[j - 1].size()) {
        feasible = false;
        break;
      }
    }
  }
  if (!feasible) return std::nullopt;

  std::vector<Proto> protos;
  std::vector<std::size_t> leaves;
  std::vector<std::size_t> nonleaf_below;  // non-leaf protos in layers below the current one
  std::vector<std::size_t> prev_layer;

  for (std::size_t j = 0; j < layers.size(); ++j) {
    std::vector<std::size_t> current;
    for (const auto& spec : layers[j]) {
      protos.push_back(Proto{spec, false, j + 1, {}});
      current.push_back(protos.size() - 1);
    }
    // Every node of the previous layer feeds exactly one slot here.
    std::vector<std::size_t> slots;
    for (auto idx : current) {
      for (std::uint32_t a = 0; a < protos[idx].spec.arity; ++a) slots.push_back(idx);
    }
    rng.shuffle(std::span<std::size_t>(slots));
    std::vector<std::size_t> lower = prev_layer;
    rng.shuffle(std::span<std::size_t>(lower));
    for (std::size_t i = 0; i < lower.size(); ++i) protos[slots[i]].parents.push_back(lower[i]);
    for (std::size_t i = lower.size(); i < slots.size(); ++i) {
      auto& node = protos[slots[i]];
      auto taken = [&](std::size_t c) {
        return std::find(node.parents.begin(), node.parents.end(), c) != node.parents.end();
      };
      std::vector<std::size_t> shareable;
      for (auto c : nonleaf_below) {
        if (!taken(c)) shareable.push_back(c);
      }
      if (!shareable.empty() && rng.bernoulli(cfg.share_prob)) {
        node.parents.push_back(shareable[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(shareable.size()) - 1))]);
        continue;
      }
      std::vector<std::size_t> reusable;
      for (auto c : leaves) {
        if (!taken(c)) reusable.push_back(c);
      }
      if (!reusable.empty() && rng.bernoulli(cfg.leaf_reuse_prob)) {
        node.parents.push_back(reusable[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(reusable.size()) - 1))]);
        continue;
      }
      protos.push_back(Proto{NodeSpec{Op::Leaf, 0}, true, 0, {}});
      leaves.push_back(protos.size() - 1);
      protos[slots[i]].parents.push_back(protos.size() - 1);
    }
    for (auto idx : current) rng.shuffle(std::span<std::size_t>(protos[idx].parents));
    nonleaf_below.insert(nonleaf_below.end(), prev_layer.begin(), prev_layer.end());
    prev_layer = current;
  }
  return protos;
}

// Numbers nodes by a parent-first DFS from the sink so that ids are a
// topological order and the sink is last.
DependencyGraph number_graph(const std::vector<Proto>& protos, std::size_t sink) {
  std::vector<std::int64_t> id_of(protos.size(), -1);
  std::vector<std::size_t> order;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    if (id_of[v] >= 0) return;
    id_of[v] = -2;
    for (auto p : protos[v].parents) visit(p);
    id_of[v] = static_cast<std::int64_t>(order.size());
    order.push_back(v);
  };
  visit(sink);

  DependencyGraph g;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& p = protos[order[i]];
    GraphNode n;
    n.id = static_cast<NodeId>(i);
    n.op = p.leaf ? Op::Leaf : p.spec.op;
    for (auto q : p.parents) n.parents.push_back(static_cast<NodeId>(id_of[q]));
    g.nodes.push_back(std::move(n));
  }
  g.query = static_cast<NodeId>(order.size() - 1);
  set_all_explicit(g);
  return g;
}

}  // namespace

DependencyGraph sample_structure(const StructuralConfig& cfg, Rng& rng) {
  cfg.check();
  for (std::uint32_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
    std::vector<NodeSpec> specs;
    std::vector<std::uint32_t> widths;
    if (cfg.layering.empty()) {
      std::int64_t remaining = rng.uniform(cfg.op_min, cfg.op_max);
      bool ok = true;
      while (remaining > 0) {
        auto spec = draw_spec(cfg, rng, remaining);
        if (!spec) {
          ok = false;
          break;
        }
        specs.push_back(*spec);
        remaining -= spec->arity;
      }
      if (!ok) continue;
      widths = auto_widths(specs.size(), rng);
    } else {
      widths = cfg.layering;
      std::size_t k = std::accumulate(widths.begin(), widths.end(), std::size_t{0});
      std::int64_t total = 0;
      for (std::size_t i = 0; i < k; ++i) {
        auto spec = draw_spec(cfg, rng, cfg.op_max);
        if (!spec) break;
        specs.push_back(*spec);
        total += spec->arity;
      }
      if (specs.size() != k || total < cfg.op_min || total > cfg.op_max) continue;
    }
    auto protos = build_layers(cfg, specs, widths, rng);
    if (!protos) continue;
    std::size_t sink = 0;
    for (std::size_t i = 0; i < protos->size(); ++i) {
      if (!(*protos)[i].leaf && (*protos)[i].layer == widths.size()) sink = i;
    }
    return number_graph(*protos, sink);
  }
  throw Error(Errc::InfeasibleConfig, "no structure satisfies opRange/layering after " +
                                          std::to_string(cfg.max_retries) + " attempts");
}

DependencyGraph sample_structure(const StructuralConfig& cfg) {
  Rng rng(cfg.seed);
  return sample_structure(cfg, rng);
}

// --- instance ---------------------------------------------------------------

namespace {

void assign_roles(DependencyGraph& g, const StructuralConfig& scfg, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<bool> is_total(n, false), member(n, false);
  std::vector<NodeId> candidates;
  for (const auto& node : g.nodes) {
    if (node.op == Op::Sum && node.parents.size() >= 2 && node.parents.size() <= scfg.num_categories) {
      candidates.push_back(node.id);
    }
  }
  rng.shuffle(std::span<NodeId>(candidates));

  std::vector<std::uint32_t> entities(scfg.num_entities);
  std::iota(entities.begin(), entities.end(), 0u);
  rng.shuffle(std::span<std::uint32_t>(entities));
  std::size_t next_entity = 0;

  std::vector<std::string> roles(n);
  for (NodeId d : candidates) {
    if (member[d] || next_entity >= entities.size()) continue;
    if (!rng.bernoulli(scfg.decomposition_prob)) continue;
    const auto& parents = g.nodes[d].parents;
    bool ok = std::none_of(parents.begin(), parents.end(), [&](NodeId p) { return is_total[p] || member[p]; });
    if (!ok) continue;
    is_total[d] = true;
    std::uint32_t entity = entities[next_entity++];
    roles[d] = total_role_key(entity);
    std::vector<std::uint32_t> cats(scfg.num_categories);
    std::iota(cats.begin(), cats.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(cats));
    for (std::size_t i = 0; i < parents.size(); ++i) {
      member[parents[i]] = true;
      roles[parents[i]] = instance_role_key(entity, cats[i]);
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> slots;
  for (std::size_t e = next_entity; e < entities.size(); ++e) {
    for (std::uint32_t c = 0; c < scfg.num_categories; ++c) slots.emplace_back(entities[e], c);
  }
  rng.shuffle(std::span<std::pair<std::uint32_t, std::uint32_t>>(slots));
  std::size_t next_slot = 0;
  for (NodeId i = 0; i < n; ++i) {
    if (!roles[i].empty()) continue;
    if (next_slot >= slots.size()) throw Error(Errc::InstantiationFailed, "role pool exhausted");
    roles[i] = instance_role_key(slots[next_slot].first, slots[next_slot].second);
    ++next_slot;
  }
  for (NodeId i = 0; i < n; ++i) g.nodes[i].role = roles[i];
}

std::vector<std::int64_t> divisors_in(std::int64_t v, std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = std::max<std::int64_t>(lo, 1); d <= hi; ++d) {
    if (v % d == 0) out.push_back(d);
  }
  return out;
}

// One attempt at assigning leaf values lazily so that SUB and DIV are
// satisfiable where a free leaf operand allows it. false on rejection.
bool try_instantiate(DependencyGraph& g, const InstanceConfig& icfg, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<std::optional<std::int64_t>> val(n);
  const auto lo = icfg.leaf_min, hi = icfg.leaf_max;
  auto free_leaf = [&](NodeId id) { return g.nodes[id].is_leaf() && !val[id]; };
  auto pick = [&](std::int64_t a, std::int64_t b) { return rng.uniform(a, b); };

  for (auto& node : g.nodes) {
    if (node.is_scale()) node.factor = rng.uniform(icfg.factor_min, icfg.factor_max);
  }

  for (NodeId id : topological_order(g)) {
    auto& node = g.nodes[id];
    if (node.is_leaf()) continue;
    if (node.op == Op::Sub) {
      NodeId a = node.parents[0], b = node.parents[1];
      if (free_leaf(a) && free_leaf(b)) {
        val[a] = pick(lo, hi);
        val[b] = pick(lo, *val[a] < lo ? lo : std::min(hi, *val[a]));
      } else if (free_leaf(b)) {
        if (*val[a] < lo) return false;
        val[b] = pick(lo, std::min(hi, *val[a]));
      } else if (free_leaf(a)) {
        if (*val[b] > hi) return false;
        val[a] = pick(std::max(lo, *val[b]), hi);
      }
    } else if (node.op == Op::Div) {
      NodeId a = node.parents[0], b = node.parents[1];
      if (free_leaf(a) && free_leaf(b)) {
        auto top = std::max(lo, std::min<std::int64_t>(hi, 12));
        val[b] = pick(std::max<std::int64_t>(lo, 1), std::max<std::int64_t>(top, std::max<std::int64_t>(lo, 1)));
        std::int64_t kmin = (lo + *val[b] - 1) / *val[b], kmax = hi / *val[b];
        if (kmin > kmax) return false;
        val[a] = *val[b] * pick(kmin, kmax);
      } else if (free_leaf(b)) {
        std::vector<std::int64_t> ds;
        if (*val[a] == 0) {
          ds.push_back(pick(std::max<std::int64_t>(lo, 1), std::max<std::int64_t>(hi, 1)));
        } else {
          ds = divisors_in(*val[a], lo, hi);
          if (ds.size() > 1 && ds.front() == 1) ds.erase(ds.begin());
        }
        if (ds.empty()) return false;
        val[b] = ds[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(ds.size()) - 1))];
      } else if (free_leaf(a)) {
        std::int64_t d = *val[b];
        if (d <= 0) return false;
        std::int64_t kmin = (lo + d - 1) / d, kmax = hi / d;
        if (kmin > kmax) return false;
        val[a] = d * pick(kmin, kmax);
      }
    }
    for (NodeId p : node.parents) {
      if (!val[p]) val[p] = pick(lo, hi);
    }
    std::vector<std::int64_t> cur(n, 0);
    for (NodeId p : node.parents) cur[p] = *val[p];
    try {
      std::int64_t v = apply_op(node, cur);
      if (v > icfg.value_cap) return false;
      val[id] = v;
    } catch (const Error&) {
      return false;
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (!val[i]) val[i] = pick(lo, hi);  // isolated leaf
    g.nodes[i].value = *val[i];
  }
  g.answer = g.nodes[g.query].value;
  return true;
}

}  // namespace

DependencyGraph instantiate(const DependencyGraph& structure, const StructuralConfig& scfg,
                            const InstanceConfig& icfg, Rng& rng) {
  icfg.check();
  DependencyGraph g = structure;
  bool needs_roles = std::any_of(g.nodes.begin(), g.nodes.end(), [](const auto& n) { return n.role.empty(); });
  if (needs_roles) assign_roles(g, scfg, rng);
  if (g.visibility.empty()) set_all_explicit(g);
  for (std::uint32_t attempt = 0; attempt < icfg.max_retries; ++attempt) {
    if (try_instantiate(g, icfg, rng)) return g;
  }
  throw Error(Errc::InstantiationFailed,
              "no exact/non-negative assignment after " + std::to_string(icfg.max_retries) + " attempts");
}

// --- reverse mode -----------------------------------------------------------

std::optional<std::vector<LinearValue>> linear_forms(const DependencyGraph& g, NodeId unknown) {
  std::vector<LinearValue> f(g.size());
  for (NodeId id : topological_order(g)) {
    const auto& node = g.nodes[id];
    if (node.is_leaf()) {
      f[id] = id == unknown ? LinearValue::unknown() : LinearValue::number(node.value);
      continue;
    }
    std::optional<LinearValue> r;
    switch (node.op) {
      case Op::Sum:
        r = LinearValue{};
        for (NodeId p : node.parents) {
          r = lin_add(*r, f[p]);
          if (!r) break;
        }
        break;
      case Op::Sub: r = lin_sub(f[node.parents[0]], f[node.parents[1]]); break;
      case Op::Mul:
        if (node.parents.size() == 1) {
          r = lin_mul(LinearValue::number(node.factor.value_or(1)), f[node.parents[0]]);
        } else {
          r = lin_mul(f[node.parents[0]], f[node.parents[1]]);
        }
        break;
      case Op::Div: r = lin_div(f[node.parents[0]], f[node.parents[1]]); break;
      case Op::Leaf: break;
    }
    if (!r) return std::nullopt;
    f[id] = *r;
  }
  return f;
}

DependencyGraph make_reverse(const DependencyGraph& g, const InstanceConfig& icfg, Rng& rng,
                             std::optional<NodeId> forced_unknown) {
  if (g.mode != Mode::Forward) throw Error(Errc::InvalidArgument, "make_reverse expects a FORWARD graph");
  const NodeId sink = g.query;
  std::vector<NodeId> leaves;
  if (forced_unknown) {
    if (*forced_unknown >= g.size() || !g.nodes[*forced_unknown].is_leaf()) {
      throw Error(Errc::NoSolvableUnknown, "requested unknown is not a leaf");
    }
    leaves.push_back(*forced_unknown);
  } else {
    for (const auto& n : g.nodes) {
      if (n.is_leaf() && n.id != sink) leaves.push_back(n.id);
    }
    if (icfg.unknown_policy == UnknownPolicy::Random) rng.shuffle(std::span<NodeId>(leaves));
  }
  for (NodeId u : leaves) {
    if (icfg.positivity && g.nodes[u].value <= 0) continue;
    auto forms = linear_forms(g, u);
    if (!forms || (*forms)[sink].coeff == 0) continue;
    DependencyGraph r = g;
    r.mode = Mode::Reverse;
    r.unknown = u;
    r.constraint = Constraint{sink, g.nodes[sink].value, icfg.positivity};
    r.query = u;
    r.answer = g.nodes[u].value;
    return r;
  }
  throw Error(Errc::NoSolvableUnknown, "no leaf yields a linear constraint with nonzero coefficient");
}

std::int64_t solve_unknown(const DependencyGraph& g) {
  if (g.mode != Mode::Reverse || !g.unknown || !g.constraint) {
    throw Error(Errc::InvalidArgument, "solve_unknown expects a REVERSE graph");
  }
  auto forms = linear_forms(g, *g.unknown);
  if (!forms) throw Error(Errc::NonlinearConstraint, "constraint is not linear in the unknown");
  const auto& f = (*forms)[g.constraint->node];
  if (f.coeff == 0) throw Error(Errc::NonUniqueSolution, "constraint does not depend on the unknown");
  std::int64_t rhs = g.constraint->value - f.constant;
  if (rhs % f.coeff != 0) {
    throw Error(Errc::NonIntegerSolution, std::to_string(rhs) + " / " + std::to_string(f.coeff));
  }
  std::int64_t x = rhs / f.coeff;
  if (g.constraint->positive_unknown && x <= 0) {
    throw Error(Errc::ConstraintViolatesPositivity, "solution " + std::to_string(x));
  }
  return x;
}

DependencyGraph generate_graph(const StructuralConfig& scfg, const InstanceConfig& icfg, std::uint64_t seed) {
  Rng rng(seed);
  for (std::uint32_t attempt = 0; attempt < scfg.max_retries; ++attempt) {
    DependencyGraph structure = sample_structure(scfg, rng);
    try {
      DependencyGraph g = instantiate(structure, scfg, icfg, rng);
      if (icfg.mode == Mode::Reverse) g = make_reverse(g, icfg, rng);
      return g;
    } catch (const Error& e) {
      if (e.code() != Errc::InstantiationFailed && e.code() != Errc::NoSolvableUnknown) throw;
    }
  }
  throw Error(Errc::InfeasibleConfig, "no instantiable structure after " + std::to_string(scfg.max_retries) + " attempts");
}

// --- config documents ---------------------------------------------------------

namespace {

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

StructuralConfig structural_config_from_json(const Json& j, StructuralConfig c) {
  try {
    if (j.contains("opRange")) {
      c.op_min = j["opRange"].at(0).get<std::int64_t>();
      c.op_max = j["opRange"].at(1).get<std::int64_t>();
    }
    read_if(j, "maxInDegree", c.max_in_degree);
    if (j.contains("layering")) {
      if (j["layering"].is_string()) {
        if (j["layering"].get<std::string>() != "AUTO") throw Error(Errc::InvalidArgument, "layering must be AUTO or a list");
        c.layering.clear();
      } else {
        c.layering = j["layering"].get<std::vector<std::uint32_t>>();
      }
    }
    if (j.contains("opMix")) {
      const auto& m = j["opMix"];
      read_if(m, "SUM", c.op_mix.sum);
      read_if(m, "SUB", c.op_mix.sub);
      read_if(m, "MUL", c.op_mix.mul);
      read_if(m, "DIV", c.op_mix.div);
    }
    read_if(j, "copyProb", c.copy_prob);
    read_if(j, "scaleProb", c.scale_prob);
    read_if(j, "shareProb", c.share_prob);
    read_if(j, "leafReuseProb", c.leaf_reuse_prob);
    read_if(j, "numEntities", c.num_entities);
    read_if(j, "numCategories", c.num_categories);
    read_if(j, "decompositionProb", c.decomposition_prob);
    read_if(j, "maxRetries", c.max_retries);
    read_if(j, "seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("StructuralConfig: ") + e.what());
  }
  c.check();
  return c;
}

InstanceConfig instance_config_from_json(const Json& j, InstanceConfig c) {
  try {
    if (j.contains("leafValueRange")) {
      c.leaf_min = j["leafValueRange"].at(0).get<std::int64_t>();
      c.leaf_max = j["leafValueRange"].at(1).get<std::int64_t>();
    }
    if (j.contains("factorRange")) {
      c.factor_min = j["factorRange"].at(0).get<std::int64_t>();
      c.factor_max = j["factorRange"].at(1).get<std::int64_t>();
    }
    read_if(j, "valueCap", c.value_cap);
    if (j.contains("mode")) c.mode = mode_from_name(j["mode"].get<std::string>());
    if (j.contains("unknownPolicy")) {
      const auto& u = j["unknownPolicy"];
      auto leaf = u.value("leaf", std::string("RANDOM"));
      if (leaf == "RANDOM") {
        c.unknown_policy = UnknownPolicy::Random;
      } else if (leaf == "FIRST_LEAF") {
        c.unknown_policy = UnknownPolicy::FirstLeaf;
      } else {
        throw Error(Errc::InvalidArgument, "unknownPolicy.leaf must be RANDOM or FIRST_LEAF");
      }
      read_if(u, "positivity", c.positivity);
    }
    read_if(j, "maxRetries", c.max_retries);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("InstanceConfig: ") + e.what());
  }
  c.check();
  return c;
}

Json to_json(const StructuralConfig& c) {
  Json j;
  j["opRange"] = {c.op_min, c.op_max};
  j["maxInDegree"] = c.max_in_degree;
  j["layering"] = c.layering.empty() ? Json("AUTO") : Json(c.layering);
  j["opMix"] = {{"SUM", c.op_mix.sum}, {"SUB", c.op_mix.sub}, {"MUL", c.op_mix.mul}, {"DIV", c.op_mix.div}};
  j["copyProb"] = c.copy_prob;
  j["scaleProb"] = c.scale_prob;
  j["shareProb"] = c.share_prob;
  j["leafReuseProb"] = c.leaf_reuse_prob;
  j["numEntities"] = c.num_entities;
  j["numCategories"] = c.num_categories;
  j["decompositionProb"] = c.decomposition_prob;
  j["maxRetries"] = c.max_retries;
  j["seed"] = c.seed;
  return j;
}

Json to_json(const InstanceConfig& c) {
  Json j;
  j["leafValueRange"] = {c.leaf_min, c.leaf_max};
  j["factorRange"] = {c.factor_min, c.factor_max};
  j["valueCap"] = c.value_cap;
  j["mode"] = mode_name(c.mode);
  j["unknownPolicy"] = {{"leaf", c.unknown_policy == UnknownPolicy::Random ? "RANDOM" : "FIRST_LEAF"},
                        {"positivity", c.positivity}};
  j["maxRetries"] = c.max_retries;
  return j;
}

}  // namespace rforge
