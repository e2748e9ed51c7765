#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reasonforge/graph.hpp"
#include "reasonforge/graph_json.hpp"
#include "reasonforge/linear.hpp"
#include "reasonforge/rng.hpp"

namespace rforge {

struct OpMix {
  double sum = 0.45;
  double sub = 0.2;
  double mul = 0.2;
  double div = 0.15;
};

/// Structural knobs. `layering` lists non-leaf layer widths from the layer
/// just above the leaves up to the sink (last entry 1); empty means AUTO.
struct StructuralConfig {
  std::int64_t op_min = 2;
  std::int64_t op_max = 10;
  std::uint32_t max_in_degree = 3;
  std::vector<std::uint32_t> layering;
  OpMix op_mix;
  double copy_prob = 0.15;
  double scale_prob = 0.3;
  double share_prob = 0.25;
  double leaf_reuse_prob = 0.3;
  std::uint32_t num_entities = 24;
  std::uint32_t num_categories = 8;
  double decomposition_prob = 0.8;
  std::uint32_t max_retries = 64;
  std::uint64_t seed = 0;

  /// Throws Error(InvalidArgument).
  void check() const;
};

enum class UnknownPolicy { Random, FirstLeaf };

struct InstanceConfig {
  std::int64_t leaf_min = 1;
  std::int64_t leaf_max = 50;
  std::int64_t factor_min = 2;
  std::int64_t factor_max = 5;
  std::int64_t value_cap = 1'000'000;
  Mode mode = Mode::Forward;
  UnknownPolicy unknown_policy = UnknownPolicy::Random;
  bool positivity = true;
  std::uint32_t max_retries = 64;

  void check() const;
};

/// Layered DAG with op_count in range; values unassigned; query = sink,
/// which is also the last node in topological order. Throws InfeasibleConfig.
DependencyGraph sample_structure(const StructuralConfig& cfg, Rng& rng);
DependencyGraph sample_structure(const StructuralConfig& cfg);

/// Assigns abstract roles (if absent), leaf values and scaling factors and
/// evaluates every node. Throws InstantiationFailed after bounded resampling.
DependencyGraph instantiate(const DependencyGraph& structure, const StructuralConfig& scfg,
                            const InstanceConfig& icfg, Rng& rng);

/// Hides one leaf as the unknown and asserts the sink's value.
/// Throws NoSolvableUnknown.
DependencyGraph make_reverse(const DependencyGraph& g, const InstanceConfig& icfg, Rng& rng,
                             std::optional<NodeId> forced_unknown = std::nullopt);

/// Every node as a linear form in the value of `unknown`; nullopt when some
/// node is nonlinear in it or needs inexact symbolic division.
std::optional<std::vector<LinearValue>> linear_forms(const DependencyGraph& g, NodeId unknown);

/// Solves the asserted constraint of a REVERSE graph for its unknown.
std::int64_t solve_unknown(const DependencyGraph& g);

/// Full structure + instance (+ reversal) pipeline under one seed, resampling
/// structures that fail to instantiate.
DependencyGraph generate_graph(const StructuralConfig& scfg, const InstanceConfig& icfg, std::uint64_t seed);

// Abstract role keys produced by the generator and lexicalized by templates.
std::string instance_role_key(std::uint32_t entity, std::uint32_t category);
std::string total_role_key(std::uint32_t entity);

// Config documents use the same field names as the structs (camelCase).
StructuralConfig structural_config_from_json(const Json& j, StructuralConfig base = {});
InstanceConfig instance_config_from_json(const Json& j, InstanceConfig base = {});
Json to_json(const StructuralConfig& cfg);
Json to_json(const InstanceConfig& cfg);

}  // namespace rforge
