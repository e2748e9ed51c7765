#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reasonforge/graph.hpp"
#include "reasonforge/linear.hpp"

namespace rforge {

struct ParsedStep {
  std::string role;
  std::string role_key;  ///< normalize_role(role)
  std::string var;
  bool is_unknown = false;
  /// Earlier variables the step reads, in order of first reference.
  std::vector<std::string> dependencies;
  /// Role keys of `dependencies`, resolved when the step was parsed.
  std::vector<std::string> parent_roles;
  /// Value before trace-level back-substitution of the unknown.
  std::optional<LinearValue> value;
  /// Operation inferred from the operators of the defining expressions.
  std::optional<Op> op_hint;
  /// Value of the unknown implied by an equation inside this step.
  std::optional<std::int64_t> pin;
  std::vector<std::string> warnings;
  std::string raw;
};

struct PredictedNode {
  std::string role;
  std::string role_key;
  std::vector<std::string> parent_roles;
  std::optional<std::int64_t> value;
  std::optional<Op> op;
};

struct ParsedTrace {
  std::vector<ParsedStep> steps;
  /// One node per distinct role key, in order of first definition; a later
  /// redefinition replaces the earlier content.
  std::vector<PredictedNode> nodes;
  std::optional<std::int64_t> final_answer;
  std::optional<std::string> unknown_var;
  std::optional<std::int64_t> unknown_value;
  std::vector<std::string> warnings;

  const PredictedNode* find(const std::string& role_key) const;
};

struct VarInfo {
  std::optional<LinearValue> value;
  std::string role_key;
};

/// Variables visible to a step.
struct TraceEnv {
  std::map<std::string, VarInfo> vars;
  std::optional<std::string> unknown;
};

/// Step texts, each starting at a "Define" keyword; text before the first
/// one and after an answer/solution end marker is dropped.
std::vector<std::string> segment(std::string_view solution);

/// Parses one "Define <role> as <var>; ..." step. Never throws.
ParsedStep parse_step(std::string_view step, const TraceEnv& env);

/// Never throws; degraded inputs produce warnings.
ParsedTrace parse_trace(std::string_view solution, std::string_view answer_text = {});

/// Integer inside the last [answer]...[/answer], else the last integer literal.
std::optional<std::int64_t> extract_answer(std::string_view text);

/// Structure of the predicted graph for signature comparison; nullopt when a
/// step's operation could not be inferred or a parent role is undefined.
std::optional<Structure> trace_structure(const ParsedTrace& trace);

}  // namespace rforge
