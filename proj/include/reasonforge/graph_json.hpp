#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "reasonforge/graph.hpp"

namespace rforge {

using Json = nlohmann::ordered_json;

/// Canonical graph object; field order is fixed:
/// {nodes:[{id, role, op, parents, value[, factor]}], query, answer,
///  visibility:[[parent, child, "EXPLICIT"|"IMPLICIT"]...], mode, unknown, constraint}
Json graph_to_json(const DependencyGraph& g);

/// Throws Error(InvalidArgument) on schema violations.
DependencyGraph graph_from_json(const Json& j);

std::string dump_compact(const Json& j);

}  // namespace rforge
