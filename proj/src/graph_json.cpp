#include "reasonforge/graph_json.hpp"

#include "reasonforge/error.hpp"

namespace rforge {

Json graph_to_json(const DependencyGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes) {
    Json node;
    node["id"] = n.id;
    node["role"] = n.role;
    node["op"] = op_name(n.op);
    node["parents"] = n.parents;
    node["value"] = n.value;
    if (n.factor) node["factor"] = *n.factor;
    nodes.push_back(std::move(node));
  }
  Json vis = Json::array();
  for (const auto& e : g.edges()) {
    auto it = g.visibility.find(e);
    if (it == g.visibility.end()) continue;
    vis.push_back(Json::array({e.parent, e.child, visibility_name(it->second)}));
  }
  Json j;
  j["nodes"] = std::move(nodes);
  j["query"] = g.query;
  j["answer"] = g.answer;
  j["visibility"] = std::move(vis);
  j["mode"] = mode_name(g.mode);
  j["unknown"] = g.unknown ? Json(*g.unknown) : Json(nullptr);
  if (g.constraint) {
    Json c;
    c["node"] = g.constraint->node;
    c["value"] = g.constraint->value;
    c["positive"] = g.constraint->positive_unknown;
    j["constraint"] = std::move(c);
  } else {
    j["constraint"] = nullptr;
  }
  return j;
}

DependencyGraph graph_from_json(const Json& j) {
  try {
    DependencyGraph g;
    for (const auto& jn : j.at("nodes")) {
      GraphNode n;
      n.id = jn.at("id").get<NodeId>();
      n.role = jn.at("role").get<std::string>();
      n.op = op_from_name(jn.at("op").get<std::string>());
      n.parents = jn.at("parents").get<std::vector<NodeId>>();
      n.value = jn.at("value").get<std::int64_t>();
      if (jn.contains("factor") && !jn["factor"].is_null()) n.factor = jn["factor"].get<std::int64_t>();
      g.nodes.push_back(std::move(n));
    }
    g.query = j.at("query").get<NodeId>();
    g.answer = j.at("answer").get<std::int64_t>();
    if (j.contains("visibility")) {
      for (const auto& jv : j["visibility"]) {
        Edge e{jv.at(0).get<NodeId>(), jv.at(1).get<NodeId>()};
        g.visibility[e] = visibility_from_name(jv.at(2).get<std::string>());
      }
    } else {
      set_all_explicit(g);
    }
    g.mode = mode_from_name(j.value("mode", std::string("FORWARD")));
    if (j.contains("unknown") && !j["unknown"].is_null()) g.unknown = j["unknown"].get<NodeId>();
    if (j.contains("constraint") && !j["constraint"].is_null()) {
      const auto& jc = j["constraint"];
      g.constraint = Constraint{jc.at("node").get<NodeId>(), jc.at("value").get<std::int64_t>(),
                                jc.value("positive", true)};
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed graph json: ") + e.what());
  }
}

std::string dump_compact(const Json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace rforge
