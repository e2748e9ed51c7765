#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "reasonforge/graph_json.hpp"

namespace rftest {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) { return std::string(RF_TEST_DATA) + "/" + name; }

/// Solution text of the published worked example, answer tag included.
inline std::string worked_solution() { return read_file(data_path("worked_example.txt")); }

inline rforge::DependencyGraph worked_gold() {
  return rforge::graph_from_json(rforge::Json::parse(read_file(data_path("worked_example_gold.json"))));
}

}  // namespace rftest
