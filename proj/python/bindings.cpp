#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "reasonforge/budget.hpp"
#include "reasonforge/cli.hpp"
#include "reasonforge/corpus.hpp"
#include "reasonforge/error.hpp"
#include "reasonforge/renderer.hpp"
#include "reasonforge/service.hpp"
#include "reasonforge/trace_parser.hpp"
#include "reasonforge/verifier.hpp"

namespace py = pybind11;
using namespace rforge;

namespace {

std::string parsed_trace_json(const std::string& solution, const std::string& answer) {
  ParsedTrace t = parse_trace(solution, answer);
  Json j;
  Json nodes = Json::array();
  for (const auto& n : t.nodes) {
    Json node;
    node["role"] = n.role;
    node["parents"] = n.parent_roles;
    node["value"] = n.value ? Json(*n.value) : Json(nullptr);
    node["op"] = n.op ? Json(op_name(*n.op)) : Json(nullptr);
    nodes.push_back(std::move(node));
  }
  j["steps"] = t.steps.size();
  j["nodes"] = std::move(nodes);
  j["final_answer"] = t.final_answer ? Json(*t.final_answer) : Json(nullptr);
  j["unknown_value"] = t.unknown_value ? Json(*t.unknown_value) : Json(nullptr);
  j["warnings"] = t.warnings;
  return dump_compact(j);
}

std::string record_json(const std::string& template_id, std::int64_t op_min, std::int64_t op_max,
                        const std::string& mode, std::uint64_t seed) {
  StructuralConfig scfg;
  scfg.op_min = op_min;
  scfg.op_max = op_max;
  InstanceConfig icfg;
  icfg.mode = mode_from_name(mode);
  return record_line(make_record(TemplateRegistry::builtin().get(template_id), scfg, icfg, seed, "py"));
}

std::string score_json(const std::string& gold_graph, const std::string& solution, std::int64_t gold_answer,
                       const std::string& reward) {
  DependencyGraph g = graph_from_json(Json::parse(gold_graph));
  return dump_compact(score_solution(g, gold_answer, solution, {}, reward_preset(reward)));
}

std::string plan_json(const std::string& total, const std::string& beta) {
  return dump_compact(to_json(allocate(parse_rational(total), parse_rational(beta), BudgetConstants{})));
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_reasonforge, m) {
  m.doc() = "Native core of the reasonforge toolkit";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
  error.call_once_and_store_result([&] { return py::exception<Error>(m, "Error"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error.get_stored(), e.what());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("make_record", &record_json, py::arg("template_id"), py::arg("op_min"), py::arg("op_max"),
        py::arg("mode") = "FORWARD", py::arg("seed") = 0, "Generate and render one instance as a corpus record line.");
  m.def("parse_trace", &parsed_trace_json, py::arg("solution"), py::arg("answer") = "");
  m.def("score", &score_json, py::arg("gold_graph"), py::arg("solution"), py::arg("gold_answer"),
        py::arg("reward") = "strict", py::call_guard<py::gil_scoped_release>());
  m.def(
      "pass_at_k",
      [](std::uint64_t n, std::uint64_t c, std::uint64_t k) {
        Rational q = pass_at_k(n, c, k);
        return py::make_tuple(numerator(q).str(), denominator(q).str());
      },
      py::arg("n"), py::arg("c"), py::arg("k"), "Exact estimate as (numerator, denominator) strings.");
  m.def("allocate", &plan_json, py::arg("total"), py::arg("beta"));
  m.def("budget_table", [] { return comparison_text(comparison_table(BudgetConstants{})); });
  m.def("canonicalize", [](const std::string& s) { return canonicalize(s); });
  m.def("content_hash", [](const py::bytes& b) { return content_hash(std::string(b)); });
  m.def("template_ids", [] { return TemplateRegistry::builtin().ids(); });
  m.def("recipe_presets", &recipe_preset_names);
  m.def("run_cli", &cli, py::arg("args"), "Run the command line; returns (exit code, stdout, stderr).");
  m.attr("WIRE_VERSION") = std::string(kWireVersion);
}
