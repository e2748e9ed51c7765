#include "reasonforge/templates.hpp"

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "reasonforge/error.hpp"

namespace rforge {

namespace detail {
const std::vector<std::string_view>& builtin_template_sources();
}

namespace {

const std::string kTotalPrefix = "total number of ";

struct AbstractRole {
  std::size_t entity = 0;
  std::optional<std::size_t> category;
};

std::optional<AbstractRole> parse_abstract(const std::string& role) {
  static const std::regex re(R"(^E(\d+)\.(?:C(\d+)|TOTAL)$)");
  std::smatch m;
  if (!std::regex_match(role, m, re)) return std::nullopt;
  AbstractRole r;
  r.entity = std::stoul(m[1].str());
  if (m[2].matched) r.category = std::stoul(m[2].str());
  return r;
}

}  // namespace

bool is_total_role(const std::string& role) {
  return role.rfind(kTotalPrefix, 0) == 0 || role.ends_with(".TOTAL");
}

std::string fill(const std::string& pattern, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '{') {
      out.push_back(pattern[i++]);
      continue;
    }
    auto close = pattern.find('}', i);
    if (close == std::string::npos) throw Error(Errc::PatternGap, "unterminated placeholder in '" + pattern + "'");
    auto key = pattern.substr(i + 1, close - i - 1);
    auto it = values.find(key);
    if (it == values.end()) throw Error(Errc::PatternGap, "no value for {" + key + "}");
    out += it->second;
    i = close + 1;
  }
  return out;
}

std::string Template::lexicalize(const std::string& role) const {
  auto abs = parse_abstract(role);
  if (!abs) return role;
  if (abs->entity >= entities.size()) {
    throw Error(Errc::LexiconGap, "template " + id + " has no entity #" + std::to_string(abs->entity));
  }
  const auto& entity = entities[abs->entity];
  if (!abs->category) return fill(role_total, {{"total_noun", total_noun}, {"entity", entity}});
  if (*abs->category >= categories.size()) {
    throw Error(Errc::LexiconGap, "template " + id + " has no category #" + std::to_string(*abs->category));
  }
  return fill(role_instance, {{"category", categories[*abs->category]}, {"entity", entity}});
}

std::string Template::reference(const std::string& lexical_role) const {
  return fill(is_total_role(lexical_role) ? ref_total : ref_instance, {{"role", lexical_role}});
}

std::string Template::question(const std::string& lexical_role) const {
  auto in = lexical_role.find(" in ");
  if (is_total_role(lexical_role)) {
    auto noun_begin = kTotalPrefix.size();
    if (in != std::string::npos && in > noun_begin) {
      return fill(pattern("question_total"), {{"total_noun", lexical_role.substr(noun_begin, in - noun_begin)},
                                              {"entity", lexical_role.substr(in + 4)}});
    }
  } else if (in != std::string::npos) {
    return fill(pattern("question_instance"),
                {{"category", lexical_role.substr(0, in)}, {"entity", lexical_role.substr(in + 4)}});
  }
  return fill(pattern("question_other"), {{"target", reference(lexical_role)}});
}

const std::string& Template::pattern(const std::string& key) const {
  auto it = patterns.find(key);
  if (it == patterns.end()) throw Error(Errc::PatternGap, "template " + id + " lacks pattern '" + key + "'");
  return it->second;
}

Template template_from_json(const Json& j) {
  try {
    Template t;
    t.id = j.at("id").get<std::string>();
    t.name = j.value("name", t.id);
    t.entities = j.at("entities").get<std::vector<std::string>>();
    t.categories = j.at("categories").get<std::vector<std::string>>();
    t.total_noun = j.at("total_noun").get<std::string>();
    t.implicit_ratio = j.value("implicit_ratio", 0.0);
    t.role_instance = j.value("role_instance", std::string("{category} in {entity}"));
    t.role_total = j.value("role_total", std::string("total number of {total_noun} in {entity}"));
    t.ref_instance = j.value("ref_instance", std::string("the number of {role}"));
    t.ref_total = j.value("ref_total", std::string("the {role}"));
    t.list_and = j.value("list_and", std::string("and"));
    t.patterns = j.at("patterns").get<std::map<std::string, std::string>>();
    if (t.implicit_ratio < 0 || t.implicit_ratio > 1) throw Error(Errc::InvalidArgument, "implicit_ratio outside [0,1]");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("template: ") + e.what());
  }
}

Json to_json(const Template& t) {
  Json j;
  j["id"] = t.id;
  j["name"] = t.name;
  j["entities"] = t.entities;
  j["categories"] = t.categories;
  j["total_noun"] = t.total_noun;
  j["implicit_ratio"] = t.implicit_ratio;
  j["role_instance"] = t.role_instance;
  j["role_total"] = t.role_total;
  j["ref_instance"] = t.ref_instance;
  j["ref_total"] = t.ref_total;
  j["list_and"] = t.list_and;
  j["patterns"] = t.patterns;
  return j;
}

const TemplateRegistry& TemplateRegistry::builtin() {
  static const TemplateRegistry reg = [] {
    TemplateRegistry r;
    for (auto src : detail::builtin_template_sources()) r.add(template_from_json(Json::parse(src)));
    return r;
  }();
  return reg;
}

void TemplateRegistry::add(Template t) {
  auto id = t.id;
  templates_[id] = std::move(t);
}

void TemplateRegistry::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open template file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, path + ": " + e.what());
  }
  add(template_from_json(j));
}

const Template& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(Errc::InvalidArgument, "unknown template '" + id + "'");
  return it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

}  // namespace rforge
