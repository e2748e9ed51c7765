#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "reasonforge/graph_json.hpp"

namespace rforge {

/// Surface context lexicalizing abstract roles. Abstract role keys are
/// "E<entity>.C<category>" (an instance) and "E<entity>.TOTAL" (a total over
/// an entity); any other role string is used verbatim.
struct Template {
  std::string id;
  std::string name;
  std::vector<std::string> entities;
  std::vector<std::string> categories;
  std::string total_noun;
  double implicit_ratio = 0.0;
  std::string role_instance;
  std::string role_total;
  std::string ref_instance;
  std::string ref_total;
  std::string list_and = "and";
  std::map<std::string, std::string> patterns;

  /// Throws LexiconGap for abstract keys outside the lexicon.
  std::string lexicalize(const std::string& role) const;
  /// "the number of <role>" or "the <role>" for totals.
  std::string reference(const std::string& lexical_role) const;
  /// Question sentence asking for a lexicalized role.
  std::string question(const std::string& lexical_role) const;
  /// Throws PatternGap.
  const std::string& pattern(const std::string& key) const;
};

Template template_from_json(const Json& j);
Json to_json(const Template& t);

/// Replaces {name} placeholders; unknown placeholders throw PatternGap.
std::string fill(const std::string& pattern, const std::map<std::string, std::string>& values);

bool is_total_role(const std::string& role);

class TemplateRegistry {
 public:
  /// Registry preloaded with the shipped A/B/C templates.
  static const TemplateRegistry& builtin();

  void add(Template t);
  /// Loads one template file (JSON). Throws Io / InvalidArgument.
  void load_file(const std::string& path);
  /// Throws InvalidArgument for unknown ids.
  const Template& get(const std::string& id) const;
  bool contains(const std::string& id) const { return templates_.count(id) > 0; }
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Template> templates_;
};

}  // namespace rforge
