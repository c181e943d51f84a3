// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <set>

#include "nlin/models.hpp"
#include "json.hpp"

namespace nlin {

namespace {

EgnTerm term(const char* name, const char* family, double c, const char* moment, const char* moment_of,
             const char* form, const char* outer, const char* f2, const char* f3, bool enabled, const char* note) {
  EgnTerm t;
  t.name = name;
  t.family = family;
  t.coefficient = c;
  t.moment = moment;
  t.moment_of = moment_of;
  t.form = form;
  t.outer = outer;
  t.inner_f2 = f2;
  t.inner_f3 = f3;
  t.enabled = enabled;
  t.note = note;
  return t;
}

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> k{"name", "family", "coefficient", "moment", "moment_of", "form",
                                       "outer", "inner_f2", "inner_f3", "enabled", "note"};
  return k;
}

double parse_coefficient(const nlohmann::json& v, const std::string& name) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number() && v[1].get<double>() != 0.0)
    return v[0].get<double>() / v[1].get<double>();
  throw ConfigError("EGN term " + name + ": coefficient must be a number or [numerator, denominator]");
}

}  // namespace

EgnConstants default_egn_constants() {
  EgnConstants c;
  c.terms = {
      term("XCI_1", "XCI", 80.0 / 81.0, "phi", "int", "nested", "cut", "int", "int", true,
           "CUT in the outer integral, interferer beating with itself inside"),
      term("XCI_2", "XCI", 16.0 / 81.0, "phi", "int", "nested", "int", "cut", "int", true,
           "companion overlap with the roles of inner and outer integrals exchanged"),
      term("SCI_1", "SCI", 80.0 / 81.0, "phi", "cut", "nested", "cut", "cut", "cut", true,
           "self-channel fourth-moment correction"),
      term("SCI_psi", "SCI", 16.0 / 81.0, "psi", "cut", "double", "cut", "cut", "cut", false,
           "self-channel sixth-moment correction"),
      term("MCI_1", "MCI", 80.0 / 81.0, "phi", "int_b", "nested", "int_a", "int_b", "int_b", true,
           "two distinct interferers, the second beating with itself"),
  };
  return c;
}

std::string egn_constants_json(const EgnConstants& c) {
  nlohmann::ordered_json j;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : c.terms) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["family"] = t.family;
    e["coefficient"] = t.coefficient;
    e["moment"] = t.moment;
    e["moment_of"] = t.moment_of;
    e["form"] = t.form;
    e["outer"] = t.outer;
    e["inner_f2"] = t.inner_f2;
    e["inner_f3"] = t.inner_f3;
    e["enabled"] = t.enabled;
    e["note"] = t.note;
    j["terms"].push_back(e);
  }
  return j.dump(2) + "\n";
}

EgnConstants load_egn_constants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open EGN constants file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("EGN constants file " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    throw ConfigError("EGN constants file " + path.string() + ": expected an object with a 'terms' array");
  for (const auto& [key, v] : j.items())
    if (key != "terms" && key != "comment") throw ConfigError("EGN constants file: unknown key '" + key + "'");
  EgnConstants c;
  for (const auto& e : j["terms"]) {
    if (!e.is_object()) throw ConfigError("EGN constants file: term entries must be objects");
    for (const auto& [key, v] : e.items())
      if (!allowed_keys().count(key)) throw ConfigError("EGN constants file: unknown term key '" + key + "'");
    EgnTerm t;
    try {
      t.name = e.at("name").get<std::string>();
      t.family = e.at("family").get<std::string>();
      t.coefficient = parse_coefficient(e.at("coefficient"), t.name);
      t.moment = e.value("moment", std::string("phi"));
      t.moment_of = e.at("moment_of").get<std::string>();
      t.form = e.value("form", std::string("nested"));
      t.outer = e.at("outer").get<std::string>();
      t.inner_f2 = e.at("inner_f2").get<std::string>();
      t.inner_f3 = e.at("inner_f3").get<std::string>();
      t.enabled = e.value("enabled", true);
      t.note = e.value("note", std::string());
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("EGN constants file: ") + ex.what());
    }
    c.terms.push_back(t);
  }
  return c;
}

}  // namespace nlin
