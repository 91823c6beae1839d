#include "sockkt/problem_file.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sockkt/error.hpp"

namespace sockkt {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

std::string string_at(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> strings_at(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(string_at(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Vec vector_at(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim)
    bad(where, "expected an array of " + std::to_string(dim) + " numbers");
  Vec v;
  for (std::size_t k = 0; k < dim; ++k) {
    if (!j[k].is_number()) bad(where + "[" + std::to_string(k) + "]", "expected a number");
    double x = j[k].get<double>();
    if (!std::isfinite(x)) bad(where + "[" + std::to_string(k) + "]", "not finite");
    v.push_back(x);
  }
  return v;
}

bool identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

void read_tolerances(const json& j, Tolerances& t) {
  if (!j.is_object()) bad("tolerances", "expected an object");
  const std::pair<const char*, double*> fields[] = {
      {"active_tol", &t.active_tol}, {"feas_tol", &t.feas_tol},       {"crit_tol", &t.crit_tol},
      {"b_tol", &t.b_tol},           {"cert_tol", &t.cert_tol},       {"cert_margin", &t.cert_margin},
      {"lp_tol", &t.lp_tol}};
  for (auto it = j.begin(); it != j.end(); ++it) {
    double* slot = nullptr;
    for (const auto& [name, ptr] : fields)
      if (it.key() == name) slot = ptr;
    const std::string where = "tolerances." + it.key();
    if (!slot) bad(where, "unknown tolerance");
    if (!it->is_number()) bad(where, "expected a number");
    double v = it->get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) bad(where, "must be positive and finite");
    *slot = v;
  }
}

}  // namespace

ProblemFile parse_problem_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("document", "expected an object");

  static const std::set<std::string> required = {"name", "variables", "objectives", "constraints",
                                                 "points"};
  static const std::set<std::string> optional = {"directions", "tolerances"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!required.count(it.key()) && !optional.count(it.key())) bad(it.key(), "unknown key");
  for (const auto& k : required)
    if (!doc.contains(k)) bad(k, "missing");

  std::string name = string_at(doc["name"], "name");
  std::vector<std::string> vars = strings_at(doc["variables"], "variables");
  if (vars.empty()) bad("variables", "at least one variable is required");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const std::string where = "variables[" + std::to_string(k) + "]";
    if (!identifier(vars[k])) bad(where, "not an identifier: \"" + vars[k] + "\"");
    if (!seen.insert(vars[k]).second) bad(where, "duplicate variable \"" + vars[k] + "\"");
  }
  std::vector<std::string> objectives = strings_at(doc["objectives"], "objectives");
  if (objectives.empty()) bad("objectives", "at least one objective is required");
  std::vector<std::string> constraints = strings_at(doc["constraints"], "constraints");

  ProblemFile pf;
  // Parse errors are re-thrown with the key they came from.
  auto check_expressions = [&](const std::vector<std::string>& texts, const char* key) {
    for (std::size_t k = 0; k < texts.size(); ++k) {
      try {
        parse(texts[k], vars);
      } catch (const ParseError& e) {
        throw InputError(std::string(key) + "[" + std::to_string(k) + "]: " + e.what());
      }
    }
  };
  check_expressions(objectives, "objectives");
  check_expressions(constraints, "constraints");
  pf.problem = std::make_shared<const Problem>(name, vars, objectives, constraints);

  const json& pts = doc["points"];
  if (!pts.is_array() || pts.empty()) bad("points", "expected a non-empty array of points");
  for (std::size_t k = 0; k < pts.size(); ++k)
    pf.points.push_back(vector_at(pts[k], vars.size(), "points[" + std::to_string(k) + "]"));

  pf.directions.assign(pf.points.size(), {});
  if (doc.contains("directions")) {
    const json& ds = doc["directions"];
    if (!ds.is_array() || ds.size() != pf.points.size())
      bad("directions", "expected one array of directions per point");
    for (std::size_t k = 0; k < ds.size(); ++k) {
      const std::string where = "directions[" + std::to_string(k) + "]";
      if (!ds[k].is_array()) bad(where, "expected an array of directions");
      for (std::size_t r = 0; r < ds[k].size(); ++r)
        pf.directions[k].push_back(
            vector_at(ds[k][r], vars.size(), where + "[" + std::to_string(r) + "]"));
    }
  }
  if (doc.contains("tolerances")) read_tolerances(doc["tolerances"], pf.tolerances);
  return pf;
}

ProblemFile load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_problem_file(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace sockkt
