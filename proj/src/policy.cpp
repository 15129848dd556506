#include "vsol/policy.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace vsol::policy {

using nlohmann::json;

const FunctionSig* Workflow::find_function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

bool Workflow::has_state(const std::string& s) const {
  return std::find(states.begin(), states.end(), s) != states.end();
}

bool Workflow::has_instance_role(const std::string& v) const {
  for (const auto& r : instance_roles)
    if (r.var == v) return true;
  return false;
}

const Workflow* Policy::find_workflow(const std::string& n) const {
  for (const auto& w : workflows)
    if (w.name == n) return &w;
  return nullptr;
}

bool Policy::has_role(const std::string& r) const {
  return std::find(roles.begin(), roles.end(), r) != roles.end();
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& reason) {
  throw Error("SchemaError", path + ": " + reason);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) schema(path + "." + key, "missing required field");
  return *it;
}

std::string str_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) schema(path + "." + key, "expected string");
  std::string s = v.get<std::string>();
  if (s.empty()) schema(path + "." + key, "empty string");
  return s;
}

const json& arr_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) schema(path + "." + key, "expected array");
  return v;
}

std::vector<std::string> str_list(const json& obj, const char* key, const std::string& path) {
  const json& a = arr_field(obj, key, path);
  std::vector<std::string> out;
  for (size_t i = 0; i < a.size(); ++i) {
    std::string p = path + "." + key + "[" + std::to_string(i) + "]";
    if (!a[i].is_string()) schema(p, "expected string");
    out.push_back(a[i].get<std::string>());
  }
  return out;
}

void check_unique(const std::vector<std::string>& names, const std::string& kind) {
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw Error("DuplicateName", kind + " '" + n + "'");
}

std::vector<Param> params(const json& obj, const std::string& path) {
  const json& a = arr_field(obj, "Parameters", path);
  std::vector<Param> out;
  std::vector<std::string> names;
  for (size_t i = 0; i < a.size(); ++i) {
    std::string p = path + ".Parameters[" + std::to_string(i) + "]";
    out.push_back({str_field(a[i], "Name", p), str_field(a[i], "Type", p)});
    names.push_back(out.back().name);
  }
  check_unique(names, "parameter");
  return out;
}

Workflow parse_workflow(const json& j, const std::string& path, const std::vector<std::string>& roles) {
  Workflow w;
  w.name = str_field(j, "Name", path);
  w.initiator_roles = str_list(j, "Initiators", path);
  w.initial_state = str_field(j, "StartState", path);
  w.states = str_list(j, "States", path);
  check_unique(w.states, "state");

  const json& props = arr_field(j, "Properties", path);
  std::vector<std::string> pnames;
  for (size_t i = 0; i < props.size(); ++i) {
    std::string p = path + ".Properties[" + std::to_string(i) + "]";
    Property prop{str_field(props[i], "Name", p), str_field(props[i], "Type", p)};
    pnames.push_back(prop.name);
    if (std::find(roles.begin(), roles.end(), prop.type) != roles.end())
      w.instance_roles.push_back({prop.name, prop.type});
    w.properties.push_back(prop);
  }
  check_unique(pnames, "property");

  w.constructor.name = w.name;
  w.constructor.params = params(field(j, "Constructor", path), path + ".Constructor");

  const json& fns = arr_field(j, "Functions", path);
  std::vector<std::string> fnames;
  for (size_t i = 0; i < fns.size(); ++i) {
    std::string p = path + ".Functions[" + std::to_string(i) + "]";
    FunctionSig f{str_field(fns[i], "Name", p), params(fns[i], p)};
    fnames.push_back(f.name);
    w.functions.push_back(f);
  }
  check_unique(fnames, "function");

  const json& trs = arr_field(j, "Transitions", path);
  for (size_t i = 0; i < trs.size(); ++i) {
    std::string p = path + ".Transitions[" + std::to_string(i) + "]";
    Transition t;
    t.start = str_field(trs[i], "StartState", p);
    t.function = str_field(trs[i], "Function", p);
    t.access.global_roles = str_list(trs[i], "AllowedRoles", p);
    t.access.instance_roles = str_list(trs[i], "AllowedInstanceRoles", p);
    t.successors = str_list(trs[i], "NextStates", p);
    if (t.successors.empty()) schema(p + ".NextStates", "successor set must be non-empty");
    if (!w.has_state(t.start)) schema(p + ".StartState", "undeclared state '" + t.start + "'");
    for (const auto& s : t.successors)
      if (!w.has_state(s)) schema(p + ".NextStates", "undeclared state '" + s + "'");
    if (!w.find_function(t.function)) schema(p + ".Function", "undeclared function '" + t.function + "'");
    w.transitions.push_back(std::move(t));
  }
  return w;
}

json params_json(const std::vector<Param>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back({{"Name", p.name}, {"Type", p.type}});
  return a;
}

}  // namespace

Policy parse_policy(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    schema("$", std::string("malformed JSON: ") + e.what());
  }
  Policy p;
  p.application_name = str_field(j, "ApplicationName", "$");
  const json& roles = arr_field(j, "ApplicationRoles", "$");
  for (size_t i = 0; i < roles.size(); ++i)
    p.roles.push_back(str_field(roles[i], "Name", "$.ApplicationRoles[" + std::to_string(i) + "]"));
  check_unique(p.roles, "role");
  const json& wfs = arr_field(j, "Workflows", "$");
  std::vector<std::string> wnames;
  for (size_t i = 0; i < wfs.size(); ++i) {
    p.workflows.push_back(parse_workflow(wfs[i], "$.Workflows[" + std::to_string(i) + "]", p.roles));
    wnames.push_back(p.workflows.back().name);
  }
  check_unique(wnames, "workflow");
  return p;
}

std::string serialize_policy(const Policy& p) {
  json j;
  j["ApplicationName"] = p.application_name;
  j["ApplicationRoles"] = json::array();
  for (const auto& r : p.roles) j["ApplicationRoles"].push_back({{"Name", r}});
  j["Workflows"] = json::array();
  for (const auto& w : p.workflows) {
    json wj;
    wj["Name"] = w.name;
    wj["Initiators"] = w.initiator_roles;
    wj["StartState"] = w.initial_state;
    wj["States"] = w.states;
    wj["Properties"] = json::array();
    for (const auto& pr : w.properties) wj["Properties"].push_back({{"Name", pr.name}, {"Type", pr.type}});
    wj["Constructor"] = {{"Parameters", params_json(w.constructor.params)}};
    wj["Functions"] = json::array();
    for (const auto& f : w.functions)
      wj["Functions"].push_back({{"Name", f.name}, {"Parameters", params_json(f.params)}});
    wj["Transitions"] = json::array();
    for (const auto& t : w.transitions)
      wj["Transitions"].push_back({{"StartState", t.start},
                                   {"Function", t.function},
                                   {"AllowedRoles", t.access.global_roles},
                                   {"AllowedInstanceRoles", t.access.instance_roles},
                                   {"NextStates", t.successors}});
    j["Workflows"].push_back(wj);
  }
  return j.dump(2);
}

std::vector<Diagnostic> validate_policy(const Policy& p) {
  std::vector<Diagnostic> out;
  auto add = [&](std::string kind, std::string loc, std::string msg) {
    out.push_back({std::move(kind), std::move(loc), std::move(msg)});
  };
  std::set<std::string> seen;
  for (const auto& r : p.roles) {
    if (r.empty()) add("EmptyRoleName", "roles", "role name is empty");
    if (!seen.insert(r).second) add("DuplicateRole", "roles", r);
  }
  seen.clear();
  for (const auto& w : p.workflows) {
    if (!seen.insert(w.name).second) add("DuplicateWorkflow", "workflows", w.name);
    std::string wl = "workflow " + w.name;
    if (!w.has_state(w.initial_state)) add("InitialStateUnknown", wl, w.initial_state);
    for (const auto& ir : w.instance_roles)
      if (!p.has_role(ir.role)) add("UnknownRole", wl + " instance role " + ir.var, ir.role);
    for (const auto& r : w.initiator_roles)
      if (!p.has_role(r)) add("UnknownRole", wl + " initiators", r);
    std::set<std::string> fnames;
    for (const auto& f : w.functions) {
      if (!fnames.insert(f.name).second) add("DuplicateFunction", wl, f.name);
      std::set<std::string> pn;
      for (const auto& prm : f.params)
        if (!pn.insert(prm.name).second) add("DuplicateParameter", wl + " function " + f.name, prm.name);
    }
    for (size_t i = 0; i < w.transitions.size(); ++i) {
      const auto& t = w.transitions[i];
      std::string tl = wl + " transition " + std::to_string(i);
      if (!w.has_state(t.start)) add("UnknownState", tl, t.start);
      if (t.successors.empty()) add("EmptySuccessors", tl, "");
      for (const auto& s : t.successors)
        if (!w.has_state(s)) add("UnknownState", tl, s);
      if (!w.find_function(t.function)) add("UnknownFunction", tl, t.function);
      for (const auto& r : t.access.global_roles)
        if (!p.has_role(r)) add("UnknownAccessEntry", tl, r);
      for (const auto& r : t.access.instance_roles)
        if (!w.has_instance_role(r)) add("UnknownAccessEntry", tl, r);
    }
  }
  return out;
}

std::vector<Transition> transitions_for_function(const Workflow& w, const std::string& g) {
  if (!w.find_function(g)) throw Error("UnknownFunction", g);
  std::vector<Transition> out;
  for (const auto& t : w.transitions)
    if (t.function == g) out.push_back(t);
  return out;
}

}  // namespace vsol::policy
