#pragma once

#include <string>
#include <vector>

#include "vsol/error.hpp"

namespace vsol::policy {

struct Param {
  std::string name;
  std::string type;
  bool operator==(const Param&) const = default;
};

struct FunctionSig {
  std::string name;
  std::vector<Param> params;
  bool operator==(const FunctionSig&) const = default;
};

// Access control of a transition: global roles are checked off-chain
// (modelled by nondet), instance roles name address-valued properties.
struct AccessSet {
  std::vector<std::string> global_roles;
  std::vector<std::string> instance_roles;
  bool empty() const { return global_roles.empty() && instance_roles.empty(); }
  bool operator==(const AccessSet&) const = default;
};

struct Transition {
  std::string start;
  std::string function;
  AccessSet access;
  std::vector<std::string> successors;
  bool operator==(const Transition&) const = default;
};

struct Property {
  std::string name;
  std::string type;  // "int" | "string" | "address" | role name
  bool operator==(const Property&) const = default;
};

struct InstanceRole {
  std::string var;
  std::string role;
  bool operator==(const InstanceRole&) const = default;
};

struct Workflow {
  std::string name;
  std::vector<std::string> states;
  std::string initial_state;
  std::vector<Property> properties;
  std::vector<InstanceRole> instance_roles;  // derived from properties typed by a role
  std::vector<FunctionSig> functions;
  FunctionSig constructor;
  std::vector<std::string> initiator_roles;
  std::vector<Transition> transitions;

  const FunctionSig* find_function(const std::string& name) const;
  bool has_state(const std::string& s) const;
  bool has_instance_role(const std::string& v) const;
  bool operator==(const Workflow&) const = default;
};

struct Policy {
  std::string application_name;
  std::vector<std::string> roles;
  std::vector<Workflow> workflows;

  const Workflow* find_workflow(const std::string& name) const;
  bool has_role(const std::string& r) const;
  bool operator==(const Policy&) const = default;
};

// Throws Error("SchemaError", path + reason) or Error("DuplicateName", ...).
Policy parse_policy(const std::string& text);
std::string serialize_policy(const Policy& p);
std::vector<Diagnostic> validate_policy(const Policy& p);
// Throws Error("UnknownFunction", g) when g is not a function of w.
std::vector<Transition> transitions_for_function(const Workflow& w, const std::string& g);

}  // namespace vsol::policy
