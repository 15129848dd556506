#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vsol/sol.hpp"
#include "vsol/vir.hpp"

namespace vsol::trans {

// int, string, enums -> int; bool -> bool; address, contracts, mappings and
// arrays -> Ref.
vir::TypeP map_type(const sol::TypeP& t);
// Key types of every nesting level of a mapping/array type and the element
// type of the innermost one.
vir::MapShape shape_of(const sol::TypeP& t);

std::string proc_name(const std::string& contract, const std::string& fn);
std::string ctor_name(const std::string& contract);
std::string own_ctor_name(const std::string& contract);
std::string state_map(const std::string& var, const std::string& owner);

struct Translation {
  vir::Program program;
  std::map<std::string, int64_t> strings;       // interned string literals ("" is 0)
  std::map<std::string, int64_t> contract_ids;  // value of DType for each contract
  // Renaming of source locals/parameters, per procedure.
  std::map<std::string, std::map<std::string, std::string>> renames;
  // Set by generate_harness: procedures main calls, to their source
  // function name ("constructor" for the constructor).
  std::map<std::string, std::string> entry_points;
};

class Translator {
 public:
  // `typed` must be typechecked; modifiers are expanded on a private copy.
  explicit Translator(const sol::Program& typed);
  ~Translator();

  // Single constructs, translated as if inside a function of `contract`.
  // Hoisted statements (calls, allocations, nondet havocs, division guards)
  // are appended to `pre`.
  vir::ExprP expr(const std::string& contract, const sol::ExprP& e, std::vector<vir::StmtP>& pre);
  vir::StmtP stmt(const std::string& contract, const sol::StmtP& s);

  // The whole program: prelude, state maps, heap maps, one procedure per
  // declared function and per constructor.
  Translation program();

  const sol::Program& source() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws NoCandidateImplementation when a call has no target.
Translation translate_program(const sol::Program& typed);

// Adds `procedure main()`: allocate the receiver, construct it with havocked
// arguments, then loop forever over a nondeterministic choice of public
// functions with havocked arguments and sender.
void generate_harness(Translation& t, const sol::Program& typed, const std::string& root);

// Public functions of root in harness branch order.
std::vector<sol::ResolvedFunction> harness_functions(const sol::Program& typed, const std::string& root);

}  // namespace vsol::trans
