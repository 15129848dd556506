#pragma once

#include <string>
#include <vector>

#include "vsol/error.hpp"
#include "vsol/policy.hpp"
#include "vsol/sol_ast.hpp"

namespace vsol::instr {

// P(ac): nondet() for each global role, msg.sender == q for each instance
// role q; globals first, each group sorted by name. Empty set gives false.
// Throws UnknownAccessEntry.
sol::ExprP access_predicate(const policy::AccessSet& ac, const policy::Workflow& w);

// alpha(S): State == E.s per state, sorted. Empty set gives false.
// Throws UnknownState. `state_var` and `enum_name` name s_w and its type.
sol::ExprP state_predicate(const std::vector<std::string>& states, const policy::Workflow& w,
                           const std::string& state_var = "State", const std::string& enum_name = "StateType");

struct Instrumented {
  sol::Program program;  // typechecked, modifiers not yet desugared
  // Functions of a workflow that appear in no transition. They are left as is.
  std::vector<Diagnostic> notes;
};

// Adds constructor_checker and <g>_checker modifiers to each workflow
// contract and attaches them as the outermost modifier.
// Throws NotSyntacticallyConformant.
Instrumented instrument_for_conformance(const sol::Program& p, const policy::Policy& pol);

// Negation normal form of a boolean expression. Negated comparisons flip
// (== / !=, < / >=, ...); other atoms keep a leading !.
sol::ExprP to_nnf(const sol::ExprP& e);

// Runtime variant: every require/assert condition goes to NNF, each nondet
// literal (nondet() or !nondet()) becomes true, and the result is folded.
sol::Program make_runtime_checks(const sol::Program& p);

// Number of nondet() calls anywhere in the program.
size_t count_nondet(const sol::Program& p);

}  // namespace vsol::instr
