#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vsol/error.hpp"
#include "vsol/policy.hpp"
#include "vsol/sol_ast.hpp"

namespace vsol::sol {

// Throws Error("ParseError", "line:col: expected ...") or
// Error("UnsupportedFeature", name).
Program parse_contract(const std::string& source);

// C3 linearization, most-derived first. Throws InheritanceCycle,
// AmbiguousLinearization, or TypeError for unknown bases.
void linearize(Program& p);

// Annotates every expression with its type and binding, lowers enums to
// integers with named constants. Runs linearize() when needed.
// Throws TypeError / DeepCopyUnsupported / UnsupportedFeature.
void typecheck(Program& p);

// Inlines applied modifiers: M1.pre; M2.pre; body; M2.post; M1.post.
// Throws UnknownModifier.
void desugar_modifiers(Program& p);

std::vector<Diagnostic> check_syntactic_conformance(const Program& p, const policy::Policy& pol);

std::string print_program(const Program& p);
std::string print_expr(const ExprP& e);
std::string print_stmt(const StmtP& s, int indent = 0);
std::string print_type(const TypeP& t);

// Structural equality ignoring source positions and type annotations.
bool alpha_equal(const Program& a, const Program& b);
bool expr_equal(const ExprP& a, const ExprP& b);
bool stmt_equal(const StmtP& a, const StmtP& b);

// Lookup helpers over a linearized program.
struct ResolvedFunction {
  std::string owner;
  const Function* fn = nullptr;
};
ResolvedFunction resolve_function(const Program& p, const std::string& contract, const std::string& fname);
const Modifier* resolve_modifier(const Program& p, const std::string& contract, const std::string& name);
struct StateVarRef {
  std::string owner;
  const VarDecl* decl = nullptr;
};
StateVarRef resolve_state_var(const Program& p, const std::string& contract, const std::string& name);
const EnumDef* resolve_enum(const Program& p, const std::string& contract, const std::string& name);
// The workflow state variable: the enum-typed state variable named State if
// there is one, else the last enum-typed one. decl is null when absent.
StateVarRef state_variable(const Program& p, const std::string& contract);
// Contracts D (in declaration order) whose linearization contains c.
std::vector<std::string> subtypes(const Program& p, const std::string& c);
// All state variables visible in c, base-most first, own last.
std::vector<StateVarRef> all_state_vars(const Program& p, const std::string& c);
// Public functions callable on c (linearization-resolved), in a stable order:
// own declaration order, then inherited ones in linearization order.
std::vector<ResolvedFunction> public_functions(const Program& p, const std::string& c);

}  // namespace vsol::sol
