#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vsol/error.hpp"

namespace vsol::vir {

struct Type;
using TypeP = std::shared_ptr<const Type>;

// Bool is kept as a distinct tag for printing and for the solver encoding;
// the interpreter stores it as an integer 0/1.
struct Type {
  enum Kind { Int, Bool, Ref, Map };
  Kind kind = Int;
  TypeP key, value;  // Map

  static TypeP integer();
  static TypeP boolean();
  static TypeP ref();
  static TypeP map(TypeP k, TypeP v);
  bool elementary() const { return kind != Map; }
};

bool type_equal(const TypeP& a, const TypeP& b);
std::string type_str(const TypeP& t);
// "int", "bool", "Ref": the tag used in per-type heap map names.
std::string type_tag(const TypeP& t);

struct Binder {
  std::string name;
  TypeP type;
};

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
  enum Kind { Const, Var, Op, UF, Select, Forall };
  Kind kind = Const;
  int64_t val = 0;            // Const (bools are 0/1, null is 0)
  std::string name;           // Var, Op operator, UF name, Select base variable
  std::vector<ExprP> args;    // Op operands, UF arguments, Select keys, Forall body
  std::vector<Binder> binders;
  // Const: its type. Otherwise filled by typecheck() (builders set it when
  // they can).
  TypeP type;
};

// Operators: + - * div mod neg == != < <= > >= && || ==> !
ExprP int_const(int64_t v);
ExprP bool_const(bool b);
ExprP null_const();
ExprP var(const std::string& n, TypeP t = nullptr);
ExprP op(const std::string& o, std::vector<ExprP> args);
ExprP op(const std::string& o, ExprP a);
ExprP op(const std::string& o, ExprP a, ExprP b);
ExprP uf(const std::string& n, std::vector<ExprP> args, TypeP t = nullptr);
ExprP select(const std::string& base, std::vector<ExprP> keys, TypeP t = nullptr);
ExprP forall(std::vector<Binder> bs, ExprP body);
ExprP conj(const std::vector<ExprP>& es);  // empty: true
ExprP disj(const std::vector<ExprP>& es);  // empty: false

struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;

struct Stmt {
  enum Kind { Skip, Havoc, Assign, Store, Assume, Assert, Call, Seq, If, While };
  Kind kind = Skip;
  int id = 0;                    // unique per program after number_stmts()
  std::string name;              // Havoc/Assign/Store target, Call procedure
  std::vector<ExprP> args;       // Store keys, Call arguments
  ExprP e;                       // Assign/Store value, Assume/Assert/If/While condition
  std::vector<std::string> results;  // Call
  std::vector<StmtP> body;       // Seq
  StmtP then_s, else_s;          // If; While body in then_s
  std::string label;             // Assert: source location
};

StmtP skip();
StmtP havoc(const std::string& x);
StmtP assign(const std::string& x, ExprP e);
StmtP store(const std::string& x, std::vector<ExprP> keys, ExprP v);
StmtP assume(ExprP e);
StmtP assert_(ExprP e, std::string label = "");
StmtP call(const std::string& proc, std::vector<ExprP> args, std::vector<std::string> results = {});
// Flattens nested sequences and drops skips; empty gives skip.
StmtP seq(std::vector<StmtP> ss);
StmtP if_(ExprP c, StmtP t, StmtP e = nullptr);
StmtP while_(ExprP c, StmtP body);

struct VarDecl {
  std::string name;
  TypeP type;
};

struct Procedure {
  std::string name;
  std::vector<VarDecl> params, returns, locals;
  StmtP body;
};

struct Function {
  std::string name;
  std::vector<VarDecl> params;
  TypeP ret;
};

struct Constant {
  std::string name;
  TypeP type;
  int64_t value = 0;
};

struct Program {
  std::vector<VarDecl> globals;
  std::vector<Function> functions;
  std::vector<Constant> consts;
  std::vector<ExprP> axioms;
  std::vector<Procedure> procedures;

  const Procedure* find_proc(const std::string& n) const;
  Procedure* find_proc(const std::string& n);
  const VarDecl* find_global(const std::string& n) const;
  const Constant* find_const(const std::string& n) const;
  const Function* find_function(const std::string& n) const;
  void add_global(const std::string& n, TypeP t);  // no-op if present
};

// Assigns fresh ids to every statement, in pre-order, across all procedures.
// Returns the rebuilt program (statements are immutable).
Program number_stmts(const Program& p);
StmtP number_stmts(const StmtP& s, int& next);

// ---------------------------------------------------------------------------
// Prelude

// Name of the heap map for values of type `value` stored under keys of type
// `key` in a Solidity map/array: M_int_Ref and so on.
std::string heap_map_name(const TypeP& key, const TypeP& value);

// Nesting of a Solidity map/array type after translation: one key type per
// level and the element type of the innermost level.
struct MapShape {
  std::vector<TypeP> keys;
  TypeP elem;
  std::string tag() const;  // e.g. int_int_int for int => int => int
};

// chi(v, i1..ij): the reference/value reached from v through j keys.
ExprP map_path(const ExprP& v, const MapShape& s, const std::vector<ExprP>& keys);

// Adds Alloc, Length, DType, StrToInt, New and NewUnbounded.
void emit_prelude(Program& p);
// Declares the heap maps a shape uses.
void declare_heap_maps(Program& p, const MapShape& s);
// The rounds of MapInit for v with the statically known shape: Length of
// every level-j reference is 0, they are unallocated, NewUnbounded, then
// allocated and pairwise distinct. `length_assume` emits assume Length[v]==0
// instead of the assignment (the inlined form).
std::vector<StmtP> map_init_stmts(const ExprP& v, const MapShape& s, bool length_assume);
// procedure MapInit_<tag>(v: Ref), added once.
std::string ensure_map_init(Program& p, const MapShape& s);
// assume forall i1..in :: chi(v, i1..in) == 0 (or null / false).
StmtP zero_init(const ExprP& v, const MapShape& s);

// ---------------------------------------------------------------------------
// Text form

std::string print_expr(const ExprP& e);
std::string print_stmt(const StmtP& s, int indent = 0);
std::string print_program(const Program& p);
// Throws Error("ParseError", "line:col: ...").
Program parse_program(const std::string& text);
// Resolves names, fills expression types, checks call arity and operand
// types. Throws Error("IrTypeError", ...).
Program typecheck(const Program& p);

bool expr_equal(const ExprP& a, const ExprP& b);
bool stmt_equal(const StmtP& a, const StmtP& b);
bool program_equal(const Program& a, const Program& b);

// ---------------------------------------------------------------------------
// Reference interpreter

struct MapVal;
using MapP = std::shared_ptr<MapVal>;

struct Val {
  int64_t i = 0;
  MapP m;  // set for map values
};

// A map value. Keys absent from `entries` read as the default. A flexible map
// leaves absent entries unconstrained: the first read fixes them (Ref
// entries become fresh references, nested maps become flexible maps), and
// assumptions may pin them first.
struct MapVal {
  TypeP type;
  std::map<int64_t, Val> entries;
  bool flexible = false;
  Val deflt;
};

struct IrState {
  std::map<std::string, Val> globals;
  int64_t next_fresh = int64_t(1) << 40;
  std::set<int64_t> known_refs;
};

struct CallEvent {
  int depth = 0;  // 1 for calls made directly by the entry procedure
  std::string proc;
  std::vector<int64_t> args;  // scalar arguments; maps as 0
  int stmt_id = 0;
  // Havoc values consumed while the call ran: consumed[tape_begin, tape_end).
  size_t tape_begin = 0, tape_end = 0;
};

struct RunOptions {
  std::vector<int64_t> tape;
  // Without a tape entry, scalar havocs take 0 / false / a fresh reference.
  bool allow_defaults = false;
  // Consulted before the tape: a value for a given havoc statement id.
  std::function<std::optional<int64_t>(int)> oracle;
  int64_t budget = 1000000;
  std::vector<int64_t> extra_ints;  // added to the quantifier domain
  // Entry procedure arguments (scalars); missing ones are havocked.
  std::vector<int64_t> args;
  std::optional<IrState> initial;
};

struct RunResult {
  enum Outcome { Completed, AssertFailed, Blocked, BudgetExhausted };
  Outcome outcome = Completed;
  std::string label;  // failing assert
  int stmt_id = 0;
  IrState state;
  std::vector<int64_t> returns;
  std::vector<int64_t> consumed;  // havoc values in execution order
  std::vector<CallEvent> calls;
};

// Throws TapeExhausted, UnsupportedQuantifier, IrRuntimeError.
RunResult interpret(const Program& p, const std::string& entry, const RunOptions& opt = {});

// Helpers over interpreter values.
Val read_path(IrState& st, const std::string& global, const std::vector<int64_t>& keys);

std::string to_string(RunResult::Outcome o);

}  // namespace vsol::vir
