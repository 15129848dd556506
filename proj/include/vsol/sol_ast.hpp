#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vsol::sol {

struct Loc {
  int line = 0;
  int col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct SolType;
using TypeP = std::shared_ptr<const SolType>;

// Arrays are kept distinct from mappings so the printer can reproduce the
// source, but everywhere else they behave as Mapping(integer, elem) + length.
struct SolType {
  enum Kind { Int, Bool, String, Address, Contract, Mapping, Array, Named };
  Kind kind = Int;
  std::string name;  // contract name, enum name (for Int), or unresolved name
  TypeP key;         // Mapping key
  TypeP value;       // Mapping value / Array element

  static TypeP integer(std::string enum_name = "");
  static TypeP boolean();
  static TypeP string_t();
  static TypeP address();
  static TypeP contract(std::string n);
  static TypeP mapping(TypeP k, TypeP v);
  static TypeP array(TypeP elem);
  static TypeP named(std::string n);

  bool is_elementary() const { return kind == Int || kind == String || kind == Address; }
  bool is_reference() const { return kind == Mapping || kind == Array; }
  bool is_enum() const { return kind == Int && !name.empty(); }
  // Key type used to index this mapping/array.
  TypeP index_type() const;
  TypeP elem_type() const { return value; }
};

bool same_type(const TypeP& a, const TypeP& b);
std::string type_str(const TypeP& t);

struct Expr;
using ExprP = std::shared_ptr<Expr>;

enum class Binding { None, Local, Param, State };

struct Expr {
  enum Kind {
    IntLit,
    BoolLit,
    StrLit,
    Null,       // address(0) / 0x0 in an address context
    Ident,
    Member,     // base.name (enum constants, msg.sender before resolution)
    Index,      // base[key]
    Unary,      // op in {"!", "-"}
    Binary,     // op in {"+","-","*","/","%","==","!=","<","<=",">",">=","&&","||","==>"}
    Call,       // name(args) or base.name(args)
    New,        // new C(args) | new T[](n) | new mapping(K=>V)()
    MsgSender,
    This,
    Length,     // base.length
    Nondet,     // nondet()
    EnumConst,  // lowered enum member; ival holds its ordinal
  };
  Kind kind = IntLit;
  Loc loc;
  int64_t ival = 0;
  std::string name;  // identifier, member, operator, callee, string literal text
  ExprP base;        // Member/Index/Length/Call receiver
  std::vector<ExprP> args;
  TypeP new_type;    // New: type being allocated
  bool hex = false;  // IntLit spelled in hex

  // Filled in by the typechecker.
  TypeP type;
  Binding binding = Binding::None;
  std::string owner;      // declaring contract for state vars
  std::string enum_name;  // EnumConst: enum type name

  static ExprP make(Kind k, Loc l = {});
};

struct Stmt;
using StmtP = std::shared_ptr<Stmt>;

struct Stmt {
  enum Kind {
    Block,
    VarDecl,      // type name [= rhs]
    Assign,       // lhs = rhs
    ExprStmt,     // call statement
    Require,
    Assert,
    If,
    While,
    Return,       // return [rhs]
    Placeholder,  // _; inside modifiers
    Push,         // lhs.push(rhs)
  };
  Kind kind = Block;
  Loc loc;
  ExprP lhs, rhs, cond;
  std::vector<StmtP> body;  // Block
  StmtP then_s, else_s;     // If (else may be null), While body in then_s
  TypeP decl_type;
  std::string name;         // VarDecl name
  std::string note;         // Assert: what a generated check stands for

  static StmtP make(Kind k, Loc l = {});
};

struct VarDecl {
  std::string name;
  TypeP type;
  Loc loc;
};

struct ModifierRef {
  std::string name;
  Loc loc;
};

struct Function {
  std::string name;
  std::vector<VarDecl> params;
  TypeP ret;  // nullable
  StmtP body;
  std::vector<ModifierRef> modifiers;
  bool is_public = true;
  bool is_ctor = false;
  bool implicit = false;
  Loc loc;
};

struct Modifier {
  std::string name;
  StmtP body;  // contains exactly one Placeholder
  Loc loc;
};

struct EnumDef {
  std::string name;
  std::vector<std::string> members;
  Loc loc;
};

struct Contract {
  std::string name;
  std::vector<std::string> bases;
  std::vector<EnumDef> enums;
  std::vector<VarDecl> state_vars;
  Function ctor;
  std::vector<Function> functions;
  std::vector<Modifier> modifiers;
  Loc loc;

  const Function* find_function(const std::string& n) const;
  const VarDecl* find_state_var(const std::string& n) const;
  const EnumDef* find_enum(const std::string& n) const;
};

struct Program {
  std::vector<Contract> contracts;
  // Filled by linearize(): most-derived first.
  std::map<std::string, std::vector<std::string>> linearization;

  const Contract* find(const std::string& n) const;
  Contract* find(const std::string& n);
};

// Deep copies so rewrites never alias the input program.
ExprP clone(const ExprP& e);
StmtP clone(const StmtP& s);
Program clone(const Program& p);

}  // namespace vsol::sol
