#include "vsol/sol_ast.hpp"

namespace vsol::sol {

namespace {
TypeP mk(SolType::Kind k, std::string name = "", TypeP key = nullptr, TypeP value = nullptr) {
  auto t = std::make_shared<SolType>();
  t->kind = k;
  t->name = std::move(name);
  t->key = std::move(key);
  t->value = std::move(value);
  return t;
}
}  // namespace

TypeP SolType::integer(std::string enum_name) { return mk(Int, std::move(enum_name)); }
TypeP SolType::boolean() { return mk(Bool); }
TypeP SolType::string_t() { return mk(String); }
TypeP SolType::address() { return mk(Address); }
TypeP SolType::contract(std::string n) { return mk(Contract, std::move(n)); }
TypeP SolType::mapping(TypeP k, TypeP v) { return mk(Mapping, "", std::move(k), std::move(v)); }
TypeP SolType::array(TypeP elem) { return mk(Array, "", nullptr, std::move(elem)); }
TypeP SolType::named(std::string n) { return mk(Named, std::move(n)); }

TypeP SolType::index_type() const {
  if (kind == Array) return integer();
  return key;
}

bool same_type(const TypeP& a, const TypeP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SolType::Int:
    case SolType::Contract:
    case SolType::Named:
      return a->name == b->name;
    case SolType::Mapping:
      return same_type(a->key, b->key) && same_type(a->value, b->value);
    case SolType::Array:
      return same_type(a->value, b->value);
    default:
      return true;
  }
}

std::string type_str(const TypeP& t) {
  if (!t) return "void";
  switch (t->kind) {
    case SolType::Int: return t->name.empty() ? "int" : t->name;
    case SolType::Bool: return "bool";
    case SolType::String: return "string";
    case SolType::Address: return "address";
    case SolType::Contract: return t->name;
    case SolType::Named: return t->name;
    case SolType::Mapping: return "mapping(" + type_str(t->key) + " => " + type_str(t->value) + ")";
    case SolType::Array: return type_str(t->value) + "[]";
  }
  return "?";
}

ExprP Expr::make(Kind k, Loc l) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->loc = l;
  return e;
}

StmtP Stmt::make(Kind k, Loc l) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->loc = l;
  return s;
}

const Function* Contract::find_function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

const VarDecl* Contract::find_state_var(const std::string& n) const {
  for (const auto& v : state_vars)
    if (v.name == n) return &v;
  return nullptr;
}

const EnumDef* Contract::find_enum(const std::string& n) const {
  for (const auto& e : enums)
    if (e.name == n) return &e;
  return nullptr;
}

const Contract* Program::find(const std::string& n) const {
  for (const auto& c : contracts)
    if (c.name == n) return &c;
  return nullptr;
}

Contract* Program::find(const std::string& n) {
  for (auto& c : contracts)
    if (c.name == n) return &c;
  return nullptr;
}

ExprP clone(const ExprP& e) {
  if (!e) return nullptr;
  auto c = std::make_shared<Expr>(*e);
  c->base = clone(e->base);
  for (auto& a : c->args) a = clone(a);
  return c;
}

StmtP clone(const StmtP& s) {
  if (!s) return nullptr;
  auto c = std::make_shared<Stmt>(*s);
  c->lhs = clone(s->lhs);
  c->rhs = clone(s->rhs);
  c->cond = clone(s->cond);
  for (auto& b : c->body) b = clone(b);
  c->then_s = clone(s->then_s);
  c->else_s = clone(s->else_s);
  return c;
}

namespace {
Function clone_fn(const Function& f) {
  Function g = f;
  g.body = clone(f.body);
  return g;
}
}  // namespace

Program clone(const Program& p) {
  Program q = p;
  for (auto& c : q.contracts) {
    c.ctor = clone_fn(c.ctor);
    for (auto& f : c.functions) f = clone_fn(f);
    for (auto& m : c.modifiers) m.body = clone(m.body);
  }
  return q;
}

}  // namespace vsol::sol
