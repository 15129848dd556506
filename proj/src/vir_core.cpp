#include <algorithm>

#include "vsol/vir.hpp"

namespace vsol::vir {

TypeP Type::integer() {
  static const TypeP t = std::make_shared<Type>(Type{Int, nullptr, nullptr});
  return t;
}
TypeP Type::boolean() {
  static const TypeP t = std::make_shared<Type>(Type{Bool, nullptr, nullptr});
  return t;
}
TypeP Type::ref() {
  static const TypeP t = std::make_shared<Type>(Type{Ref, nullptr, nullptr});
  return t;
}
TypeP Type::map(TypeP k, TypeP v) { return std::make_shared<Type>(Type{Map, std::move(k), std::move(v)}); }

bool type_equal(const TypeP& a, const TypeP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  if (a->kind != Type::Map) return true;
  return type_equal(a->key, b->key) && type_equal(a->value, b->value);
}

std::string type_str(const TypeP& t) {
  if (!t) return "?";
  switch (t->kind) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::Ref: return "Ref";
    case Type::Map: return "[" + type_str(t->key) + "]" + type_str(t->value);
  }
  return "?";
}

std::string type_tag(const TypeP& t) { return t->kind == Type::Map ? "Ref" : type_str(t); }

// ---------------------------------------------------------------------------
// Builders

namespace {
std::shared_ptr<Expr> mk(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}
std::shared_ptr<Stmt> mks(Stmt::Kind k) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  return s;
}
}  // namespace

ExprP int_const(int64_t v) {
  auto e = mk(Expr::Const);
  e->val = v;
  e->type = Type::integer();
  return e;
}

ExprP bool_const(bool b) {
  auto e = mk(Expr::Const);
  e->val = b;
  e->type = Type::boolean();
  return e;
}

ExprP null_const() {
  auto e = mk(Expr::Const);
  e->type = Type::ref();
  return e;
}

ExprP var(const std::string& n, TypeP t) {
  auto e = mk(Expr::Var);
  e->name = n;
  e->type = std::move(t);
  return e;
}

ExprP op(const std::string& o, std::vector<ExprP> args) {
  if (o == "neg" && args.size() == 1 && args[0]->kind == Expr::Const && args[0]->type->kind == Type::Int)
    return int_const(-args[0]->val);
  auto e = mk(Expr::Op);
  e->name = o;
  e->args = std::move(args);
  static const std::set<std::string> boolean = {"==", "!=", "<", "<=", ">", ">=", "&&", "||", "==>", "!"};
  if (boolean.count(o))
    e->type = Type::boolean();
  else if (o != "neg" || !e->args.empty())
    e->type = Type::integer();
  return e;
}
ExprP op(const std::string& o, ExprP a) { return op(o, std::vector<ExprP>{std::move(a)}); }
ExprP op(const std::string& o, ExprP a, ExprP b) { return op(o, std::vector<ExprP>{std::move(a), std::move(b)}); }

ExprP uf(const std::string& n, std::vector<ExprP> args, TypeP t) {
  auto e = mk(Expr::UF);
  e->name = n;
  e->args = std::move(args);
  e->type = std::move(t);
  return e;
}

ExprP select(const std::string& base, std::vector<ExprP> keys, TypeP t) {
  auto e = mk(Expr::Select);
  e->name = base;
  e->args = std::move(keys);
  e->type = std::move(t);
  return e;
}

ExprP forall(std::vector<Binder> bs, ExprP body) {
  auto e = mk(Expr::Forall);
  e->binders = std::move(bs);
  e->args = {std::move(body)};
  e->type = Type::boolean();
  return e;
}

ExprP conj(const std::vector<ExprP>& es) {
  if (es.empty()) return bool_const(true);
  ExprP out = es[0];
  for (size_t i = 1; i < es.size(); ++i) out = op("&&", out, es[i]);
  return out;
}

ExprP disj(const std::vector<ExprP>& es) {
  if (es.empty()) return bool_const(false);
  ExprP out = es[0];
  for (size_t i = 1; i < es.size(); ++i) out = op("||", out, es[i]);
  return out;
}

StmtP skip() { return mks(Stmt::Skip); }

StmtP havoc(const std::string& x) {
  auto s = mks(Stmt::Havoc);
  s->name = x;
  return s;
}

StmtP assign(const std::string& x, ExprP e) {
  auto s = mks(Stmt::Assign);
  s->name = x;
  s->e = std::move(e);
  return s;
}

StmtP store(const std::string& x, std::vector<ExprP> keys, ExprP v) {
  auto s = mks(Stmt::Store);
  s->name = x;
  s->args = std::move(keys);
  s->e = std::move(v);
  return s;
}

StmtP assume(ExprP e) {
  auto s = mks(Stmt::Assume);
  s->e = std::move(e);
  return s;
}

StmtP assert_(ExprP e, std::string label) {
  auto s = mks(Stmt::Assert);
  s->e = std::move(e);
  s->label = std::move(label);
  return s;
}

StmtP call(const std::string& proc, std::vector<ExprP> args, std::vector<std::string> results) {
  auto s = mks(Stmt::Call);
  s->name = proc;
  s->args = std::move(args);
  s->results = std::move(results);
  return s;
}

StmtP seq(std::vector<StmtP> ss) {
  std::vector<StmtP> flat;
  for (auto& s : ss) {
    if (!s || s->kind == Stmt::Skip) continue;
    if (s->kind == Stmt::Seq)
      flat.insert(flat.end(), s->body.begin(), s->body.end());
    else
      flat.push_back(s);
  }
  if (flat.empty()) return skip();
  if (flat.size() == 1) return flat[0];
  auto s = mks(Stmt::Seq);
  s->body = std::move(flat);
  return s;
}

StmtP if_(ExprP c, StmtP t, StmtP e) {
  auto s = mks(Stmt::If);
  s->e = std::move(c);
  s->then_s = t ? t : skip();
  s->else_s = e ? e : skip();
  return s;
}

StmtP while_(ExprP c, StmtP body) {
  auto s = mks(Stmt::While);
  s->e = std::move(c);
  s->then_s = body ? body : skip();
  return s;
}

// ---------------------------------------------------------------------------
// Program

const Procedure* Program::find_proc(const std::string& n) const {
  for (const auto& p : procedures)
    if (p.name == n) return &p;
  return nullptr;
}
Procedure* Program::find_proc(const std::string& n) {
  for (auto& p : procedures)
    if (p.name == n) return &p;
  return nullptr;
}
const VarDecl* Program::find_global(const std::string& n) const {
  for (const auto& g : globals)
    if (g.name == n) return &g;
  return nullptr;
}
const Constant* Program::find_const(const std::string& n) const {
  for (const auto& c : consts)
    if (c.name == n) return &c;
  return nullptr;
}
const Function* Program::find_function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}
void Program::add_global(const std::string& n, TypeP t) {
  if (!find_global(n)) globals.push_back({n, std::move(t)});
}

StmtP number_stmts(const StmtP& s, int& next) {
  auto c = std::make_shared<Stmt>(*s);
  c->id = next++;
  for (auto& b : c->body) b = number_stmts(b, next);
  if (c->then_s) c->then_s = number_stmts(c->then_s, next);
  if (c->else_s) c->else_s = number_stmts(c->else_s, next);
  return c;
}

Program number_stmts(const Program& p) {
  Program out = p;
  int next = 1;
  for (auto& proc : out.procedures) proc.body = number_stmts(proc.body, next);
  return out;
}

// ---------------------------------------------------------------------------
// Prelude

std::string heap_map_name(const TypeP& key, const TypeP& value) { return "M_" + type_tag(key) + "_" + type_tag(value); }

std::string MapShape::tag() const {
  std::string out;
  for (const auto& k : keys) out += type_tag(k) + "_";
  return out + type_tag(elem);
}

namespace {

TypeP level_value(const MapShape& s, size_t level) { return level + 1 < s.keys.size() ? Type::ref() : s.elem; }

const char* kBinderNames[] = {"i", "j", "k", "l", "m", "n", "o", "p"};

std::vector<Binder> binders(const MapShape& s, size_t n) {
  std::vector<Binder> out;
  for (size_t j = 0; j < n; ++j) out.push_back({kBinderNames[j], s.keys[j]});
  return out;
}

std::vector<ExprP> binder_vars(const std::vector<Binder>& bs) {
  std::vector<ExprP> out;
  for (const auto& b : bs) out.push_back(var(b.name, b.type));
  return out;
}

ExprP zero_of(const TypeP& t) {
  if (t->kind == Type::Ref) return null_const();
  if (t->kind == Type::Bool) return bool_const(false);
  return int_const(0);
}

}  // namespace

ExprP map_path(const ExprP& v, const MapShape& s, const std::vector<ExprP>& keys) {
  ExprP cur = v;
  for (size_t j = 0; j < keys.size(); ++j) {
    TypeP val = level_value(s, j);
    cur = select(heap_map_name(s.keys[j], val), {cur, keys[j]}, val);
  }
  return cur;
}

void declare_heap_maps(Program& p, const MapShape& s) {
  for (size_t j = 0; j < s.keys.size(); ++j) {
    TypeP val = level_value(s, j);
    p.add_global(heap_map_name(s.keys[j], val), Type::map(Type::ref(), Type::map(s.keys[j], val)));
  }
}

void emit_prelude(Program& p) {
  p.add_global("Alloc", Type::map(Type::ref(), Type::boolean()));
  p.add_global("DType", Type::map(Type::ref(), Type::integer()));
  p.add_global("Length", Type::map(Type::ref(), Type::integer()));
  if (!p.find_function("StrToInt")) p.functions.push_back({"StrToInt", {{"x", Type::integer()}}, Type::integer()});
  if (!p.find_proc("New")) {
    Procedure n;
    n.name = "New";
    n.returns = {{"ret", Type::ref()}};
    ExprP ret = var("ret", Type::ref());
    n.body = seq({havoc("ret"), assume(op("!", select("Alloc", {ret}, Type::boolean()))),
                  store("Alloc", {ret}, bool_const(true))});
    p.procedures.push_back(n);
  }
  if (!p.find_proc("NewUnbounded")) {
    Procedure n;
    n.name = "NewUnbounded";
    TypeP at = Type::map(Type::ref(), Type::boolean());
    n.locals = {{"oldAlloc", at}};
    ExprP i = var("i", Type::ref());
    n.body = seq({assign("oldAlloc", var("Alloc", at)), havoc("Alloc"),
                  assume(forall({{"i", Type::ref()}}, op("==>", select("oldAlloc", {i}, Type::boolean()),
                                                        select("Alloc", {i}, Type::boolean()))))});
    p.procedures.push_back(n);
  }
}

std::vector<StmtP> map_init_stmts(const ExprP& v, const MapShape& s, bool length_assume) {
  std::vector<StmtP> out;
  ExprP len_v = select("Length", {v}, Type::integer());
  out.push_back(length_assume ? assume(op("==", len_v, int_const(0))) : store("Length", {v}, int_const(0)));
  for (size_t j = 1; j < s.keys.size(); ++j) {
    auto bs = binders(s, j);
    ExprP chi = map_path(v, s, binder_vars(bs));
    out.push_back(assume(forall(bs, op("==", select("Length", {chi}, Type::integer()), int_const(0)))));
    out.push_back(assume(forall(bs, op("!", select("Alloc", {chi}, Type::boolean())))));
    out.push_back(call("NewUnbounded", {}));
    out.push_back(assume(forall(bs, select("Alloc", {chi}, Type::boolean()))));
    auto bs2 = bs;
    bs2.push_back({kBinderNames[j], s.keys[j - 1]});
    auto keys2 = binder_vars(bs);
    keys2.back() = var(kBinderNames[j], s.keys[j - 1]);
    ExprP chi2 = map_path(v, s, keys2);
    out.push_back(assume(forall(bs2, op("||", op("==", var(bs[j - 1].name, bs[j - 1].type), keys2.back()),
                                        op("!=", chi, chi2)))));
  }
  return out;
}

std::string ensure_map_init(Program& p, const MapShape& s) {
  std::string name = "MapInit_" + s.tag();
  if (p.find_proc(name)) return name;
  declare_heap_maps(p, s);
  Procedure proc;
  proc.name = name;
  proc.params = {{"v", Type::ref()}};
  proc.body = seq(map_init_stmts(var("v", Type::ref()), s, false));
  p.procedures.push_back(proc);
  return name;
}

StmtP zero_init(const ExprP& v, const MapShape& s) {
  auto bs = binders(s, s.keys.size());
  return assume(forall(bs, op("==", map_path(v, s, binder_vars(bs)), zero_of(s.elem))));
}

// ---------------------------------------------------------------------------
// Structural equality

bool expr_equal(const ExprP& a, const ExprP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size() ||
      a->binders.size() != b->binders.size())
    return false;
  if (a->kind == Expr::Const && (a->val != b->val || !type_equal(a->type, b->type))) return false;
  for (size_t i = 0; i < a->binders.size(); ++i)
    if (a->binders[i].name != b->binders[i].name || !type_equal(a->binders[i].type, b->binders[i].type)) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

bool stmt_equal(const StmtP& a, const StmtP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->label != b->label || a->results != b->results ||
      a->args.size() != b->args.size() || a->body.size() != b->body.size())
    return false;
  if (!expr_equal(a->e, b->e)) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  for (size_t i = 0; i < a->body.size(); ++i)
    if (!stmt_equal(a->body[i], b->body[i])) return false;
  return stmt_equal(a->then_s, b->then_s) && stmt_equal(a->else_s, b->else_s);
}

namespace {
bool decls_equal(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !type_equal(a[i].type, b[i].type)) return false;
  return true;
}
template <class T, class K>
std::vector<const T*> sorted(const std::vector<T>& v, K key) {
  std::vector<const T*> out;
  for (const auto& x : v) out.push_back(&x);
  std::sort(out.begin(), out.end(), [&](const T* a, const T* b) { return key(*a) < key(*b); });
  return out;
}
}  // namespace

bool program_equal(const Program& a, const Program& b) {
  auto name = [](const auto& x) { return x.name; };
  auto ga = sorted(a.globals, name), gb = sorted(b.globals, name);
  if (ga.size() != gb.size()) return false;
  for (size_t i = 0; i < ga.size(); ++i)
    if (ga[i]->name != gb[i]->name || !type_equal(ga[i]->type, gb[i]->type)) return false;
  auto fa = sorted(a.functions, name), fb = sorted(b.functions, name);
  if (fa.size() != fb.size()) return false;
  for (size_t i = 0; i < fa.size(); ++i)
    if (fa[i]->name != fb[i]->name || !decls_equal(fa[i]->params, fb[i]->params) || !type_equal(fa[i]->ret, fb[i]->ret))
      return false;
  auto ca = sorted(a.consts, name), cb = sorted(b.consts, name);
  if (ca.size() != cb.size()) return false;
  for (size_t i = 0; i < ca.size(); ++i)
    if (ca[i]->name != cb[i]->name || ca[i]->value != cb[i]->value || !type_equal(ca[i]->type, cb[i]->type))
      return false;
  if (a.axioms.size() != b.axioms.size()) return false;
  for (size_t i = 0; i < a.axioms.size(); ++i)
    if (!expr_equal(a.axioms[i], b.axioms[i])) return false;
  auto pa = sorted(a.procedures, name), pb = sorted(b.procedures, name);
  if (pa.size() != pb.size()) return false;
  for (size_t i = 0; i < pa.size(); ++i)
    if (pa[i]->name != pb[i]->name || !decls_equal(pa[i]->params, pb[i]->params) ||
        !decls_equal(pa[i]->returns, pb[i]->returns) || !decls_equal(pa[i]->locals, pb[i]->locals) ||
        !stmt_equal(pa[i]->body, pb[i]->body))
      return false;
  return true;
}

std::string to_string(RunResult::Outcome o) {
  switch (o) {
    case RunResult::Completed: return "Completed";
    case RunResult::AssertFailed: return "AssertFailed";
    case RunResult::Blocked: return "Blocked";
    case RunResult::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

}  // namespace vsol::vir
