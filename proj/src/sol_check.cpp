#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "vsol/sol.hpp"

namespace vsol::sol {

// ---------------------------------------------------------------------------
// Linearization and lookup

namespace {

[[noreturn]] void type_error(const Loc& l, const std::string& msg) {
  throw Error("TypeError", l.str() + ": " + msg);
}

std::vector<std::string> c3(const Program& p, const std::string& name, std::map<std::string, std::vector<std::string>>& memo,
                            std::set<std::string>& active) {
  if (auto it = memo.find(name); it != memo.end()) return it->second;
  if (active.count(name)) throw Error("InheritanceCycle", name);
  const Contract* c = p.find(name);
  if (!c) throw Error("TypeError", "unknown contract '" + name + "'");
  active.insert(name);
  std::vector<std::vector<std::string>> seqs;
  for (const auto& b : c->bases) {
    if (!p.find(b)) throw Error("TypeError", c->loc.str() + ": unknown base contract '" + b + "'");
    seqs.push_back(c3(p, b, memo, active));
  }
  seqs.push_back(c->bases);
  std::vector<std::string> out{name};
  for (;;) {
    seqs.erase(std::remove_if(seqs.begin(), seqs.end(), [](const auto& s) { return s.empty(); }), seqs.end());
    if (seqs.empty()) break;
    std::string pick;
    for (const auto& s : seqs) {
      const std::string& head = s.front();
      bool in_tail = false;
      for (const auto& t : seqs)
        if (std::find(t.begin() + 1, t.end(), head) != t.end()) in_tail = true;
      if (!in_tail) {
        pick = head;
        break;
      }
    }
    if (pick.empty()) throw Error("AmbiguousLinearization", name);
    out.push_back(pick);
    for (auto& s : seqs)
      if (!s.empty() && s.front() == pick) s.erase(s.begin());
  }
  active.erase(name);
  memo[name] = out;
  return out;
}

const std::vector<std::string>& lin_of(const Program& p, const std::string& c) {
  auto it = p.linearization.find(c);
  if (it == p.linearization.end()) throw Error("TypeError", "contract '" + c + "' not linearized");
  return it->second;
}

}  // namespace

void linearize(Program& p) {
  std::set<std::string> names;
  for (const auto& c : p.contracts)
    if (!names.insert(c.name).second) throw Error("TypeError", c.loc.str() + ": duplicate contract '" + c.name + "'");
  std::map<std::string, std::vector<std::string>> memo;
  for (const auto& c : p.contracts) {
    std::set<std::string> active;
    c3(p, c.name, memo, active);
  }
  p.linearization = memo;
}

ResolvedFunction resolve_function(const Program& p, const std::string& contract, const std::string& fname) {
  for (const auto& x : lin_of(p, contract)) {
    const Contract* c = p.find(x);
    if (const Function* f = c->find_function(fname)) return {x, f};
  }
  return {};
}

const Modifier* resolve_modifier(const Program& p, const std::string& contract, const std::string& name) {
  for (const auto& x : lin_of(p, contract))
    for (const auto& m : p.find(x)->modifiers)
      if (m.name == name) return &m;
  return nullptr;
}

StateVarRef resolve_state_var(const Program& p, const std::string& contract, const std::string& name) {
  for (const auto& x : lin_of(p, contract))
    if (const VarDecl* v = p.find(x)->find_state_var(name)) return {x, v};
  return {};
}

const EnumDef* resolve_enum(const Program& p, const std::string& contract, const std::string& name) {
  if (p.linearization.count(contract))
    for (const auto& x : lin_of(p, contract))
      if (const EnumDef* e = p.find(x)->find_enum(name)) return e;
  for (const auto& c : p.contracts)
    if (const EnumDef* e = c.find_enum(name)) return e;
  return nullptr;
}

std::vector<std::string> subtypes(const Program& p, const std::string& c) {
  std::vector<std::string> out;
  for (const auto& d : p.contracts) {
    const auto& l = lin_of(p, d.name);
    if (std::find(l.begin(), l.end(), c) != l.end()) out.push_back(d.name);
  }
  return out;
}

std::vector<StateVarRef> all_state_vars(const Program& p, const std::string& c) {
  std::vector<StateVarRef> out;
  const auto& l = lin_of(p, c);
  for (auto it = l.rbegin(); it != l.rend(); ++it)
    for (const auto& v : p.find(*it)->state_vars) out.push_back({*it, &v});
  return out;
}

std::vector<ResolvedFunction> public_functions(const Program& p, const std::string& c) {
  std::vector<ResolvedFunction> out;
  std::set<std::string> seen;
  for (const auto& x : lin_of(p, c))
    for (const auto& f : p.find(x)->functions) {
      if (!seen.insert(f.name).second) continue;
      if (f.is_public) out.push_back({x, &f});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Typechecking

namespace {

class Checker {
 public:
  explicit Checker(Program& p) : p_(p) {}

  void run() {
    for (auto& c : p_.contracts) resolve_decls(c);
    for (auto& c : p_.contracts) {
      std::set<std::string> names;
      for (const auto& v : all_state_vars(p_, c.name))
        if (!names.insert(v.decl->name).second)
          type_error(v.decl->loc, "state variable '" + v.decl->name + "' declared twice in the hierarchy of " + c.name);
    }
    for (auto& c : p_.contracts) {
      cur_ = &c;
      for (auto& m : c.modifiers) check_modifier(m);
      check_function(c.ctor);
      for (auto& f : c.functions) check_function(f);
      std::set<std::string> fnames;
      for (const auto& f : c.functions)
        if (!fnames.insert(f.name).second) type_error(f.loc, "overloaded function '" + f.name + "' is not supported");
    }
  }

 private:
  Program& p_;
  Contract* cur_ = nullptr;
  const Function* fn_ = nullptr;
  std::map<std::string, TypeP> scope_;
  std::set<std::string> params_;

  TypeP resolve(const TypeP& t, const Loc& l) {
    if (!t) return t;
    switch (t->kind) {
      case SolType::Named: {
        if (p_.find(t->name)) return SolType::contract(t->name);
        if (const EnumDef* e = resolve_enum(p_, cur_->name, t->name)) return SolType::integer(e->name);
        type_error(l, "unknown type '" + t->name + "'");
      }
      case SolType::Mapping: {
        TypeP k = resolve(t->key, l);
        if (!k->is_elementary()) type_error(l, "mapping key must be integer, string or address");
        return SolType::mapping(k, resolve(t->value, l));
      }
      case SolType::Array:
        return SolType::array(resolve(t->value, l));
      default:
        return t;
    }
  }

  void resolve_decls(Contract& c) {
    cur_ = &c;
    std::set<std::string> seen;
    for (auto& v : c.state_vars) {
      v.type = resolve(v.type, v.loc);
      if (!seen.insert(v.name).second) type_error(v.loc, "duplicate state variable '" + v.name + "'");
    }
    auto fix = [&](Function& f) {
      for (auto& prm : f.params) prm.type = resolve(prm.type, prm.loc);
      f.ret = resolve(f.ret, f.loc);
    };
    fix(c.ctor);
    for (auto& f : c.functions) fix(f);
    for (const auto& b : c.bases) {
      const Contract* bc = p_.find(b);
      if (bc && !bc->ctor.params.empty())
        throw Error("UnsupportedFeature", "base constructor arguments (" + b + " inherited by " + c.name + ")");
    }
  }

  void check_modifier(Modifier& m) {
    fn_ = nullptr;
    scope_.clear();
    params_.clear();
    int holes = 0;
    std::function<void(const StmtP&)> count = [&](const StmtP& s) {
      if (!s) return;
      if (s->kind == Stmt::Placeholder) ++holes;
      for (auto& b : s->body) count(b);
      count(s->then_s);
      count(s->else_s);
    };
    count(m.body);
    if (holes != 1) type_error(m.loc, "modifier '" + m.name + "' must contain exactly one placeholder");
    stmt(m.body);
  }

  void check_function(Function& f) {
    fn_ = &f;
    scope_.clear();
    params_.clear();
    for (const auto& prm : f.params) {
      if (scope_.count(prm.name)) type_error(prm.loc, "duplicate parameter '" + prm.name + "'");
      scope_[prm.name] = prm.type;
      params_.insert(prm.name);
    }
    stmt(f.body);
    check_returns(f);
    fn_ = nullptr;
  }

  // Returns must be in tail position so translating them as assignments to
  // the result variable preserves control flow.
  void check_returns(const Function& f) {
    std::function<void(const StmtP&, bool)> walk = [&](const StmtP& s, bool tail) {
      if (!s) return;
      switch (s->kind) {
        case Stmt::Return:
          if (!tail) throw Error("UnsupportedFeature", "non-tail return at " + s->loc.str());
          break;
        case Stmt::Block:
          for (size_t i = 0; i < s->body.size(); ++i) walk(s->body[i], tail && i + 1 == s->body.size());
          break;
        case Stmt::If:
          walk(s->then_s, tail);
          walk(s->else_s, tail);
          break;
        case Stmt::While:
          walk(s->then_s, false);
          break;
        default:
          break;
      }
    };
    walk(f.body, true);
  }

  static bool has_call(const ExprP& e) {
    if (!e) return false;
    if (e->kind == Expr::Call) return true;
    if (has_call(e->base)) return true;
    for (const auto& a : e->args)
      if (has_call(a)) return true;
    return false;
  }

  // Is the expression rooted in contract storage?
  static bool storage_rooted(const ExprP& e) {
    switch (e->kind) {
      case Expr::Ident: return e->binding == Binding::State;
      case Expr::Index:
      case Expr::Length: return storage_rooted(e->base);
      default: return false;
    }
  }

  bool compatible(const TypeP& want, ExprP& e, const TypeP& got) {
    if (same_type(want, got)) return true;
    if (!want || !got) return false;
    if ((want->kind == SolType::Address || want->kind == SolType::Contract) && e->kind == Expr::Null) {
      e->type = want;
      return true;
    }
    // Upcast to a base contract.
    if (want->kind == SolType::Contract && got->kind == SolType::Contract) {
      const auto& lin = p_.linearization.at(got->name);
      return std::find(lin.begin(), lin.end(), want->name) != lin.end();
    }
    return false;
  }

  TypeP expect(ExprP& e, const TypeP& want, const std::string& what) {
    TypeP t = expr(e, want);
    if (!compatible(want, e, t))
      type_error(e->loc, what + ": expected " + type_str(want) + ", got " + type_str(t));
    return want;
  }

  TypeP expr(ExprP& e, const TypeP& hint = nullptr, bool void_ok = false) {
    TypeP t = expr_inner(e, hint, void_ok);
    if (!t && !void_ok) type_error(e->loc, "expression has no value");
    e->type = t;
    return t;
  }

  void check_args(std::vector<ExprP>& args, const std::vector<VarDecl>& params, const Loc& l, const std::string& callee) {
    if (args.size() != params.size())
      type_error(l, "call to '" + callee + "' expects " + std::to_string(params.size()) + " arguments");
    for (size_t i = 0; i < args.size(); ++i) expect(args[i], params[i].type, "argument " + std::to_string(i + 1));
  }

  TypeP expr_inner(ExprP& e, const TypeP& hint, bool void_ok) {
    switch (e->kind) {
      case Expr::IntLit:
        if (hint && (hint->kind == SolType::Address || hint->kind == SolType::Contract) && e->ival == 0) {
          e->kind = Expr::Null;
          return hint;
        }
        return SolType::integer();
      case Expr::BoolLit: return SolType::boolean();
      case Expr::StrLit: return SolType::string_t();
      case Expr::Null:
        if (hint && (hint->kind == SolType::Address || hint->kind == SolType::Contract)) return hint;
        return SolType::address();
      case Expr::MsgSender: return SolType::address();
      case Expr::This: return SolType::contract(cur_->name);
      case Expr::Nondet: return SolType::boolean();
      case Expr::EnumConst: return SolType::integer(e->enum_name);
      case Expr::Length:
      case Expr::Ident: {
        if (e->kind == Expr::Length) {
          expr(e->base);
          return SolType::integer();
        }
        if (auto it = scope_.find(e->name); it != scope_.end()) {
          e->binding = params_.count(e->name) ? Binding::Param : Binding::Local;
          return it->second;
        }
        StateVarRef v = resolve_state_var(p_, cur_->name, e->name);
        if (!v.decl) type_error(e->loc, "unknown identifier '" + e->name + "'");
        e->binding = Binding::State;
        e->owner = v.owner;
        return v.decl->type;
      }
      case Expr::Member: {
        if (e->base->kind == Expr::Ident && e->base->name == "msg" && !scope_.count("msg")) {
          if (e->name != "sender") throw Error("UnsupportedFeature", "msg." + e->name + " at " + e->loc.str());
          e->kind = Expr::MsgSender;
          e->base = nullptr;
          return SolType::address();
        }
        if (e->base->kind == Expr::Ident && !scope_.count(e->base->name)) {
          if (const EnumDef* en = resolve_enum(p_, cur_->name, e->base->name)) {
            auto it = std::find(en->members.begin(), en->members.end(), e->name);
            if (it == en->members.end()) type_error(e->loc, "enum " + en->name + " has no member '" + e->name + "'");
            e->kind = Expr::EnumConst;
            e->ival = it - en->members.begin();
            e->enum_name = en->name;
            e->base = nullptr;
            return SolType::integer(en->name);
          }
          if (e->base->name == "tx" || e->base->name == "block" || e->base->name == "now")
            throw Error("UnsupportedFeature", e->base->name + "." + e->name + " at " + e->loc.str());
        }
        TypeP bt = expr(e->base);
        if (bt->kind == SolType::Array && e->name == "length") {
          e->kind = Expr::Length;
          return SolType::integer();
        }
        type_error(e->loc, "no member '" + e->name + "' on " + type_str(bt));
      }
      case Expr::Index: {
        TypeP bt = expr(e->base);
        if (bt->kind != SolType::Mapping && bt->kind != SolType::Array)
          type_error(e->loc, "indexing a non-mapping of type " + type_str(bt));
        expect(e->args[0], bt->index_type(), "index");
        return bt->value;
      }
      case Expr::Unary: {
        if (e->name == "!") return expect(e->args[0], SolType::boolean(), "operand of !");
        return expect(e->args[0], SolType::integer(), "operand of unary -");
      }
      case Expr::Binary: return binary(e);
      case Expr::Call: return call(e, void_ok);
      case Expr::New: {
        e->new_type = resolve(e->new_type, e->loc);
        const TypeP& nt = e->new_type;
        if (nt->kind == SolType::Contract) {
          const Contract* c = p_.find(nt->name);
          check_args(e->args, c->ctor.params, e->loc, nt->name);
        } else if (nt->kind == SolType::Array) {
          if (e->args.size() != 1) type_error(e->loc, "array allocation expects a length");
          expect(e->args[0], SolType::integer(), "array length");
        } else if (nt->kind == SolType::Mapping) {
          if (!e->args.empty()) type_error(e->loc, "mapping allocation takes no arguments");
        } else {
          type_error(e->loc, "cannot allocate " + type_str(nt));
        }
        return nt;
      }
    }
    type_error(e->loc, "unexpected expression");
  }

  TypeP binary(ExprP& e) {
    const std::string& op = e->name;
    if (op == "&&" || op == "||" || op == "==>") {
      expect(e->args[0], SolType::boolean(), "operand of " + op);
      expect(e->args[1], SolType::boolean(), "operand of " + op);
      if (has_call(e->args[1]))
        throw Error("UnsupportedFeature", "call under short-circuit operator at " + e->loc.str());
      return SolType::boolean();
    }
    if (op == "==" || op == "!=") {
      // Type the non-literal side first so 0 can become a null address.
      int first = (e->args[0]->kind == Expr::IntLit || e->args[0]->kind == Expr::Null) ? 1 : 0;
      TypeP t = expr(e->args[first]);
      if (t->is_reference()) type_error(e->loc, "cannot compare values of type " + type_str(t));
      expect(e->args[1 - first], t, "operand of " + op);
      return SolType::boolean();
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      TypeP t = expr(e->args[0]);
      if (t->kind != SolType::Int) type_error(e->loc, "relational operator on " + type_str(t));
      expect(e->args[1], t, "operand of " + op);
      return SolType::boolean();
    }
    expect(e->args[0], SolType::integer(), "operand of " + op);
    expect(e->args[1], SolType::integer(), "operand of " + op);
    return SolType::integer();
  }

  TypeP call(ExprP& e, bool void_ok) {
    (void)void_ok;
    if (!e->base) {
      if (e->name == "require" || e->name == "assert")
        type_error(e->loc, e->name + " used as an expression");
      ResolvedFunction r = resolve_function(p_, cur_->name, e->name);
      if (!r.fn) type_error(e->loc, "unknown function '" + e->name + "'");
      check_args(e->args, r.fn->params, e->loc, e->name);
      return r.fn->ret;
    }
    TypeP bt = e->base->kind == Expr::This ? SolType::contract(cur_->name) : expr(e->base);
    e->base->type = bt;
    if (bt->kind != SolType::Contract) {
      if (e->name == "push") type_error(e->loc, "push is only allowed as a statement");
      type_error(e->loc, "member call on non-contract type " + type_str(bt));
    }
    ResolvedFunction r = resolve_function(p_, bt->name, e->name);
    if (!r.fn) type_error(e->loc, "contract " + bt->name + " has no function '" + e->name + "'");
    if (!r.fn->is_public) type_error(e->loc, "external call to internal function '" + e->name + "'");
    check_args(e->args, r.fn->params, e->loc, e->name);
    return r.fn->ret;
  }

  void cond(ExprP& e, const char* what) {
    TypeP t = expr(e);
    if (t->kind != SolType::Bool) type_error(e->loc, std::string(what) + " requires a boolean, got " + type_str(t));
  }

  void no_deep_copy(const ExprP& lhs, const ExprP& rhs, const TypeP& t) {
    if (t && t->is_reference() && rhs->kind != Expr::New && storage_rooted(lhs))
      throw Error("DeepCopyUnsupported", lhs->loc.str() + ": assignment of " + type_str(t) + " into storage");
  }

  void stmt(const StmtP& s) {
    if (!s) return;
    switch (s->kind) {
      case Stmt::Block:
        for (auto& b : s->body) stmt(b);
        break;
      case Stmt::VarDecl: {
        s->decl_type = resolve(s->decl_type, s->loc);
        if (scope_.count(s->name)) type_error(s->loc, "duplicate local '" + s->name + "'");
        if (s->rhs) expect(s->rhs, s->decl_type, "initializer of " + s->name);
        scope_[s->name] = s->decl_type;
        break;
      }
      case Stmt::Assign: {
        ExprP& l = s->lhs;
        TypeP lt = expr(l);
        if (l->kind != Expr::Ident && l->kind != Expr::Index && l->kind != Expr::Length)
          type_error(l->loc, "expression is not assignable");
        expect(s->rhs, lt, "assignment");
        no_deep_copy(l, s->rhs, lt);
        break;
      }
      case Stmt::ExprStmt:
        if (s->rhs->kind != Expr::Call) type_error(s->loc, "expression statement must be a call");
        expr(s->rhs, nullptr, true);
        break;
      case Stmt::Require: cond(s->cond, "require"); break;
      case Stmt::Assert: cond(s->cond, "assert"); break;
      case Stmt::If:
        cond(s->cond, "if");
        stmt(s->then_s);
        stmt(s->else_s);
        break;
      case Stmt::While:
        cond(s->cond, "while");
        if (has_call(s->cond)) throw Error("UnsupportedFeature", "call in loop condition at " + s->loc.str());
        stmt(s->then_s);
        break;
      case Stmt::Return: {
        if (!fn_) type_error(s->loc, "return inside modifier");
        if (!fn_->ret) {
          if (s->rhs) type_error(s->loc, "function has no return value");
        } else {
          if (!s->rhs) type_error(s->loc, "missing return value");
          expect(s->rhs, fn_->ret, "return value");
        }
        break;
      }
      case Stmt::Placeholder:
        if (fn_) type_error(s->loc, "placeholder outside modifier");
        break;
      case Stmt::Push: {
        TypeP t = expr(s->lhs);
        if (t->kind != SolType::Array) type_error(s->loc, "push on non-array type " + type_str(t));
        expect(s->rhs, t->value, "push argument");
        no_deep_copy(s->lhs, s->rhs, t->value);
        break;
      }
    }
  }
};

}  // namespace

void typecheck(Program& p) {
  if (p.linearization.size() != p.contracts.size()) linearize(p);
  Checker(p).run();
}

// ---------------------------------------------------------------------------
// Modifier desugaring

namespace {

StmtP fill_placeholder(const StmtP& s, const StmtP& body) {
  if (!s) return nullptr;
  if (s->kind == Stmt::Placeholder) return body;
  auto c = std::make_shared<Stmt>(*s);
  for (auto& b : c->body) b = fill_placeholder(b, body);
  c->then_s = fill_placeholder(s->then_s, body);
  c->else_s = fill_placeholder(s->else_s, body);
  return c;
}

void collect_locals(const StmtP& s, std::vector<std::pair<std::string, Loc>>& out) {
  if (!s) return;
  if (s->kind == Stmt::VarDecl) out.push_back({s->name, s->loc});
  for (const auto& b : s->body) collect_locals(b, out);
  collect_locals(s->then_s, out);
  collect_locals(s->else_s, out);
}

}  // namespace

void desugar_modifiers(Program& p) {
  if (p.linearization.size() != p.contracts.size()) linearize(p);
  for (auto& c : p.contracts) {
    auto expand = [&](Function& f) {
      if (f.modifiers.empty()) return;
      StmtP body = f.body;
      for (auto it = f.modifiers.rbegin(); it != f.modifiers.rend(); ++it) {
        const Modifier* m = resolve_modifier(p, c.name, it->name);
        if (!m) throw Error("UnknownModifier", it->loc.str() + ": " + it->name);
        body = fill_placeholder(clone(m->body), body);
      }
      f.body = body;
      f.modifiers.clear();
      std::vector<std::pair<std::string, Loc>> locals;
      collect_locals(f.body, locals);
      std::set<std::string> seen;
      for (const auto& prm : f.params) seen.insert(prm.name);
      for (const auto& [n, l] : locals)
        if (!seen.insert(n).second) type_error(l, "local '" + n + "' clashes after modifier expansion in " + f.name);
    };
    expand(c.ctor);
    for (auto& f : c.functions) expand(f);
  }
}

// ---------------------------------------------------------------------------
// Syntactic conformance against a policy

namespace {

bool policy_type_matches(const policy::Policy& pol, const std::string& pt, const TypeP& t) {
  if (pt == "int" || pt == "uint" || pt.rfind("uint", 0) == 0 || pt.rfind("int", 0) == 0)
    return t->kind == SolType::Int && t->name.empty();
  if (pt == "string") return t->kind == SolType::String;
  if (pt == "address" || pol.has_role(pt)) return t->kind == SolType::Address;
  if (pt == "bool") return t->kind == SolType::Bool;
  return (t->kind == SolType::Int || t->kind == SolType::Contract) && t->name == pt;
}

}  // namespace

StateVarRef state_variable(const Program& p, const std::string& contract) {
  StateVarRef out;
  for (const auto& v : all_state_vars(p, contract))
    if (v.decl->type->is_enum() && (!out.decl || v.decl->name == "State")) out = v;
  return out;
}

std::vector<Diagnostic> check_syntactic_conformance(const Program& p, const policy::Policy& pol) {
  std::vector<Diagnostic> out;
  for (const auto& w : pol.workflows) {
    const Contract* c = p.find(w.name);
    if (!c) {
      out.push_back({"MissingContract", "workflow " + w.name, w.name});
      continue;
    }
    for (const auto& ir : w.instance_roles) {
      StateVarRef v = resolve_state_var(p, c->name, ir.var);
      if (!v.decl)
        out.push_back({"MissingInstanceRole", c->name, ir.var});
      else if (v.decl->type->kind != SolType::Address)
        out.push_back({"InstanceRoleNotAddress", c->name, ir.var + " has type " + type_str(v.decl->type)});
    }
    const VarDecl* sv = state_variable(p, c->name).decl;
    if (!sv) {
      out.push_back({"MissingStateVariable", c->name, "no enum-typed state variable"});
    } else {
      const EnumDef* e = resolve_enum(p, c->name, sv->type->name);
      std::set<std::string> members(e->members.begin(), e->members.end());
      std::set<std::string> states(w.states.begin(), w.states.end());
      if (e->members.size() != w.states.size() || members != states)
        out.push_back({"StateSetMismatch", c->name + "." + sv->name,
                       "enum " + e->name + " has " + std::to_string(e->members.size()) + " members, policy has " +
                           std::to_string(w.states.size()) + " states"});
    }
    auto check_sig = [&](const policy::FunctionSig& sig, const Function* f, const std::string& label) {
      if (sig.params.size() != f->params.size()) {
        out.push_back({"ArityMismatch", c->name + "." + label,
                       "policy " + std::to_string(sig.params.size()) + ", contract " + std::to_string(f->params.size())});
        return;
      }
      for (size_t i = 0; i < sig.params.size(); ++i)
        if (!policy_type_matches(pol, sig.params[i].type, f->params[i].type))
          out.push_back({"ParamTypeMismatch", c->name + "." + label,
                         sig.params[i].name + ": policy " + sig.params[i].type + ", contract " + type_str(f->params[i].type)});
    };
    check_sig(w.constructor, &c->ctor, "constructor");
    for (const auto& sig : w.functions) {
      ResolvedFunction r = resolve_function(p, c->name, sig.name);
      if (!r.fn) {
        out.push_back({"MissingFunction", c->name, sig.name});
        continue;
      }
      if (!r.fn->is_public) out.push_back({"FunctionNotPublic", c->name, sig.name});
      check_sig(sig, r.fn, sig.name);
    }
  }
  return out;
}

}  // namespace vsol::sol
