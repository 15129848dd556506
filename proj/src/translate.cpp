#include "vsol/translate.hpp"

#include <algorithm>
#include <set>

namespace vsol::trans {

using vir::ExprP;
using vir::StmtP;
using vir::Type;
using SolKind = sol::SolType::Kind;

vir::TypeP map_type(const sol::TypeP& t) {
  switch (t->kind) {
    case SolKind::Int:
    case SolKind::String: return Type::integer();
    case SolKind::Bool: return Type::boolean();
    case SolKind::Address:
    case SolKind::Contract:
    case SolKind::Mapping:
    case SolKind::Array: return Type::ref();
    case SolKind::Named: break;
  }
  throw Error("TypeError", "unresolved type " + sol::type_str(t));
}

vir::MapShape shape_of(const sol::TypeP& t) {
  vir::MapShape s;
  sol::TypeP cur = t;
  while (cur->is_reference()) {
    s.keys.push_back(map_type(cur->index_type()));
    cur = cur->value;
  }
  s.elem = map_type(cur);
  return s;
}

std::string proc_name(const std::string& contract, const std::string& fn) { return contract + "_" + fn; }
std::string ctor_name(const std::string& contract) { return contract + "_Ctor"; }
std::string own_ctor_name(const std::string& contract) { return contract + "_Ctor_Own"; }
std::string state_map(const std::string& var, const std::string& owner) { return var + "_" + owner; }

namespace {

const std::set<std::string> kReserved = {
    "var",  "function", "const", "axiom", "procedure", "returns", "skip", "havoc", "assume", "assert", "call", "if",
    "else", "while",    "forall", "true", "false",     "null",    "div",  "mod",   "int",    "bool",   "Ref",  "ref",
    "this", "msg_sender", "__ret", "main"};

ExprP zero_of(const vir::TypeP& t) {
  if (t->kind == Type::Bool) return vir::bool_const(false);
  if (t->kind == Type::Ref) return vir::null_const();
  return vir::int_const(0);
}

// Per-procedure translation state.
struct Ctx {
  std::string contract;  // static contract of the code being translated
  std::vector<vir::VarDecl> locals;
  std::set<std::string> used;
  std::map<std::string, std::string> rename;
  std::map<std::string, int> counters;

  std::string fresh(const std::string& stem, const vir::TypeP& t) {
    std::string n;
    do n = stem + std::to_string(++counters[stem]);
    while (used.count(n));
    used.insert(n);
    locals.push_back({n, t});
    return n;
  }
};

}  // namespace

struct Translator::Impl {
  sol::Program prog;
  Translation out;
  std::set<std::string> global_names;

  explicit Impl(const sol::Program& typed) : prog(sol::clone(typed)) {
    bool has_mods = false;
    for (const auto& c : prog.contracts) {
      has_mods = has_mods || !c.ctor.modifiers.empty();
      for (const auto& f : c.functions) has_mods = has_mods || !f.modifiers.empty();
    }
    if (has_mods) {
      sol::desugar_modifiers(prog);
      sol::typecheck(prog);
    }
    if (prog.linearization.size() != prog.contracts.size()) sol::linearize(prog);

    vir::Program& p = out.program;
    vir::emit_prelude(p);
    int64_t id = 1;
    for (const auto& c : prog.contracts) {
      out.contract_ids[c.name] = id;
      p.consts.push_back({c.name, Type::integer(), id++});
    }
    for (const auto& c : prog.contracts)
      for (const auto& v : c.state_vars) {
        p.add_global(state_map(v.name, c.name), Type::map(Type::ref(), map_type(v.type)));
        if (v.type->is_reference()) vir::declare_heap_maps(p, shape_of(v.type));
      }
    out.strings[""] = 0;
    for (const auto& g : p.globals) global_names.insert(g.name);
    for (const auto& c : p.consts) global_names.insert(c.name);
    for (const char* k : {"int", "bool", "Ref"})
      for (const char* v : {"int", "bool", "Ref"}) global_names.insert(std::string("M_") + k + "_" + v);
  }

  // --- names -------------------------------------------------------------

  void bind_local(Ctx& cx, const std::string& name, const vir::TypeP& t, bool param, std::vector<vir::VarDecl>* params) {
    std::string n = name;
    while (kReserved.count(n) || global_names.count(n) || cx.used.count(n) || n.rfind("__", 0) == 0) n += "_";
    cx.used.insert(n);
    cx.rename[name] = n;
    if (param)
      params->push_back({n, t});
    else
      cx.locals.push_back({n, t});
  }

  void collect_locals(Ctx& cx, const sol::StmtP& s) {
    if (!s) return;
    if (s->kind == sol::Stmt::VarDecl) bind_local(cx, s->name, map_type(s->decl_type), false, nullptr);
    for (const auto& b : s->body) collect_locals(cx, b);
    collect_locals(cx, s->then_s);
    collect_locals(cx, s->else_s);
  }

  std::string local_name(Ctx& cx, const std::string& n) {
    auto it = cx.rename.find(n);
    if (it != cx.rename.end()) return it->second;
    // Only reachable through the single-construct entry points.
    cx.rename[n] = n;
    cx.used.insert(n);
    return n;
  }

  std::string heap_map(const sol::TypeP& t) {
    vir::TypeP k = map_type(t->index_type()), v = map_type(t->value);
    std::string n = vir::heap_map_name(k, v);
    out.program.add_global(n, Type::map(Type::ref(), Type::map(k, v)));
    return n;
  }

  int64_t intern(const std::string& s) {
    auto it = out.strings.find(s);
    if (it != out.strings.end()) return it->second;
    int64_t k = static_cast<int64_t>(out.strings.size());
    out.strings[s] = k;
    return k;
  }

  // --- allocation --------------------------------------------------------

  std::vector<StmtP> new_map(const ExprP& v, const sol::TypeP& t) {
    vir::MapShape s = shape_of(t);
    vir::declare_heap_maps(out.program, s);
    std::vector<StmtP> r = {vir::call("New", {}, {v->name})};
    for (auto& st : vir::map_init_stmts(v, s, true)) r.push_back(st);
    r.push_back(vir::zero_init(v, s));
    return r;
  }

  std::vector<StmtP> new_array(const ExprP& v, const sol::TypeP& t, const ExprP& len) {
    vir::MapShape s{{Type::integer()}, map_type(t->value)};
    heap_map(t);
    return {vir::call("New", {}, {v->name}), vir::store("Length", {v}, len), vir::zero_init(v, s)};
  }

  // --- calls -------------------------------------------------------------

  StmtP dispatch(const std::vector<std::string>& targets_of, const std::string& fname, const ExprP& recv,
                 const std::vector<ExprP>& args, const ExprP& sender, const std::vector<std::string>& results,
                 bool direct_if_single) {
    struct Branch {
      std::string contract, proc;
    };
    std::vector<Branch> bs;
    for (const auto& d : targets_of) {
      sol::ResolvedFunction r = sol::resolve_function(prog, d, fname);
      if (r.fn) bs.push_back({d, proc_name(r.owner, fname)});
    }
    if (bs.empty()) throw Error("NoCandidateImplementation", fname);
    std::vector<ExprP> full = {recv};
    full.insert(full.end(), args.begin(), args.end());
    full.push_back(sender);
    if (direct_if_single && bs.size() == 1) return vir::call(bs[0].proc, full, results);
    StmtP chain = vir::assume(vir::bool_const(false));
    for (auto it = bs.rbegin(); it != bs.rend(); ++it) {
      ExprP test = vir::op("==", vir::select("DType", {recv}, Type::integer()), vir::var(it->contract, Type::integer()));
      chain = vir::if_(test, vir::call(it->proc, full, results), chain);
    }
    return chain;
  }

  // Translates a call; the result (if any) lands in a fresh temporary.
  ExprP call(Ctx& cx, const sol::ExprP& e, std::vector<StmtP>& pre, bool want_result) {
    ExprP recv;
    std::string static_c;
    if (e->base) {
      recv = e->base->kind == sol::Expr::This ? vir::var("this", Type::ref()) : expr(cx, e->base, pre, nullptr);
      static_c = e->base->kind == sol::Expr::This ? cx.contract : e->base->type->name;
    }
    std::vector<ExprP> args;
    for (const auto& a : e->args) args.push_back(expr(cx, a, pre, nullptr));
    std::vector<std::string> results;
    ExprP res;
    if (want_result && e->type) {
      vir::TypeP rt = map_type(e->type);
      std::string t = cx.fresh("__t", rt);
      results.push_back(t);
      res = vir::var(t, rt);
    }
    if (!e->base) {
      pre.push_back(dispatch(sol::subtypes(prog, cx.contract), e->name, vir::var("this", Type::ref()), args,
                             vir::var("msg_sender", Type::ref()), results, true));
    } else {
      pre.push_back(dispatch(sol::subtypes(prog, static_c), e->name, recv, args, vir::var("this", Type::ref()),
                             results, false));
    }
    return res;
  }

  // --- expressions -------------------------------------------------------

  // pc: condition under which e is evaluated (short-circuit context); null
  // means always.
  ExprP expr(Ctx& cx, const sol::ExprP& e, std::vector<StmtP>& pre, const ExprP& pc) {
    using K = sol::Expr::Kind;
    switch (e->kind) {
      case K::IntLit:
      case K::EnumConst: return vir::int_const(e->ival);
      case K::BoolLit: return vir::bool_const(e->ival != 0);
      case K::StrLit: return vir::uf("StrToInt", {vir::int_const(intern(e->name))}, Type::integer());
      case K::Null: return vir::null_const();
      case K::MsgSender: return vir::var("msg_sender", Type::ref());
      case K::This: return vir::var("this", Type::ref());
      case K::Ident:
        if (e->binding == sol::Binding::State)
          return vir::select(state_map(e->name, e->owner), {vir::var("this", Type::ref())}, map_type(e->type));
        return vir::var(local_name(cx, e->name), map_type(e->type));
      case K::Index: {
        ExprP b = expr(cx, e->base, pre, pc);
        ExprP k = expr(cx, e->args[0], pre, pc);
        return vir::select(heap_map(e->base->type), {b, k}, map_type(e->type));
      }
      case K::Length: return vir::select("Length", {expr(cx, e->base, pre, pc)}, Type::integer());
      case K::Unary: {
        ExprP a = expr(cx, e->args[0], pre, pc);
        return vir::op(e->name == "!" ? "!" : "neg", a);
      }
      case K::Binary: {
        const std::string& o = e->name;
        ExprP a = expr(cx, e->args[0], pre, pc);
        if (o == "&&" || o == "||" || o == "==>") {
          ExprP g = o == "||" ? vir::op("!", a) : a;
          ExprP b = expr(cx, e->args[1], pre, pc ? vir::op("&&", pc, g) : g);
          return vir::op(o, a, b);
        }
        ExprP b = expr(cx, e->args[1], pre, pc);
        if (o == "/" || o == "%") {
          ExprP nz = vir::op("!=", b, vir::int_const(0));
          pre.push_back(vir::assume(pc ? vir::op("==>", pc, nz) : nz));
          return vir::op(o == "/" ? "div" : "mod", a, b);
        }
        return vir::op(o, a, b);
      }
      case K::Nondet: {
        std::string n = cx.fresh("__nd", Type::boolean());
        pre.push_back(vir::havoc(n));
        return vir::var(n, Type::boolean());
      }
      case K::Call: {
        ExprP r = call(cx, e, pre, true);
        if (!r) throw Error("TypeError", e->loc.str() + ": call without a value used as an expression");
        return r;
      }
      case K::New: {
        const sol::TypeP& t = e->new_type;
        std::string v = cx.fresh("__v", Type::ref());
        ExprP vv = vir::var(v, Type::ref());
        if (t->kind == SolKind::Contract) {
          std::vector<ExprP> args = {vv};
          for (const auto& a : e->args) args.push_back(expr(cx, a, pre, pc));
          args.push_back(vir::var("this", Type::ref()));
          pre.push_back(vir::call("New", {}, {v}));
          pre.push_back(vir::assume(
              vir::op("==", vir::select("DType", {vv}, Type::integer()), vir::var(t->name, Type::integer()))));
          pre.push_back(vir::call(ctor_name(t->name), args));
        } else if (t->kind == SolKind::Array) {
          ExprP len = expr(cx, e->args[0], pre, pc);
          for (auto& s : new_array(vv, t, len)) pre.push_back(s);
        } else {
          for (auto& s : new_map(vv, t)) pre.push_back(s);
        }
        return vv;
      }
      case K::Member: break;
    }
    throw Error("TypeError", e->loc.str() + ": untranslatable expression");
  }

  // --- statements --------------------------------------------------------

  StmtP stmt(Ctx& cx, const sol::StmtP& s) {
    using K = sol::Stmt::Kind;
    if (!s) return vir::skip();
    std::vector<StmtP> pre;
    switch (s->kind) {
      case K::Block: {
        std::vector<StmtP> out;
        for (const auto& b : s->body) out.push_back(stmt(cx, b));
        return vir::seq(out);
      }
      case K::VarDecl: {
        vir::TypeP t = map_type(s->decl_type);
        ExprP v = s->rhs ? expr(cx, s->rhs, pre, nullptr) : zero_of(t);
        pre.push_back(vir::assign(local_name(cx, s->name), v));
        return vir::seq(pre);
      }
      case K::Assign: {
        ExprP v = expr(cx, s->rhs, pre, nullptr);
        pre.push_back(assign_to(cx, s->lhs, v, pre));
        return vir::seq(pre);
      }
      case K::ExprStmt:
        call(cx, s->rhs, pre, false);
        return vir::seq(pre);
      case K::Require: {
        ExprP c = expr(cx, s->cond, pre, nullptr);
        pre.push_back(vir::assume(c));
        return vir::seq(pre);
      }
      case K::Assert: {
        ExprP c = expr(cx, s->cond, pre, nullptr);
        pre.push_back(vir::assert_(c, s->note.empty() ? s->loc.str() : s->loc.str() + " " + s->note));
        return vir::seq(pre);
      }
      case K::If: {
        ExprP c = expr(cx, s->cond, pre, nullptr);
        pre.push_back(vir::if_(c, stmt(cx, s->then_s), s->else_s ? stmt(cx, s->else_s) : nullptr));
        return vir::seq(pre);
      }
      case K::While: {
        ExprP c = expr(cx, s->cond, pre, nullptr);
        std::vector<StmtP> body = {stmt(cx, s->then_s)};
        body.insert(body.end(), pre.begin(), pre.end());
        pre.push_back(vir::while_(c, vir::seq(body)));
        return vir::seq(pre);
      }
      case K::Return:
        if (!s->rhs) return vir::skip();
        {
          ExprP v = expr(cx, s->rhs, pre, nullptr);
          pre.push_back(vir::assign("__ret", v));
        }
        return vir::seq(pre);
      case K::Push: {
        ExprP arr = expr(cx, s->lhs, pre, nullptr);
        ExprP v = expr(cx, s->rhs, pre, nullptr);
        ExprP len = vir::select("Length", {arr}, Type::integer());
        pre.push_back(vir::store(heap_map(s->lhs->type), {arr, len}, v));
        pre.push_back(vir::store("Length", {arr}, vir::op("+", len, vir::int_const(1))));
        return vir::seq(pre);
      }
      case K::Placeholder: break;
    }
    throw Error("TypeError", s->loc.str() + ": untranslatable statement");
  }

  StmtP assign_to(Ctx& cx, const sol::ExprP& lhs, const ExprP& v, std::vector<StmtP>& pre) {
    using K = sol::Expr::Kind;
    switch (lhs->kind) {
      case K::Ident:
        if (lhs->binding == sol::Binding::State)
          return vir::store(state_map(lhs->name, lhs->owner), {vir::var("this", Type::ref())}, v);
        return vir::assign(local_name(cx, lhs->name), v);
      case K::Index: {
        ExprP b = expr(cx, lhs->base, pre, nullptr);
        ExprP k = expr(cx, lhs->args[0], pre, nullptr);
        return vir::store(heap_map(lhs->base->type), {b, k}, v);
      }
      case K::Length: return vir::store("Length", {expr(cx, lhs->base, pre, nullptr)}, v);
      default: break;
    }
    throw Error("TypeError", lhs->loc.str() + ": not assignable");
  }

  // --- procedures --------------------------------------------------------

  Ctx begin(const std::string& contract, const sol::Function& f, vir::Procedure& proc) {
    Ctx cx;
    cx.contract = contract;
    proc.params.push_back({"this", Type::ref()});
    for (const auto& prm : f.params) bind_local(cx, prm.name, map_type(prm.type), true, &proc.params);
    proc.params.push_back({"msg_sender", Type::ref()});
    collect_locals(cx, f.body);
    return cx;
  }

  void finish(Ctx& cx, vir::Procedure& proc, const std::vector<StmtP>& body) {
    proc.locals = cx.locals;
    proc.body = vir::seq(body);
    out.renames[proc.name] = cx.rename;
    out.program.procedures.push_back(std::move(proc));
  }

  void function(const sol::Contract& c, const sol::Function& f) {
    vir::Procedure proc;
    proc.name = proc_name(c.name, f.name);
    Ctx cx = begin(c.name, f, proc);
    std::vector<StmtP> body;
    if (f.ret) {
      vir::TypeP rt = map_type(f.ret);
      proc.returns.push_back({"__ret", rt});
      body.push_back(vir::assign("__ret", zero_of(rt)));
    }
    body.push_back(stmt(cx, f.body));
    finish(cx, proc, body);
  }

  // State variable initialization and constructor body of c alone.
  std::vector<StmtP> own_part(Ctx& cx, const sol::Contract& c) {
    std::vector<StmtP> out;
    ExprP self = vir::var("this", Type::ref());
    for (const auto& v : c.state_vars) {
      std::string m = state_map(v.name, c.name);
      if (v.type->kind == SolKind::Mapping) {
        std::string t = cx.fresh("__v", Type::ref());
        for (auto& s : new_map(vir::var(t, Type::ref()), v.type)) out.push_back(s);
        out.push_back(vir::store(m, {self}, vir::var(t, Type::ref())));
      } else if (v.type->kind == SolKind::Array) {
        std::string t = cx.fresh("__v", Type::ref());
        for (auto& s : new_array(vir::var(t, Type::ref()), v.type, vir::int_const(0))) out.push_back(s);
        out.push_back(vir::store(m, {self}, vir::var(t, Type::ref())));
      } else {
        out.push_back(vir::store(m, {self}, zero_of(map_type(v.type))));
      }
    }
    out.push_back(stmt(cx, c.ctor.body));
    return out;
  }

  void constructor(const sol::Contract& c) {
    vir::Procedure proc;
    proc.name = ctor_name(c.name);
    Ctx cx = begin(c.name, c.ctor, proc);
    std::vector<StmtP> body;
    std::vector<ExprP> base_args = {vir::var("this", Type::ref()), vir::var("msg_sender", Type::ref())};
    if (c.bases.size() == 1) {
      body.push_back(vir::call(ctor_name(c.bases[0]), base_args));
    } else if (c.bases.size() > 1) {
      const auto& lin = prog.linearization.at(c.name);
      for (auto it = lin.rbegin(); it != lin.rend(); ++it) {
        if (*it == c.name) continue;
        own_ctor(*prog.find(*it));
        body.push_back(vir::call(own_ctor_name(*it), base_args));
      }
    }
    for (auto& s : own_part(cx, c)) body.push_back(s);
    finish(cx, proc, body);
  }

  // Used for bases under multiple inheritance, where the full chain of a
  // base would run shared ancestors twice.
  void own_ctor(const sol::Contract& c) {
    if (out.program.find_proc(own_ctor_name(c.name))) return;
    vir::Procedure proc;
    proc.name = own_ctor_name(c.name);
    Ctx cx = begin(c.name, c.ctor, proc);
    finish(cx, proc, own_part(cx, c));
  }

  Translation run() {
    for (const auto& c : prog.contracts) {
      constructor(c);
      for (const auto& f : c.functions) function(c, f);
    }
    for (const auto& [s, k] : out.strings)
      out.program.axioms.push_back(
          vir::op("==", vir::uf("StrToInt", {vir::int_const(k)}, Type::integer()), vir::int_const(k)));
    out.program = vir::typecheck(out.program);
    return out;
  }
};

Translator::Translator(const sol::Program& typed) : impl_(std::make_unique<Impl>(typed)) {}
Translator::~Translator() = default;

vir::ExprP Translator::expr(const std::string& contract, const sol::ExprP& e, std::vector<vir::StmtP>& pre) {
  Ctx cx;
  cx.contract = contract;
  return impl_->expr(cx, e, pre, nullptr);
}

vir::StmtP Translator::stmt(const std::string& contract, const sol::StmtP& s) {
  Ctx cx;
  cx.contract = contract;
  return impl_->stmt(cx, s);
}

Translation Translator::program() {
  Impl fresh(impl_->prog);
  return fresh.run();
}

const sol::Program& Translator::source() const { return impl_->prog; }

Translation translate_program(const sol::Program& typed) { return Translator(typed).program(); }

std::vector<sol::ResolvedFunction> harness_functions(const sol::Program& typed, const std::string& root) {
  std::vector<sol::ResolvedFunction> out;
  for (const auto& r : sol::public_functions(typed, root))
    if (r.fn && r.fn->is_public && !r.fn->is_ctor) out.push_back(r);
  return out;
}

void generate_harness(Translation& t, const sol::Program& typed, const std::string& root) {
  const sol::Contract* rc = typed.find(root);
  if (!rc) throw Error("TypeError", "unknown contract " + root);
  vir::Program& p = t.program;
  vir::Procedure m;
  m.name = "main";
  m.locals = {{"this", Type::ref()}, {"msg_sender", Type::ref()}, {"__c", Type::boolean()}};
  ExprP self = vir::var("this", Type::ref()), sender = vir::var("msg_sender", Type::ref());

  auto sender_havoc = [&](std::vector<StmtP>& out) {
    out.push_back(vir::havoc("msg_sender"));
    out.push_back(vir::assume(vir::op("!=", sender, vir::null_const())));
  };
  auto call_with_havoc = [&](const std::string& tag, const std::string& proc, const sol::Function& f,
                             std::vector<StmtP>& out) {
    sender_havoc(out);
    std::vector<ExprP> args = {self};
    for (const auto& prm : f.params) {
      std::string n = "__" + tag + "_" + prm.name;
      vir::TypeP ty = map_type(prm.type);
      m.locals.push_back({n, ty});
      out.push_back(vir::havoc(n));
      args.push_back(vir::var(n, ty));
    }
    args.push_back(sender);
    out.push_back(vir::call(proc, args));
  };

  std::vector<StmtP> body = {vir::assume(vir::select("Alloc", {vir::null_const()}, Type::boolean())),
                             vir::call("New", {}, {"this"}),
                             vir::assume(vir::op("==", vir::select("DType", {self}, Type::integer()),
                                                 vir::var(root, Type::integer())))};
  call_with_havoc("ctor", ctor_name(root), rc->ctor, body);
  t.entry_points[ctor_name(root)] = "constructor";

  StmtP chain = nullptr;
  auto fns = harness_functions(typed, root);
  for (auto it = fns.rbegin(); it != fns.rend(); ++it) {
    std::vector<StmtP> branch;
    call_with_havoc(it->fn->name, proc_name(it->owner, it->fn->name), *it->fn, branch);
    t.entry_points[proc_name(it->owner, it->fn->name)] = it->fn->name;
    chain = vir::seq({vir::havoc("__c"), vir::if_(vir::var("__c", Type::boolean()), vir::seq(branch), chain)});
  }
  body.push_back(vir::while_(vir::bool_const(true), chain ? chain : vir::skip()));
  m.body = vir::seq(body);
  if (p.find_proc("main")) throw Error("TypeError", "program already has a main procedure");
  p.procedures.push_back(m);
  p = vir::number_stmts(vir::typecheck(p));
}

}  // namespace vsol::trans
