#include "vsol/instrument.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "vsol/sol.hpp"

namespace vsol::instr {

using namespace sol;

namespace {

ExprP boolean(bool b) {
  ExprP e = Expr::make(Expr::BoolLit);
  e->ival = b;
  return e;
}

ExprP ident(const std::string& n) {
  ExprP e = Expr::make(Expr::Ident);
  e->name = n;
  return e;
}

ExprP binary(const std::string& op, ExprP a, ExprP b) {
  ExprP e = Expr::make(Expr::Binary);
  e->name = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprP negate(ExprP a) {
  ExprP e = Expr::make(Expr::Unary);
  e->name = "!";
  e->args = {std::move(a)};
  return e;
}

ExprP disjunction(const std::vector<ExprP>& ds) {
  if (ds.empty()) return boolean(false);
  ExprP out = ds[0];
  for (size_t i = 1; i < ds.size(); ++i) out = binary("||", out, ds[i]);
  return out;
}

ExprP enum_member(const std::string& enum_name, const std::string& member) {
  ExprP e = Expr::make(Expr::Member);
  e->base = ident(enum_name);
  e->name = member;
  return e;
}

StmtP stmt(Stmt::Kind k) { return Stmt::make(k); }

StmtP assertion(ExprP cond, Loc loc, std::string note) {
  StmtP s = stmt(Stmt::Assert);
  s->cond = std::move(cond);
  s->loc = loc;
  s->note = std::move(note);
  return s;
}

StmtP snapshot(TypeP t, const std::string& local, const std::string& var) {
  StmtP s = stmt(Stmt::VarDecl);
  s->decl_type = std::move(t);
  s->name = local;
  s->rhs = ident(var);
  return s;
}

// old(e): state variables in `renames` become their snapshot locals.
ExprP old(const ExprP& e, const std::map<std::string, std::string>& renames) {
  ExprP out = clone(e);
  std::function<void(const ExprP&)> walk = [&](const ExprP& x) {
    if (!x) return;
    if (x->kind == Expr::Ident) {
      auto it = renames.find(x->name);
      if (it != renames.end()) {
        x->name = it->second;
        x->binding = Binding::None;
        x->owner.clear();
      }
    }
    walk(x->base);
    for (const auto& a : x->args) walk(a);
  };
  walk(out);
  return out;
}

}  // namespace

ExprP access_predicate(const policy::AccessSet& ac, const policy::Workflow& w) {
  std::vector<std::string> globals = ac.global_roles;
  std::vector<std::string> locals = ac.instance_roles;
  std::sort(globals.begin(), globals.end());
  std::sort(locals.begin(), locals.end());
  std::vector<ExprP> ds;
  for (const auto& g : globals) {
    (void)g;
    ds.push_back(Expr::make(Expr::Nondet));
  }
  for (const auto& q : locals) {
    if (!w.has_instance_role(q)) throw Error("UnknownAccessEntry", q);
    ds.push_back(binary("==", Expr::make(Expr::MsgSender), ident(q)));
  }
  return disjunction(ds);
}

ExprP state_predicate(const std::vector<std::string>& states, const policy::Workflow& w, const std::string& state_var,
                      const std::string& enum_name) {
  std::vector<std::string> ss = states;
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  std::vector<ExprP> ds;
  for (const auto& s : ss) {
    if (!w.has_state(s)) throw Error("UnknownState", s);
    ds.push_back(binary("==", ident(state_var), enum_member(enum_name, s)));
  }
  return disjunction(ds);
}

Instrumented instrument_for_conformance(const Program& input, const policy::Policy& pol) {
  Instrumented out;
  out.program = clone(input);
  Program& p = out.program;
  if (p.linearization.empty()) typecheck(p);
  auto diags = check_syntactic_conformance(p, pol);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d.kind + " " + d.location + ": " + d.message;
    throw Error("NotSyntacticallyConformant", msg);
  }

  for (const auto& w : pol.workflows) {
    Contract* c = p.find(w.name);
    StateVarRef sv = state_variable(p, c->name);
    const std::string sname = sv.decl->name;
    const std::string ename = sv.decl->type->name;
    const std::string old_state = "old" + sname;

    std::map<std::string, std::string> renames{{sname, old_state}};
    for (const auto& ir : w.instance_roles) renames[ir.var] = "old" + ir.var;

    auto attach = [&](Function& f, const std::string& mod) { f.modifiers.insert(f.modifiers.begin(), {mod, f.loc}); };

    // Constructor: initiators are global roles.
    {
      policy::AccessSet ac0{w.initiator_roles, {}};
      Modifier m;
      m.name = "constructor_checker";
      m.body = stmt(Stmt::Block);
      m.body->body.push_back(stmt(Stmt::Placeholder));
      m.body->body.push_back(
          assertion(binary("==>", access_predicate(ac0, w), state_predicate({w.initial_state}, w, sname, ename)),
                    c->ctor.loc, "initial state " + w.initial_state));
      c->modifiers.push_back(m);
      attach(c->ctor, m.name);
    }

    for (const auto& sig : w.functions) {
      auto ts = policy::transitions_for_function(w, sig.name);
      if (ts.empty()) {
        out.notes.push_back({"NoTransitions", c->name + "." + sig.name, "function appears in no transition"});
        continue;
      }
      const Loc sig_loc = resolve_function(p, c->name, sig.name).fn->loc;
      Modifier m;
      m.name = sig.name + "_checker";
      m.body = stmt(Stmt::Block);
      m.body->body.push_back(snapshot(sv.decl->type, old_state, sname));
      for (const auto& ir : w.instance_roles) m.body->body.push_back(snapshot(SolType::address(), "old" + ir.var, ir.var));
      m.body->body.push_back(stmt(Stmt::Placeholder));
      for (const auto& t : ts) {
        ExprP pre = binary("&&", old(access_predicate(t.access, w), renames),
                           old(state_predicate({t.start}, w, sname, ename), renames));
        std::string succ;
        for (const auto& n : t.successors) succ += (succ.empty() ? "" : "|") + n;
        m.body->body.push_back(assertion(binary("==>", pre, state_predicate(t.successors, w, sname, ename)), sig_loc,
                                         "transition " + t.start + " -" + sig.name + "-> " + succ));
      }
      c->modifiers.push_back(m);

      // Inherited functions get an overriding copy in the workflow contract.
      Function* f = nullptr;
      for (auto& g : c->functions)
        if (g.name == sig.name) f = &g;
      if (!f) {
        ResolvedFunction r = resolve_function(p, c->name, sig.name);
        Function copy = *r.fn;
        copy.body = clone(r.fn->body);
        c->functions.push_back(copy);
        f = &c->functions.back();
      }
      attach(*f, m.name);
    }
  }
  typecheck(p);
  return out;
}

// ---------------------------------------------------------------------------
// Runtime checks

namespace {

const std::map<std::string, std::string> kFlip = {{"==", "!="}, {"!=", "=="}, {"<", ">="},
                                                  {">=", "<"},  {">", "<="},  {"<=", ">"}};

ExprP nnf(const ExprP& e, bool neg) {
  if (e->kind == Expr::Unary && e->name == "!") return nnf(e->args[0], !neg);
  if (e->kind == Expr::BoolLit) return boolean(neg ? !e->ival : e->ival);
  if (e->kind == Expr::Binary) {
    const std::string& op = e->name;
    if (op == "&&" || op == "||") {
      std::string o = neg ? (op == "&&" ? "||" : "&&") : op;
      ExprP r = binary(o, nnf(e->args[0], neg), nnf(e->args[1], neg));
      r->type = e->type;
      return r;
    }
    if (op == "==>") {
      // a ==> b  is  !a || b
      ExprP r = neg ? binary("&&", nnf(e->args[0], false), nnf(e->args[1], true))
                    : binary("||", nnf(e->args[0], true), nnf(e->args[1], false));
      r->type = e->type;
      return r;
    }
    auto it = kFlip.find(op);
    if (neg && it != kFlip.end()) {
      ExprP r = clone(e);
      r->name = it->second;
      return r;
    }
  }
  ExprP a = clone(e);
  if (!neg) return a;
  ExprP r = negate(a);
  r->type = SolType::boolean();
  return r;
}

bool is_lit(const ExprP& e, bool v) { return e->kind == Expr::BoolLit && (e->ival != 0) == v; }

// Replaces nondet literals by true and folds constants through && / ||.
ExprP eliminate(const ExprP& e) {
  if (e->kind == Expr::Nondet) return boolean(true);
  if (e->kind == Expr::Unary && e->name == "!" && e->args[0]->kind == Expr::Nondet) return boolean(true);
  if (e->kind == Expr::Binary && (e->name == "&&" || e->name == "||")) {
    ExprP a = eliminate(e->args[0]);
    ExprP b = eliminate(e->args[1]);
    bool conj = e->name == "&&";
    if (is_lit(a, !conj) || is_lit(b, !conj)) return boolean(!conj);
    if (is_lit(a, conj)) return b;
    if (is_lit(b, conj)) return a;
    ExprP r = binary(e->name, a, b);
    r->type = e->type;
    return r;
  }
  return e;
}

void rewrite(const StmtP& s) {
  if (!s) return;
  if (s->kind == Stmt::Assert || s->kind == Stmt::Require) s->cond = eliminate(nnf(s->cond, false));
  for (const auto& b : s->body) rewrite(b);
  rewrite(s->then_s);
  rewrite(s->else_s);
}

size_t count(const ExprP& e) {
  if (!e) return 0;
  size_t n = e->kind == Expr::Nondet;
  n += count(e->base);
  for (const auto& a : e->args) n += count(a);
  return n;
}

size_t count(const StmtP& s) {
  if (!s) return 0;
  size_t n = count(s->lhs) + count(s->rhs) + count(s->cond);
  for (const auto& b : s->body) n += count(b);
  return n + count(s->then_s) + count(s->else_s);
}

template <class P, class F>
void each_body(P& p, F f) {
  for (auto& c : p.contracts) {
    f(c.ctor.body);
    for (auto& fn : c.functions) f(fn.body);
    for (auto& m : c.modifiers) f(m.body);
  }
}

}  // namespace

ExprP to_nnf(const ExprP& e) { return nnf(e, false); }

Program make_runtime_checks(const Program& input) {
  Program p = clone(input);
  each_body(p, [](const StmtP& b) { rewrite(b); });
  typecheck(p);
  return p;
}

size_t count_nondet(const Program& input) {
  size_t n = 0;
  each_body(input, [&](const StmtP& b) { n += count(b); });
  return n;
}

}  // namespace vsol::instr
