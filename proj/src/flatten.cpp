#include <map>
#include <set>

#include "vsol/verify.hpp"

namespace vsol::verify {

using vir::Expr;
using vir::ExprP;
using vir::Stmt;
using vir::StmtP;
using vir::TypeP;

namespace {

using Renaming = std::map<std::string, std::string>;

std::string renamed(const std::string& n, const Renaming& r) {
  auto it = r.find(n);
  return it == r.end() ? n : it->second;
}

ExprP rename(const ExprP& e, const Renaming& r) {
  if (!e || r.empty()) return e;
  switch (e->kind) {
    case Expr::Const: return e;
    case Expr::Var: {
      auto it = r.find(e->name);
      if (it == r.end()) return e;
      auto c = std::make_shared<Expr>(*e);
      c->name = it->second;
      return c;
    }
    case Expr::Forall: {
      Renaming inner = r;
      for (const auto& b : e->binders) inner.erase(b.name);
      auto c = std::make_shared<Expr>(*e);
      for (auto& a : c->args) a = rename(a, inner);
      return c;
    }
    default: {
      auto c = std::make_shared<Expr>(*e);
      if (e->kind == Expr::Select) c->name = renamed(e->name, r);
      for (auto& a : c->args) a = rename(a, r);
      return c;
    }
  }
}

ExprP zero_of(const TypeP& t) {
  switch (t->kind) {
    case vir::Type::Bool: return vir::bool_const(false);
    case vir::Type::Ref: return vir::null_const();
    default: return vir::int_const(0);
  }
}

void written(const StmtP& s, std::set<std::string>& out) {
  if (!s) return;
  switch (s->kind) {
    case Stmt::Havoc:
    case Stmt::Assign:
    case Stmt::Store: out.insert(s->name); break;
    case Stmt::Call:
      for (const auto& r : s->results) out.insert(r);
      break;
    default: break;
  }
  for (const auto& b : s->body) written(b, out);
  written(s->then_s, out);
  written(s->else_s, out);
}

class Flattener {
 public:
  Flattener(const vir::Program& p, const FlattenOptions& o) : p_(p), o_(o) {}

  vir::Procedure run(const vir::Procedure& proc) {
    out_ = proc;
    out_.body = go(proc.body, {});
    return out_;
  }

 private:
  StmtP go(const StmtP& s, const Renaming& r) {
    if (!s) return s;
    switch (s->kind) {
      case Stmt::Seq: {
        std::vector<StmtP> body;
        for (const auto& b : s->body) body.push_back(go(b, r));
        return vir::seq(body);
      }
      case Stmt::If: {
        auto c = std::make_shared<Stmt>(*s);
        c->e = rename(s->e, r);
        c->then_s = go(s->then_s, r);
        c->else_s = go(s->else_s, r);
        return c;
      }
      case Stmt::While: return loop(s, r);
      case Stmt::Call: return inline_call(s, r);
      default: {
        auto c = std::make_shared<Stmt>(*s);
        c->name = renamed(s->name, r);
        c->e = rename(s->e, r);
        for (auto& a : c->args) a = rename(a, r);
        return c;
      }
    }
  }

  StmtP loop(const StmtP& s, const Renaming& r) {
    ExprP guard = rename(s->e, r);
    StmtP body = go(s->then_s, r);
    StmtP exit = vir::assume(vir::op("!", guard));
    if (o_.loops == FlattenOptions::Loops::Cut) {
      std::set<std::string> targets;
      written(body, targets);
      std::vector<StmtP> out;
      for (const auto& t : targets) out.push_back(vir::havoc(t));
      out.push_back(vir::if_(guard, vir::seq({body, vir::assume(vir::bool_const(false))})));
      out.push_back(exit);
      return vir::seq(out);
    }
    StmtP acc = exit;
    for (int i = 0; i < o_.unroll_depth; ++i) acc = vir::if_(guard, vir::seq({body, acc}));
    return acc;
  }

  StmtP inline_call(const StmtP& s, const Renaming& r) {
    const vir::Procedure* callee = p_.find_proc(s->name);
    if (!callee) throw Error("IrTypeError", "call to unknown procedure " + s->name);
    int active = 0;
    for (const auto& n : stack_) active += n == s->name;
    if (active >= o_.recursion_limit)
      throw Error("RecursionDepthExceeded", s->name + " (limit " + std::to_string(o_.recursion_limit) + ")");

    const std::string tag = "#" + std::to_string(++counter_);
    Renaming inner;
    std::vector<StmtP> out;
    auto local = [&](const vir::VarDecl& d) {
      inner[d.name] = d.name + tag;
      out_.locals.push_back({d.name + tag, d.type});
    };
    for (const auto& d : callee->params) local(d);
    for (const auto& d : callee->returns) local(d);
    for (const auto& d : callee->locals) local(d);

    for (size_t i = 0; i < callee->params.size(); ++i)
      out.push_back(vir::assign(inner[callee->params[i].name], rename(s->args.at(i), r)));
    // The interpreter starts every activation from zeroed locals.
    for (const auto* ds : {&callee->returns, &callee->locals})
      for (const auto& d : *ds)
        if (d.type->elementary()) out.push_back(vir::assign(inner[d.name], zero_of(d.type)));

    stack_.push_back(s->name);
    out.push_back(go(callee->body, inner));
    stack_.pop_back();
    for (size_t i = 0; i < s->results.size(); ++i)
      out.push_back(vir::assign(renamed(s->results[i], r), vir::var(inner[callee->returns.at(i).name])));
    return vir::seq(out);
  }

  const vir::Program& p_;
  FlattenOptions o_;
  vir::Procedure out_;
  std::vector<std::string> stack_;
  int counter_ = 0;
};

}  // namespace

vir::Procedure unroll_loop(const vir::Procedure& harness, int k) {
  vir::Procedure out = harness;
  std::vector<StmtP> body;
  const auto& top = harness.body->kind == Stmt::Seq ? harness.body->body : std::vector<StmtP>{harness.body};
  bool done = false;
  for (const auto& s : top) {
    if (s->kind == Stmt::While && !done) {
      for (int i = 0; i < k; ++i) body.push_back(s->then_s);
      done = true;
    } else {
      body.push_back(s);
    }
  }
  out.body = vir::seq(body);
  return out;
}

vir::Procedure flatten(const vir::Program& p, const vir::Procedure& proc, const FlattenOptions& o) {
  return Flattener(p, o).run(proc);
}

vir::Procedure unroll_harness(const vir::Program& p, const vir::Procedure& harness, int k, const FlattenOptions& o) {
  return flatten(p, unroll_loop(harness, k), o);
}

}  // namespace vsol::verify
