#include <algorithm>
#include <set>

#include "vsol/verify.hpp"

namespace vsol::verify {

using vir::Expr;
using vir::ExprP;
using vir::Stmt;
using vir::StmtP;
using vir::Type;
using vir::TypeP;

namespace {

std::string quote(const std::string& n) { return "|" + n + "|"; }
std::string bound_name(const std::string& n) { return quote("?" + n); }

std::string num(int64_t v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }

void binders_in(const ExprP& e, const std::set<std::string>& of, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Var && of.count(e->name)) out.insert(e->name);
  for (const auto& a : e->args) binders_in(a, of, out);
}

size_t size(const ExprP& e) {
  size_t n = 1;
  for (const auto& a : e->args) n += size(a);
  return n;
}

void selects(const ExprP& e, std::vector<ExprP>& out) {
  if (!e) return;
  if (e->kind == Expr::Select) out.push_back(e);
  if (e->kind == Expr::Forall) return;
  for (const auto& a : e->args) selects(a, out);
}

// Trigger for a quantifier: the smallest map read mentioning every bound
// variable; failing that, one read per bound variable.
std::vector<ExprP> trigger(const ExprP& q) {
  std::set<std::string> names;
  for (const auto& b : q->binders) names.insert(b.name);
  std::vector<ExprP> cands;
  selects(q->args[0], cands);
  std::vector<std::pair<ExprP, std::set<std::string>>> info;
  for (const auto& c : cands) {
    std::set<std::string> bs;
    binders_in(c, names, bs);
    if (!bs.empty()) info.push_back({c, bs});
  }
  const ExprP* best = nullptr;
  for (const auto& [c, bs] : info)
    if (bs.size() == names.size() && (!best || size(c) < size(*best))) best = &c;
  if (best) return {*best};
  std::vector<ExprP> multi;
  std::set<std::string> covered;
  for (const auto& b : q->binders) {
    if (covered.count(b.name)) continue;
    const ExprP* pick = nullptr;
    for (const auto& [c, bs] : info)
      if (bs.count(b.name) && (!pick || size(c) < size(*pick))) pick = &c;
    if (!pick) return {};
    multi.push_back(*pick);
    binders_in(*pick, names, covered);
  }
  return multi;
}

bool is_const(const ExprP& e) { return e->kind == Expr::Const; }

}  // namespace

Encoder::Encoder(const vir::Program& p, const vir::Procedure& proc, Quantifiers q)
    : p_(p), proc_(proc), mode_(q) {
  for (const auto& f : p.functions) {
    std::string args;
    for (const auto& a : f.params) args += (args.empty() ? "" : " ") + sort(a.type);
    out_ += "(declare-fun " + quote(f.name) + " (" + args + ") " + sort(f.ret) + ")\n";
  }
  for (const auto& c : p.consts) out_ += "(define-fun " + quote(c.name) + " () " + sort(c.type) + " " + num(c.value) + ")\n";
  auto unconstrained = [&](const vir::VarDecl& d) {
    std::string n = fresh(d.name);
    out_ += "(declare-const " + n + " " + sort(d.type) + ")\n";
    symbols_[n] = d.name;
    env_[d.name] = n;
  };
  for (const auto& g : p.globals) unconstrained(g);
  for (const auto& d : proc.params) unconstrained(d);
  for (const auto* ds : {&proc.returns, &proc.locals}) {
    for (const auto& d : *ds) {
      if (!d.type->elementary()) {
        unconstrained(d);
      } else {
        env_[d.name] = d.type->kind == Type::Bool ? "false" : "0";
      }
    }
  }
  for (const auto& a : p.axioms)
    if (!assume_quantified("true", a)) out_ += "(assert " + term(a) + ")\n";
}

std::string Encoder::sort(const TypeP& t) const {
  switch (t->kind) {
    case Type::Bool: return "Bool";
    case Type::Map: return "(Array " + sort(t->key) + " " + sort(t->value) + ")";
    default: return "Int";
  }
}

TypeP Encoder::var_type(const std::string& n) const {
  for (const auto* ds : {&proc_.params, &proc_.returns, &proc_.locals})
    for (const auto& d : *ds)
      if (d.name == n) return d.type;
  if (const auto* g = p_.find_global(n)) return g->type;
  throw Error("IrTypeError", "unknown variable " + n + " in " + proc_.name);
}

std::string Encoder::fresh(const std::string& base) { return quote(base + "@" + std::to_string(counter_++)); }

std::string Encoder::define(const std::string& var, const std::string& sort, const std::string& value) {
  std::string n = fresh(var);
  out_ += "(define-fun " + n + " () " + sort + " " + value + ")\n";
  symbols_[n] = var;
  return n;
}

std::string Encoder::term(const ExprP& e, const Env& env) const { return walk(e, env, {}); }

std::string Encoder::walk(const ExprP& e, const Env& env, const std::set<std::string>& bound) const {
  // Bound variables shadow everything; they are recognised by name here and
  // printed with a prefix no IR identifier can carry.
  struct Walk {
    const Encoder& enc;
    const Env& env;
    std::set<std::string> bound;

    std::string base(const std::string& n) const {
      if (bound.count(n)) return bound_name(n);
      auto it = env.find(n);
      if (it != env.end()) return it->second;
      if (enc.p_.find_const(n)) return quote(n);
      throw Error("IrTypeError", "unknown variable " + n);
    }

    const std::string& key(const std::string& k) const {
      if (k.find("|?") == std::string::npos && enc.key_set_.insert(k).second) enc.keys_.push_back(k);
      return k;
    }

    std::string go(const ExprP& e) {
      switch (e->kind) {
        case Expr::Const:
          if (e->type && e->type->kind == Type::Bool) return e->val ? "true" : "false";
          return num(e->val);
        case Expr::Var: return base(e->name);
        case Expr::UF: {
          if (e->args.empty()) return quote(e->name);
          std::string out = "(" + quote(e->name);
          for (const auto& a : e->args) out += " " + go(a);
          return out + ")";
        }
        case Expr::Select: {
          std::string out = base(e->name);
          for (const auto& k : e->args) out = "(select " + out + " " + key(go(k)) + ")";
          return out;
        }
        case Expr::Forall: {
          enc.quantified_ = true;
          std::set<std::string> saved = bound;
          std::string vars;
          for (const auto& b : e->binders) {
            bound.insert(b.name);
            vars += "(" + bound_name(b.name) + " " + enc.sort(b.type) + ")";
          }
          std::string body = go(e->args[0]);
          std::string pats;
          for (const auto& t : trigger(e)) pats += (pats.empty() ? "" : " ") + go(t);
          bound = saved;
          if (pats.empty()) return "(forall (" + vars + ") " + body + ")";
          return "(forall (" + vars + ") (! " + body + " :pattern (" + pats + ")))";
        }
        case Expr::Op: break;
      }
      const std::string& o = e->name;
      if (e->args.size() == 1) {
        if (o == "!") return "(not " + go(e->args[0]) + ")";
        if (o == "neg") return "(- " + go(e->args[0]) + ")";
        throw Error("IrTypeError", "unknown unary operator " + o);
      }
      std::string a = go(e->args[0]), b = go(e->args[1]);
      if (o == "*" && !is_const(e->args[0]) && !is_const(e->args[1])) enc.nonlinear_ = true;
      if ((o == "div" || o == "mod") && !is_const(e->args[1])) enc.nonlinear_ = true;
      if (o == "!=") return "(not (= " + a + " " + b + "))";
      static const std::map<std::string, std::string> ops = {
          {"+", "+"},  {"-", "-"},  {"*", "*"},   {"div", "div"}, {"mod", "mod"}, {"==", "="},    {"<", "<"},
          {"<=", "<="}, {">", ">"}, {">=", ">="}, {"&&", "and"},  {"||", "or"},   {"==>", "=>"}};
      auto it = ops.find(o);
      if (it == ops.end()) throw Error("IrTypeError", "unknown operator " + o);
      return "(" + it->second + " " + a + " " + b + ")";
    }
  };
  Walk w{*this, env, bound};
  return w.go(e);
}

void Encoder::run(const StmtP& s) { exec(s); }

void Encoder::exec(const StmtP& s) {
  if (!s) return;
  switch (s->kind) {
    case Stmt::Skip: return;
    case Stmt::Seq:
      for (const auto& b : s->body) exec(b);
      return;
    case Stmt::Havoc: {
      TypeP t = var_type(s->name);
      std::string n = fresh(s->name);
      out_ += "(declare-const " + n + " " + sort(t) + ")\n";
      symbols_[n] = s->name;
      if (t->elementary()) havocs_.push_back({s->id, s->name, n, reach_, t});
      env_[s->name] = n;
      return;
    }
    case Stmt::Assign: {
      TypeP t = var_type(s->name);
      env_[s->name] = define(s->name, sort(t), term(s->e));
      return;
    }
    case Stmt::Store: {
      TypeP t = var_type(s->name);
      // x[k1]..[kn] := v  ~>  store chain from the outside in.
      std::vector<std::string> keys;
      for (const auto& k : s->args) keys.push_back(term(k));
      for (const auto& k : keys)
        if (key_set_.insert(k).second) keys_.push_back(k);
      std::vector<std::string> levels = {env_.at(s->name)};
      for (size_t i = 0; i + 1 < keys.size(); ++i) levels.push_back("(select " + levels.back() + " " + keys[i] + ")");
      std::string v = term(s->e);
      for (size_t i = keys.size(); i-- > 0;) v = "(store " + levels[i] + " " + keys[i] + " " + v + ")";
      env_[s->name] = define(s->name, sort(t), v);
      return;
    }
    case Stmt::Assume:
      if (assume_quantified(reach_, s->e)) return;
      if (s->e->kind == Expr::Forall) {
        // Kept out of the path condition: at top level the solver sees the
        // quantifier under a ground guard only. Equisatisfiable, since every
        // later failure condition implies the current path condition.
        out_ += "(assert (=> " + reach_ + " " + term(s->e) + "))\n";
        return;
      }
      reach_ = define("!r", "Bool", "(and " + reach_ + " " + term(s->e) + ")");
      return;
    case Stmt::Assert: {
      std::string c = define("!a", "Bool", term(s->e));
      asserts_.push_back({s->id, s->label, define("!f", "Bool", "(and " + reach_ + " (not " + c + "))")});
      reach_ = define("!r", "Bool", "(and " + reach_ + " " + c + ")");
      return;
    }
    case Stmt::If: {
      std::string c = define("!c", "Bool", term(s->e));
      const Env before = env_;
      const std::string r0 = reach_;
      reach_ = define("!r", "Bool", "(and " + r0 + " " + c + ")");
      exec(s->then_s);
      Env then_env = env_;
      std::string then_reach = reach_;
      env_ = before;
      reach_ = define("!r", "Bool", "(and " + r0 + " (not " + c + "))");
      exec(s->else_s);
      for (auto& [n, t] : env_) {
        const std::string& tt = then_env.at(n);
        if (tt != t) t = define(n, sort(var_type(n)), "(ite " + c + " " + tt + " " + t + ")");
      }
      reach_ = define("!r", "Bool", "(or " + then_reach + " " + reach_ + ")");
      return;
    }
    case Stmt::Call: throw Error("IrTypeError", "vc_gen needs a call-free procedure (call to " + s->name + ")");
    case Stmt::While: throw Error("IrTypeError", "vc_gen needs a loop-free procedure");
  }
}

bool Encoder::assume_quantified(const std::string& guard, const ExprP& e) {
  if (mode_ != Quantifiers::Instantiate || e->kind != Expr::Forall) return false;
  Pending q{guard, {}, {}};
  std::set<std::string> bound;
  for (const auto& b : e->binders) {
    bound.insert(b.name);
    q.binders.push_back(bound_name(b.name));
  }
  q.body = walk(e->args[0], env_, bound);
  pending_.push_back(std::move(q));
  return true;
}

std::string Encoder::logic() const {
  std::string l = nonlinear_ ? "AUFNIRA" : "AUFLIA";
  return quantified_ ? l : "QF_" + l;
}

std::string Encoder::script() const {
  std::string inst;
  for (const auto& q : pending_) {
    // Every binder ranges over the keys; Ref and Int share the sort.
    std::vector<size_t> idx(q.binders.size(), 0);
    std::set<std::string> seen;
    std::string conj;
    if (!keys_.empty()) {
      for (;;) {
        std::string t = q.body;
        for (size_t b = 0; b < idx.size(); ++b) {
          const std::string& from = q.binders[b];
          const std::string& to = keys_[idx[b]];
          for (size_t pos = 0; (pos = t.find(from, pos)) != std::string::npos; pos += to.size())
            t.replace(pos, from.size(), to);
        }
        if (seen.insert(t).second) conj += " " + t;
        size_t b = 0;
        while (b < idx.size() && ++idx[b] == keys_.size()) idx[b++] = 0;
        if (b == idx.size()) break;
      }
    }
    if (!conj.empty()) inst += "(assert (=> " + q.guard + " (and" + conj + ")))\n";
  }
  std::string opts = quantified_ ? "(set-option :auto_config false)\n(set-option :smt.mbqi false)\n" : "";
  return opts + "(set-logic " + logic() + ")\n" + out_ + inst;
}

SmtQuery Encoder::query() const {
  SmtQuery q;
  q.logic = logic();
  std::string goal;
  for (const auto& a : asserts_) goal += " " + a.fail;
  q.prelude = script();
  q.script = q.prelude + (asserts_.empty() ? "(assert false)\n" : "(assert (or false" + goal + "))\n");
  q.symbols = symbols_;
  q.havocs = havocs_;
  q.asserts = asserts_;
  q.weakened = weakened();
  return q;
}

SmtQuery vc_gen(const vir::Program& p, const vir::Procedure& proc, Quantifiers q) {
  Encoder enc(p, proc, q);
  enc.run(proc.body);
  return enc.query();
}

}  // namespace vsol::verify
