#include <functional>

#include "vsol/vir.hpp"

namespace vsol::vir {

namespace {

struct Stop {
  RunResult::Outcome outcome;
  std::string label;
  int id = 0;
};

[[noreturn]] void runtime_error(const std::string& msg) { throw Error("IrRuntimeError", msg); }

int64_t wrap_add(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b)); }
int64_t wrap_sub(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b)); }
int64_t wrap_mul(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b)); }

void collect_ints(const ExprP& e, std::set<int64_t>& out) {
  if (!e) return;
  if (e->kind == Expr::Const && e->type && e->type->kind == Type::Int) out.insert(e->val);
  for (const auto& a : e->args) collect_ints(a, out);
}

void collect_ints(const StmtP& s, std::set<int64_t>& out) {
  if (!s) return;
  collect_ints(s->e, out);
  for (const auto& a : s->args) collect_ints(a, out);
  for (const auto& b : s->body) collect_ints(b, out);
  collect_ints(s->then_s, out);
  collect_ints(s->else_s, out);
}

bool mentions(const ExprP& e, const std::string& name) {
  if (!e) return false;
  if ((e->kind == Expr::Var) && e->name == name) return true;
  if (e->kind == Expr::Forall)
    for (const auto& b : e->binders)
      if (b.name == name) return false;
  for (const auto& a : e->args)
    if (mentions(a, name)) return true;
  return false;
}

class Interp {
 public:
  Interp(const Program& p, const RunOptions& opt) : p_(p), opt_(opt) {
    ints_ = {0, 1, 2};
    for (const auto& c : p.consts)
      if (c.type->kind == Type::Int) ints_.insert(c.value);
    for (const auto& proc : p.procedures) collect_ints(proc.body, ints_);
    for (const auto& a : p.axioms) collect_ints(a, ints_);
    ints_.insert(opt.tape.begin(), opt.tape.end());
    ints_.insert(opt.extra_ints.begin(), opt.extra_ints.end());
  }

  RunResult run(const std::string& entry) {
    const Procedure* proc = p_.find_proc(entry);
    if (!proc) runtime_error("unknown entry procedure " + entry);
    if (opt_.initial) {
      st_ = *opt_.initial;
    } else {
      for (const auto& g : p_.globals) st_.globals[g.name] = initial(g.type);
    }
    st_.known_refs.insert(0);
    try {
      Frame f;
      for (size_t i = 0; i < proc->params.size(); ++i) {
        const auto& d = proc->params[i];
        f.vars[d.name] = i < opt_.args.size() ? Val{opt_.args[i], nullptr} : havoc_value(d.type, 0);
      }
      for (const auto& d : proc->returns) f.vars[d.name] = initial(d.type);
      for (const auto& d : proc->locals) f.vars[d.name] = initial(d.type);
      frames_.push_back(std::move(f));
      exec(proc->body);
      for (const auto& d : proc->returns) res_.returns.push_back(frames_.back().vars[d.name].i);
    } catch (const Stop& s) {
      res_.outcome = s.outcome;
      res_.label = s.label;
      res_.stmt_id = s.id;
    }
    for (size_t i : open_calls_) res_.calls[i].tape_end = res_.consumed.size();
    res_.state = st_;
    return res_;
  }

 private:
  struct Frame {
    std::map<std::string, Val> vars;
  };

  const Program& p_;
  const RunOptions& opt_;
  IrState st_;
  RunResult res_;
  std::vector<Frame> frames_;
  std::vector<size_t> open_calls_;  // indices into res_.calls of running calls
  std::map<std::string, int64_t> bound_;
  std::set<int64_t> ints_;
  size_t tape_pos_ = 0;
  int64_t steps_ = 0;
  bool in_assume_ = false;

  // --- values -------------------------------------------------------------

  MapP flexible_map(const TypeP& t) {
    auto m = std::make_shared<MapVal>();
    m->type = t;
    m->flexible = true;
    return m;
  }

  Val initial(const TypeP& t) {
    if (t->kind == Type::Map) return Val{0, flexible_map(t)};
    return Val{0, nullptr};
  }

  int64_t fresh_ref() {
    int64_t r = st_.next_fresh++;
    st_.known_refs.insert(r);
    return r;
  }

  Val unconstrained(const TypeP& t) {
    if (t->kind == Type::Map) return Val{0, flexible_map(t)};
    if (t->kind == Type::Ref) return Val{fresh_ref(), nullptr};
    return Val{0, nullptr};
  }

  Val havoc_value(const TypeP& t, int id) {
    if (t->kind == Type::Map) return Val{0, flexible_map(t)};
    std::optional<int64_t> v;
    if (opt_.oracle) v = opt_.oracle(id);
    if (!v && tape_pos_ < opt_.tape.size()) v = opt_.tape[tape_pos_++];
    if (!v) {
      if (!opt_.allow_defaults) throw Error("TapeExhausted", "no value for havoc at statement " + std::to_string(id));
      v = t->kind == Type::Ref ? fresh_ref() : 0;
    }
    if (t->kind == Type::Bool) v = *v != 0;
    if (t->kind == Type::Ref) st_.known_refs.insert(*v);
    res_.consumed.push_back(*v);
    return Val{*v, nullptr};
  }

  // Reads m[k]; unconstrained entries of a flexible map are fixed here.
  Val read(const MapP& m, int64_t k) {
    auto it = m->entries.find(k);
    if (it != m->entries.end()) return it->second;
    if (!m->flexible) return m->deflt;
    Val v = unconstrained(m->type->value);
    m->entries[k] = v;
    return v;
  }

  Val* slot(const std::string& name) {
    if (!frames_.empty()) {
      auto it = frames_.back().vars.find(name);
      if (it != frames_.back().vars.end()) return &it->second;
    }
    auto it = st_.globals.find(name);
    if (it != st_.globals.end()) return &it->second;
    return nullptr;
  }

  Val lookup(const std::string& name) {
    auto b = bound_.find(name);
    if (b != bound_.end()) return Val{b->second, nullptr};
    if (Val* s = slot(name)) return *s;
    if (const Constant* c = p_.find_const(name)) return Val{c->value, nullptr};
    runtime_error("unknown variable " + name);
  }

  void store_path(Val& root, const std::vector<int64_t>& keys, size_t idx, const Val& v) {
    if (!root.m) runtime_error("store into a non-map value");
    if (root.m.use_count() > 1) root.m = std::make_shared<MapVal>(*root.m);
    MapP& m = root.m;
    if (idx + 1 == keys.size()) {
      m->entries[keys[idx]] = v;
      return;
    }
    if (!m->entries.count(keys[idx])) m->entries[keys[idx]] = read(m, keys[idx]);
    store_path(m->entries[keys[idx]], keys, idx + 1, v);
  }

  // --- expressions --------------------------------------------------------

  std::vector<std::vector<int64_t>> domain(const std::vector<Binder>& bs) {
    std::vector<std::vector<int64_t>> per;
    for (const auto& b : bs) {
      std::vector<int64_t> d;
      if (b.type->kind == Type::Int)
        d.assign(ints_.begin(), ints_.end());
      else if (b.type->kind == Type::Bool)
        d = {0, 1};
      else if (b.type->kind == Type::Ref)
        d.assign(st_.known_refs.begin(), st_.known_refs.end());
      else
        throw Error("UnsupportedQuantifier", "quantifier over " + type_str(b.type));
      per.push_back(std::move(d));
    }
    return per;
  }

  // Calls f with every assignment of the binders bound.
  void each_assignment(const std::vector<Binder>& bs, const std::function<bool()>& f) {
    auto per = domain(bs);
    std::vector<size_t> idx(bs.size(), 0);
    for (const auto& d : per)
      if (d.empty()) return;
    auto saved = bound_;
    while (true) {
      for (size_t i = 0; i < bs.size(); ++i) bound_[bs[i].name] = per[i][idx[i]];
      if (!f()) break;
      size_t i = 0;
      while (i < bs.size() && ++idx[i] == per[i].size()) idx[i++] = 0;
      if (i == bs.size()) break;
    }
    bound_ = saved;
  }

  Val eval(const ExprP& e) {
    switch (e->kind) {
      case Expr::Const: return Val{e->val, nullptr};
      case Expr::Var: return lookup(e->name);
      case Expr::Select: {
        Val cur = lookup(e->name);
        for (const auto& k : e->args) {
          int64_t key = eval(k).i;
          if (!cur.m) runtime_error("select on a non-map value " + e->name);
          cur = read(cur.m, key);
        }
        return cur;
      }
      case Expr::UF:
        if (e->name == "StrToInt") return eval(e->args[0]);
        runtime_error("no interpretation for function " + e->name);
      case Expr::Forall: {
        if (!in_assume_) throw Error("UnsupportedQuantifier", "quantifier outside an assumption: " + print_expr(e));
        bool all = true;
        each_assignment(e->binders, [&] {
          all = eval(e->args[0]).i != 0;
          return all;
        });
        return Val{all, nullptr};
      }
      case Expr::Op: return eval_op(e);
    }
    runtime_error("bad expression");
  }

  Val eval_op(const ExprP& e) {
    const std::string& o = e->name;
    if (o == "!") return Val{!eval(e->args[0]).i, nullptr};
    if (o == "neg") return Val{wrap_sub(0, eval(e->args[0]).i), nullptr};
    if (o == "&&") return Val{eval(e->args[0]).i && eval(e->args[1]).i, nullptr};
    if (o == "||") return Val{eval(e->args[0]).i || eval(e->args[1]).i, nullptr};
    if (o == "==>") return Val{!eval(e->args[0]).i || eval(e->args[1]).i, nullptr};
    Val a = eval(e->args[0]), b = eval(e->args[1]);
    if (a.m || b.m) runtime_error("operator " + o + " on map values");
    int64_t x = a.i, y = b.i;
    if (o == "==") return Val{x == y, nullptr};
    if (o == "!=") return Val{x != y, nullptr};
    if (o == "<") return Val{x < y, nullptr};
    if (o == "<=") return Val{x <= y, nullptr};
    if (o == ">") return Val{x > y, nullptr};
    if (o == ">=") return Val{x >= y, nullptr};
    if (o == "+") return Val{wrap_add(x, y), nullptr};
    if (o == "-") return Val{wrap_sub(x, y), nullptr};
    if (o == "*") return Val{wrap_mul(x, y), nullptr};
    if (o == "div" || o == "mod") {
      if (y == 0) runtime_error("division by zero");
      int64_t q = x / y, r = x % y;
      if (r < 0) {
        q += y > 0 ? -1 : 1;
        r += y > 0 ? y : -y;
      }
      return Val{o == "div" ? q : r, nullptr};
    }
    runtime_error("unknown operator " + o);
  }

  // --- assumptions --------------------------------------------------------

  // The map holding the last key of a scalar select, plus that key.
  std::pair<MapP, int64_t> locate(const ExprP& sel) {
    Val cur = lookup(sel->name);
    for (size_t i = 0; i + 1 < sel->args.size(); ++i) {
      if (!cur.m) return {nullptr, 0};
      cur = read(cur.m, eval(sel->args[i]).i);
    }
    if (!cur.m) return {nullptr, 0};
    return {cur.m, eval(sel->args.back()).i};
  }

  bool pin(const ExprP& sel, const std::function<int64_t()>& value) {
    if (sel->kind != Expr::Select || (sel->type && sel->type->kind == Type::Map)) return false;
    auto [m, k] = locate(sel);
    if (!m || !m->flexible || m->entries.count(k)) return false;
    // The value is computed after the check so that it cannot fix the entry.
    int64_t v = value();
    if (m->entries.count(k)) return false;
    m->entries[k] = Val{v, nullptr};
    if (m->type->value->kind == Type::Ref) st_.known_refs.insert(v);
    return true;
  }

  // forall ..., j :: Sel(M, ..., j) == c with j the last key and last binder.
  bool repair_default(const ExprP& q) {
    const ExprP& body = q->args[0];
    if (body->kind != Expr::Op || body->name != "==") return false;
    const std::string& last = q->binders.back().name;
    for (int side = 0; side < 2; ++side) {
      const ExprP& sel = body->args[side];
      const ExprP& other = body->args[1 - side];
      if (sel->kind != Expr::Select || mentions(other, last)) continue;
      const ExprP& lk = sel->args.back();
      if (lk->kind != Expr::Var || lk->name != last) continue;
      bool clean = true;
      for (size_t i = 0; i + 1 < sel->args.size(); ++i) clean = clean && !mentions(sel->args[i], last);
      if (!clean) continue;
      std::vector<Binder> rest(q->binders.begin(), q->binders.end() - 1);
      auto apply = [&] {
        Val cur = lookup(sel->name);
        for (size_t i = 0; i + 1 < sel->args.size(); ++i) cur = read(cur.m, eval(sel->args[i]).i);
        if (!cur.m || !cur.m->flexible) return true;
        Val c = eval(other);
        cur.m->flexible = false;
        cur.m->deflt = c;
        return true;
      };
      if (rest.empty())
        apply();
      else
        each_assignment(rest, apply);
      return true;
    }
    return false;
  }

  void repair(const ExprP& e, bool want) {
    switch (e->kind) {
      case Expr::Select:
        if (e->type && e->type->kind == Type::Bool) pin(e, [&] { return int64_t(want); });
        return;
      case Expr::Forall:
        if (!want) return;
        if (repair_default(e)) return;
        each_assignment(e->binders, [&] {
          repair(e->args[0], true);
          return true;
        });
        return;
      case Expr::Op: {
        const std::string& o = e->name;
        if (o == "!") return repair(e->args[0], !want);
        if (o == "&&" && want) {
          repair(e->args[0], true);
          repair(e->args[1], true);
        } else if (o == "||" && !want) {
          repair(e->args[0], false);
          repair(e->args[1], false);
        } else if (o == "||" && want) {
          if (!eval(e->args[0]).i) repair(e->args[1], true);
        } else if (o == "==>" && want) {
          if (eval(e->args[0]).i) repair(e->args[1], true);
        } else if ((o == "==" && want) || (o == "!=" && !want)) {
          if (!pin(e->args[0], [&] { return eval(e->args[1]).i; })) pin(e->args[1], [&] { return eval(e->args[0]).i; });
        }
        return;
      }
      default: return;
    }
  }

  // --- statements ---------------------------------------------------------

  void step(const StmtP& s) {
    if (++steps_ > opt_.budget) throw Stop{RunResult::BudgetExhausted, "", s->id};
  }

  TypeP var_type(const std::string& name, const Procedure* proc) {
    if (proc) {
      for (const auto* ds : {&proc->params, &proc->returns, &proc->locals})
        for (const auto& d : *ds)
          if (d.name == name) return d.type;
    }
    if (const VarDecl* g = p_.find_global(name)) return g->type;
    runtime_error("unknown variable " + name);
  }

  std::vector<const Procedure*> proc_stack_;

  void exec(const StmtP& s) {
    step(s);
    switch (s->kind) {
      case Stmt::Skip: return;
      case Stmt::Havoc: {
        Val* sl = slot(s->name);
        if (!sl) runtime_error("havoc of unknown variable " + s->name);
        *sl = havoc_value(var_type(s->name, proc_stack_.empty() ? nullptr : proc_stack_.back()), s->id);
        return;
      }
      case Stmt::Assign: {
        Val v = eval(s->e);
        Val* sl = slot(s->name);
        if (!sl) runtime_error("assignment to unknown variable " + s->name);
        *sl = v;
        return;
      }
      case Stmt::Store: {
        std::vector<int64_t> keys;
        for (const auto& k : s->args) keys.push_back(eval(k).i);
        Val v = eval(s->e);
        Val* sl = slot(s->name);
        if (!sl) runtime_error("store into unknown variable " + s->name);
        store_path(*sl, keys, 0, v);
        return;
      }
      case Stmt::Assume: {
        in_assume_ = true;
        repair(s->e, true);
        bool ok = eval(s->e).i != 0;
        in_assume_ = false;
        if (!ok) throw Stop{RunResult::Blocked, "", s->id};
        return;
      }
      case Stmt::Assert:
        if (!eval(s->e).i) throw Stop{RunResult::AssertFailed, s->label, s->id};
        return;
      case Stmt::Call: return exec_call(s);
      case Stmt::Seq:
        for (const auto& b : s->body) exec(b);
        return;
      case Stmt::If:
        if (eval(s->e).i)
          exec(s->then_s);
        else if (s->else_s)
          exec(s->else_s);
        return;
      case Stmt::While:
        while (eval(s->e).i) {
          step(s);
          exec(s->then_s);
        }
        return;
    }
  }

  void exec_call(const StmtP& s) {
    const Procedure* proc = p_.find_proc(s->name);
    if (!proc) runtime_error("call to unknown procedure " + s->name);
    if (proc->params.size() != s->args.size()) runtime_error("argument count of call to " + s->name);
    Frame f;
    CallEvent ev;
    ev.depth = static_cast<int>(frames_.size());
    ev.proc = s->name;
    ev.stmt_id = s->id;
    for (size_t i = 0; i < proc->params.size(); ++i) {
      Val v = eval(s->args[i]);
      ev.args.push_back(v.m ? 0 : v.i);
      f.vars[proc->params[i].name] = v;
    }
    for (const auto& d : proc->returns) f.vars[d.name] = initial(d.type);
    for (const auto& d : proc->locals) f.vars[d.name] = initial(d.type);
    ev.tape_begin = res_.consumed.size();
    open_calls_.push_back(res_.calls.size());
    res_.calls.push_back(ev);
    frames_.push_back(std::move(f));
    proc_stack_.push_back(proc);
    exec(proc->body);
    proc_stack_.pop_back();
    res_.calls[open_calls_.back()].tape_end = res_.consumed.size();
    open_calls_.pop_back();
    Frame done = std::move(frames_.back());
    frames_.pop_back();
    for (size_t i = 0; i < s->results.size(); ++i) {
      Val* sl = slot(s->results[i]);
      if (!sl) runtime_error("unknown call result " + s->results[i]);
      *sl = done.vars[proc->returns[i].name];
    }
  }

 public:
  void set_entry(const Procedure* p) { proc_stack_.push_back(p); }
};

}  // namespace

RunResult interpret(const Program& p, const std::string& entry, const RunOptions& opt) {
  Interp in(p, opt);
  in.set_entry(p.find_proc(entry));
  return in.run(entry);
}

Val read_path(IrState& st, const std::string& global, const std::vector<int64_t>& keys) {
  auto it = st.globals.find(global);
  if (it == st.globals.end()) throw Error("IrRuntimeError", "unknown global " + global);
  Val cur = it->second;
  for (int64_t k : keys) {
    if (!cur.m) throw Error("IrRuntimeError", "read_path through a non-map value");
    auto e = cur.m->entries.find(k);
    if (e != cur.m->entries.end()) {
      cur = e->second;
    } else if (cur.m->flexible) {
      // Unconstrained and never observed: report the value the first read
      // would produce for scalars.
      TypeP vt = cur.m->type->value;
      if (vt->kind == Type::Map) {
        auto m = std::make_shared<MapVal>();
        m->type = vt;
        m->flexible = true;
        cur = Val{0, m};
      } else {
        cur = Val{0, nullptr};
      }
    } else {
      cur = cur.m->deflt;
    }
  }
  return cur;
}

}  // namespace vsol::vir
