#include "vsol/sol_interp.hpp"

#include "vsol/error.hpp"
#include "vsol/sol.hpp"

namespace vsol::sol {

bool Value::operator<(const Value& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (kind == Str) return s < o.s;
  return i < o.i;
}

std::string Value::str() const {
  switch (kind) {
    case Int: return std::to_string(i);
    case Str: return "\"" + s + "\"";
    case Ref: return "@" + std::to_string(i);
  }
  return "?";
}

namespace {

struct Abort {
  Interpreter::Outcome outcome;
  Loc loc;
};

struct Frame {
  int64_t self = 0;
  int64_t sender = 0;
  std::string contract;  // static contract of the executing code
  std::map<std::string, Value> locals;
  Value ret;
};

}  // namespace

class Exec {
 public:
  explicit Exec(Interpreter& in) : in_(in), p_(in.p_), st_(in.st_) {}

  Value default_value(const TypeP& t) {
    switch (t->kind) {
      case SolType::String: return Value::str("");
      case SolType::Address:
      case SolType::Contract:
      case SolType::Mapping:
      case SolType::Array: return Value::ref(0);
      default: return Value::integer(0);
    }
  }

  int64_t alloc_collection(const TypeP& t, bool lazy, int64_t length) {
    int64_t r = st_.next_ref++;
    HeapObj& o = st_.heap[r];
    o.type = t;
    o.lazy_children = lazy;
    o.length = length;
    return r;
  }

  HeapObj& obj(int64_t r, const Loc& l) {
    auto it = st_.heap.find(r);
    if (it == st_.heap.end()) throw Error("RuntimeError", l.str() + ": dereference of unallocated reference " + std::to_string(r));
    return it->second;
  }

  void step(const Loc& l) {
    if (++in_.steps_ > in_.budget_) throw Abort{Interpreter::Outcome::BudgetExhausted, l};
  }

  // Runs the full constructor chain of `contract` on instance `self`.
  void construct(int64_t self, const std::string& contract, const std::vector<Value>& args, int64_t sender) {
    const auto& lin = p_.linearization.at(contract);
    for (auto it = lin.rbegin(); it != lin.rend(); ++it) {
      const Contract* c = p_.find(*it);
      HeapObj& o = obj(self, c->loc);
      for (const auto& v : c->state_vars) {
        if (v.type->kind == SolType::Mapping)
          o.fields[v.name] = Value::ref(alloc_collection(v.type, true, 0));
        else if (v.type->kind == SolType::Array)
          o.fields[v.name] = Value::ref(alloc_collection(v.type, false, 0));
        else
          o.fields[v.name] = default_value(v.type);
      }
      Frame f;
      f.self = self;
      f.sender = sender;
      f.contract = c->name;
      if (c->name == contract)
        for (size_t i = 0; i < c->ctor.params.size(); ++i) f.locals[c->ctor.params[i].name] = args[i];
      run_body(c->ctor, f);
    }
  }

  Value invoke(int64_t self, const std::string& owner, const Function& fn, const std::vector<Value>& args, int64_t sender) {
    Frame f;
    f.self = self;
    f.sender = sender;
    f.contract = owner;
    for (size_t i = 0; i < fn.params.size(); ++i) f.locals[fn.params[i].name] = args[i];
    if (fn.ret) f.ret = default_value(fn.ret);
    run_body(fn, f);
    return f.ret;
  }

  void run_body(const Function& fn, Frame& f) {
    if (!fn.modifiers.empty()) throw Error("RuntimeError", "modifiers must be desugared before interpretation");
    exec(fn.body, f);
  }

  void exec(const StmtP& s, Frame& f) {
    if (!s) return;
    step(s->loc);
    switch (s->kind) {
      case Stmt::Block:
        for (const auto& b : s->body) exec(b, f);
        break;
      case Stmt::VarDecl:
        f.locals[s->name] = s->rhs ? eval(s->rhs, f) : default_value(s->decl_type);
        break;
      case Stmt::Assign: {
        Value v = eval(s->rhs, f);
        store(s->lhs, v, f);
        break;
      }
      case Stmt::ExprStmt: eval(s->rhs, f); break;
      case Stmt::Require:
        if (!eval(s->cond, f).i) throw Abort{Interpreter::Outcome::Reverted, s->loc};
        break;
      case Stmt::Assert:
        if (!eval(s->cond, f).i) throw Abort{Interpreter::Outcome::AssertFailed, s->loc};
        break;
      case Stmt::If:
        if (eval(s->cond, f).i)
          exec(s->then_s, f);
        else
          exec(s->else_s, f);
        break;
      case Stmt::While:
        while (eval(s->cond, f).i) {
          step(s->loc);
          exec(s->then_s, f);
        }
        break;
      case Stmt::Return:
        if (s->rhs) f.ret = eval(s->rhs, f);
        break;
      case Stmt::Placeholder: throw Error("RuntimeError", "placeholder outside modifier");
      case Stmt::Push: {
        Value arr = eval(s->lhs, f);
        Value v = eval(s->rhs, f);
        HeapObj& o = obj(arr.i, s->loc);
        o.entries[Value::integer(o.length)] = v;
        o.length += 1;
        break;
      }
    }
  }

  Value read_entry(int64_t r, const Value& key, const Loc& l) {
    HeapObj& o = obj(r, l);
    auto it = o.entries.find(key);
    if (it != o.entries.end()) return it->second;
    const TypeP& et = o.type->value;
    if (o.lazy_children && et->is_reference()) {
      bool lazy = o.lazy_children;
      int64_t child = alloc_collection(et, lazy, 0);
      st_.heap[r].entries[key] = Value::ref(child);
      return Value::ref(child);
    }
    return default_value(et);
  }

  void store(const ExprP& lhs, const Value& v, Frame& f) {
    switch (lhs->kind) {
      case Expr::Ident:
        if (lhs->binding == Binding::State)
          obj(f.self, lhs->loc).fields[lhs->name] = v;
        else
          f.locals[lhs->name] = v;
        return;
      case Expr::Index: {
        Value base = eval(lhs->base, f);
        Value key = eval(lhs->args[0], f);
        obj(base.i, lhs->loc).entries[key] = v;
        return;
      }
      case Expr::Length: {
        Value base = eval(lhs->base, f);
        obj(base.i, lhs->loc).length = v.i;
        return;
      }
      default: throw Error("RuntimeError", lhs->loc.str() + ": not assignable");
    }
  }

  Value call(const ExprP& e, Frame& f) {
    std::vector<Value> args;
    for (const auto& a : e->args) args.push_back(eval(a, f));
    if (!e->base) {
      // Internal call: virtual dispatch on the dynamic type, sender unchanged.
      const std::string& dyn = obj(f.self, e->loc).contract;
      ResolvedFunction r = resolve_function(p_, dyn, e->name);
      return invoke(f.self, r.owner, *r.fn, args, f.sender);
    }
    Value recv = e->base->kind == Expr::This ? Value::ref(f.self) : eval(e->base, f);
    auto it = st_.heap.find(recv.i);
    if (it == st_.heap.end() || !it->second.instance) throw Abort{Interpreter::Outcome::Reverted, e->loc};
    ResolvedFunction r = resolve_function(p_, it->second.contract, e->name);
    return invoke(recv.i, r.owner, *r.fn, args, f.self);
  }

  Value eval(const ExprP& e, Frame& f) {
    switch (e->kind) {
      case Expr::IntLit:
      case Expr::BoolLit: return Value::integer(e->ival);
      case Expr::EnumConst: return Value::integer(e->ival);
      case Expr::StrLit: return Value::str(e->name);
      case Expr::Null: return Value::ref(0);
      case Expr::MsgSender: return Value::ref(f.sender);
      case Expr::This: return Value::ref(f.self);
      case Expr::Nondet: return Value::integer(in_.nondet_ ? in_.nondet_() : 0);
      case Expr::Ident:
        if (e->binding == Binding::State) return obj(f.self, e->loc).fields.at(e->name);
        return f.locals.at(e->name);
      case Expr::Index: {
        Value base = eval(e->base, f);
        Value key = eval(e->args[0], f);
        return read_entry(base.i, key, e->loc);
      }
      case Expr::Length: return Value::integer(obj(eval(e->base, f).i, e->loc).length);
      case Expr::Unary: {
        Value v = eval(e->args[0], f);
        return Value::integer(e->name == "!" ? !v.i : -v.i);
      }
      case Expr::Binary: return binary(e, f);
      case Expr::Call: return call(e, f);
      case Expr::New: {
        const TypeP& t = e->new_type;
        if (t->kind == SolType::Contract) {
          std::vector<Value> args;
          for (const auto& a : e->args) args.push_back(eval(a, f));
          int64_t r = st_.next_ref++;
          st_.heap[r].instance = true;
          st_.heap[r].contract = t->name;
          construct(r, t->name, args, f.self);
          return Value::ref(r);
        }
        if (t->kind == SolType::Array) return Value::ref(alloc_collection(t, false, eval(e->args[0], f).i));
        return Value::ref(alloc_collection(t, true, 0));
      }
      case Expr::Member: throw Error("RuntimeError", e->loc.str() + ": unresolved member");
    }
    throw Error("RuntimeError", "bad expression");
  }

  Value binary(const ExprP& e, Frame& f) {
    const std::string& op = e->name;
    if (op == "&&") return Value::integer(eval(e->args[0], f).i && eval(e->args[1], f).i);
    if (op == "||") return Value::integer(eval(e->args[0], f).i || eval(e->args[1], f).i);
    if (op == "==>") return Value::integer(!eval(e->args[0], f).i || eval(e->args[1], f).i);
    Value a = eval(e->args[0], f);
    Value b = eval(e->args[1], f);
    if (op == "==") return Value::integer(a == b);
    if (op == "!=") return Value::integer(!(a == b));
    int64_t x = a.i, y = b.i;
    if (op == "<") return Value::integer(x < y);
    if (op == "<=") return Value::integer(x <= y);
    if (op == ">") return Value::integer(x > y);
    if (op == ">=") return Value::integer(x >= y);
    if (op == "+") return Value::integer(x + y);
    if (op == "-") return Value::integer(x - y);
    if (op == "*") return Value::integer(x * y);
    // Division follows SMT-LIB integer semantics (Euclidean) so both
    // interpreters and the solver agree; division by zero reverts.
    if (y == 0) throw Abort{Interpreter::Outcome::Reverted, e->loc};
    int64_t q = x / y, r = x % y;
    if (r < 0) {
      q += y > 0 ? -1 : 1;
      r += y > 0 ? y : -y;
    }
    return Value::integer(op == "/" ? q : r);
  }

 private:
  Interpreter& in_;
  const Program& p_;
  SolState& st_;
};

Interpreter::Interpreter(const Program& p, int64_t step_budget) : p_(p), budget_(step_budget) {}

Interpreter::Result Interpreter::create(const std::string& contract, const std::vector<Value>& args, int64_t sender) {
  SolState saved = st_;
  steps_ = 0;
  Result res;
  try {
    Exec ex(*this);
    int64_t r = st_.next_ref++;
    st_.heap[r].instance = true;
    st_.heap[r].contract = contract;
    ex.construct(r, contract, args, sender);
    res.created = r;
  } catch (const Abort& a) {
    st_ = saved;
    res.outcome = a.outcome;
    res.loc = a.loc;
  }
  return res;
}

Interpreter::Result Interpreter::call(int64_t receiver, const std::string& fn, const std::vector<Value>& args,
                                      int64_t sender) {
  SolState saved = st_;
  steps_ = 0;
  Result res;
  try {
    Exec ex(*this);
    auto it = st_.heap.find(receiver);
    if (it == st_.heap.end() || !it->second.instance) throw Error("RuntimeError", "call on non-instance");
    ResolvedFunction r = resolve_function(p_, it->second.contract, fn);
    if (!r.fn) throw Error("RuntimeError", "unknown function " + fn);
    res.ret = ex.invoke(receiver, r.owner, *r.fn, args, sender);
  } catch (const Abort& a) {
    st_ = saved;
    res.outcome = a.outcome;
    res.loc = a.loc;
  }
  return res;
}

}  // namespace vsol::sol
