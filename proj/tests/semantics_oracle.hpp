#pragma once

// Reference semantics versus IR semantics on the same contract: a random
// program generator and a state comparison. Shared by the unit tests and the
// acceptance binary, so it reports differences instead of asserting.

#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vsol/sol.hpp"
#include "vsol/sol_interp.hpp"
#include "vsol/translate.hpp"

namespace semantics {

using namespace vsol;
namespace v = vsol::vir;

inline sol::Program typed(const std::string& src) {
  sol::Program p = sol::parse_contract(src);
  sol::typecheck(p);
  return p;
}

// Adds `__create(args..., sender) returns (this)` and numbers statements.
inline v::Program with_create(trans::Translation t, const sol::Program& p, const std::string& root) {
  v::Procedure c;
  c.name = "__create";
  const sol::Contract* rc = p.find(root);
  std::vector<v::ExprP> args = {v::var("this", v::Type::ref())};
  for (const auto& prm : rc->ctor.params) {
    c.params.push_back({"a_" + prm.name, trans::map_type(prm.type)});
    args.push_back(v::var("a_" + prm.name, trans::map_type(prm.type)));
  }
  c.params.push_back({"sender", v::Type::ref()});
  args.push_back(v::var("sender", v::Type::ref()));
  c.returns = {{"this", v::Type::ref()}};
  v::ExprP self = v::var("this", v::Type::ref());
  c.body = v::seq({v::assume(v::select("Alloc", {v::null_const()}, v::Type::boolean())),
                   v::call("New", {}, {"this"}),
                   v::assume(v::op("==", v::select("DType", {self}, v::Type::integer()),
                                   v::var(root, v::Type::integer()))),
                   v::call(trans::ctor_name(root), args)});
  t.program.procedures.push_back(c);
  return v::number_stmts(v::typecheck(t.program));
}

struct Compare {
  const sol::Program& sp;
  sol::SolState& ss;
  v::IrState& is;
  std::string where;
  std::vector<std::string>& diffs;

  template <class A, class B>
  void same(const A& a, const B& b, const std::string& what) {
    if (!(a == b)) diffs.push_back(where + " " + what + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }

  static int64_t ir_entry(v::IrState& st, const std::string& map, int64_t ref, int64_t key) {
    return v::read_path(st, map, {ref, key}).i;
  }

  std::set<int64_t> ir_keys(const std::string& map, int64_t ref) {
    std::set<int64_t> out;
    auto it = is.globals.find(map);
    if (it == is.globals.end()) return out;
    auto e = it->second.m->entries.find(ref);
    if (e == it->second.m->entries.end() || !e->second.m) return out;
    for (const auto& [k, _] : e->second.m->entries) out.insert(k);
    return out;
  }

  void value(const sol::TypeP& t, const sol::Value& sv, int64_t iv, const std::string& path) {
    if (!t->is_reference()) {
      same(sv.i, iv, path);
      return;
    }
    const sol::HeapObj* so = sv.i ? &ss.heap.at(sv.i) : nullptr;
    if (!so) return;
    if (t->kind == sol::SolType::Array) same(so->length, v::read_path(is, "Length", {iv}).i, path + ".length");
    std::string map = v::heap_map_name(trans::map_type(t->index_type()), trans::map_type(t->value));
    std::set<int64_t> keys = ir_keys(map, iv);
    std::map<int64_t, const sol::Value*> by_key;
    for (const auto& [k, val] : so->entries) {
      keys.insert(k.i);
      by_key[k.i] = &val;
    }
    for (int64_t k : keys) {
      auto se = by_key.find(k);
      int64_t ie = ir_entry(is, map, iv, k);
      std::string sub = path + "[" + std::to_string(k) + "]";
      if (se != by_key.end()) {
        value(t->value, *se->second, ie, sub);
      } else if (!t->value->is_reference()) {
        same(int64_t{0}, ie, sub);
      }
    }
  }

  void instance(const std::string& root, int64_t sref, int64_t iref) {
    const sol::HeapObj& o = ss.heap.at(sref);
    for (const auto& sv : sol::all_state_vars(sp, root)) {
      int64_t iv = v::read_path(is, trans::state_map(sv.decl->name, sv.owner), {iref}).i;
      value(sv.decl->type, o.fields.at(sv.decl->name), iv, sv.decl->name);
    }
  }
};

struct ProgGen {
  std::mt19937 rng;
  int budget = 0;
  int loops = 0;
  explicit ProgGen(unsigned seed) : rng(seed) {}
  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  std::string ie(int d, const std::vector<std::string>& ints) {
    int c = pick(d <= 0 ? 3 : 9);
    switch (c) {
      case 0: return std::to_string(pick(7) - 2);
      case 1: return ints[pick(static_cast<int>(ints.size()))];
      case 2: return pick(2) ? "a" : "b";
      case 3: return "(" + ie(d - 1, ints) + " + " + ie(d - 1, ints) + ")";
      case 4: return "(" + ie(d - 1, ints) + " - " + ie(d - 1, ints) + ")";
      case 5: return "m[" + ie(d - 1, ints) + "]";
      case 6: return "mm[" + ie(d - 1, ints) + "][" + ie(0, ints) + "]";
      case 7: return pick(2) ? "arr.length" : "bal[msg.sender]";
      default: return "(" + ie(d - 1, ints) + (pick(2) ? " / " : " % ") + ie(0, ints) + ")";
    }
  }

  std::string be(int d, const std::vector<std::string>& ints) {
    static const char* cmp[] = {"==", "!=", "<", "<=", ">", ">="};
    int c = pick(d <= 0 ? 2 : 5);
    switch (c) {
      case 0: return ie(1, ints) + " " + cmp[pick(6)] + " " + ie(1, ints);
      case 1: return pick(2) ? "o == msg.sender" : "o != address(0)";
      case 2: return "(" + be(d - 1, ints) + " && " + be(d - 1, ints) + ")";
      case 3: return "(" + be(d - 1, ints) + " || " + be(d - 1, ints) + ")";
      default: return "!(" + be(d - 1, ints) + ")";
    }
  }

  std::string stmt(int d, std::vector<std::string>& ints, const std::string& ind, bool in_helper) {
    --budget;
    int c = pick(d <= 0 || budget <= 0 ? 7 : 11);
    switch (c) {
      case 0: return ind + (pick(2) ? "a" : "b") + " = " + ie(2, ints) + ";\n";
      case 1: return ind + "m[" + ie(1, ints) + "] = " + ie(2, ints) + ";\n";
      case 2: return ind + "mm[" + ie(1, ints) + "][" + ie(1, ints) + "] = " + ie(1, ints) + ";\n";
      case 3: return ind + "arr.push(" + ie(1, ints) + ");\n";
      case 4: return ind + (pick(2) ? "o = msg.sender;\n" : "bal[msg.sender] = bal[msg.sender] + " + ie(1, ints) + ";\n");
      case 5: return ind + "require(" + be(1, ints) + ");\n";
      case 6:
        if (in_helper) return ind + "arr[" + ie(0, ints) + "] = " + ie(1, ints) + ";\n";
        return ind + (pick(2) ? "a" : "b") + " = helper(" + ie(1, ints) + ");\n";
      case 7:
      case 8: {
        std::string s = ind + "if (" + be(1, ints) + ") {\n" + stmt(d - 1, ints, ind + "  ", in_helper) + ind + "}";
        if (pick(2)) s += " else {\n" + stmt(d - 1, ints, ind + "  ", in_helper) + ind + "}";
        return s + "\n";
      }
      case 9: {
        std::string i = "i" + std::to_string(++loops);
        std::string s = ind + "int " + i + " = 0;\n" + ind + "while (" + i + " < " + std::to_string(1 + pick(3)) +
                        ") {\n";
        ints.push_back(i);
        s += stmt(d - 1, ints, ind + "  ", in_helper);
        ints.pop_back();
        return s + ind + "  " + i + " = " + i + " + 1;\n" + ind + "}\n";
      }
      default: return stmt(d - 1, ints, ind, in_helper) + stmt(d - 1, ints, ind, in_helper);
    }
  }

  std::string body(std::vector<std::string> ints, int n, bool in_helper) {
    std::string out;
    for (int i = 0; i < n && budget > 0; ++i) out += stmt(2, ints, "    ", in_helper);
    return out;
  }

  std::string program() {
    budget = 30;
    loops = 0;
    bool inherit = pick(2);
    std::string base = inherit ? "contract P {\n  int a;\n  int[] arr;\n  constructor() public {\n    a = 5;\n  }\n"
                                 "  function helper(int h) internal returns (int) {\n" +
                                     std::string("    return h + 1;\n  }\n}\n\n")
                               : "";
    std::string s = base + (inherit ? "contract R is P {\n" : "contract R {\n  int a;\n  int[] arr;\n");
    s += "  int b;\n  address o;\n  mapping(int => int) m;\n  mapping(int => mapping(int => int)) mm;\n"
         "  mapping(address => int) bal;\n\n";
    s += "  constructor(int x) public {\n" + body({"x"}, 3, false) + "  }\n\n";
    s += "  function f1(int p, int q) public {\n" + body({"p", "q"}, 4, false) + "  }\n\n";
    s += "  function f2(int p) public returns (int) {\n" + body({"p"}, 3, false) + "    return " +
         ie(2, {"p"}) + ";\n  }\n";
    if (!inherit) s += "\n  function helper(int h) internal returns (int) {\n" + body({"h"}, 2, true) + "    return h * 2;\n  }\n";
    return s + "}\n";
  }
};

struct Equivalence {
  int compared = 0;  // transactions completed on both sides
  std::vector<std::string> diffs;
};

// Deploys with a random argument, then runs `txs` random transactions on
// both sides, comparing outcomes, return values and every state variable.
inline Equivalence check_equivalent(const std::string& src, std::mt19937& rng, int txs) {
  Equivalence out;
  auto& diffs = out.diffs;
  auto same = [&](bool ok, const std::string& what) {
    if (!ok) diffs.push_back(src + "\n" + what);
  };
  sol::Program sp = typed(src);
  v::Program ip = with_create(trans::translate_program(sp), sp, "R");
  sol::Interpreter si(sp);
  v::RunOptions o;
  o.allow_defaults = true;
  int64_t x = static_cast<int64_t>(rng() % 5);
  int64_t sender = 1 + static_cast<int64_t>(rng() % 3);
  auto sr = si.create("R", {sol::Value::integer(x)}, sender);
  o.args = {x, sender};
  v::RunResult ir = v::interpret(ip, "__create", o);
  same(ir.outcome != v::RunResult::AssertFailed, "IR constructor assert failed");
  same((sr.outcome == sol::Interpreter::Outcome::Completed) == (ir.outcome == v::RunResult::Completed),
       "create(" + std::to_string(x) + ") outcome differs");
  if (sr.outcome != sol::Interpreter::Outcome::Completed || ir.outcome != v::RunResult::Completed) return out;
  int64_t self_s = sr.created, self_i = ir.returns[0];
  v::IrState st = ir.state;
  for (int k = 0; k < txs; ++k) {
    bool f1 = rng() % 2;
    int64_t p = static_cast<int64_t>(rng() % 7) - 2, q = static_cast<int64_t>(rng() % 7) - 2;
    sender = 1 + static_cast<int64_t>(rng() % 3);
    std::vector<sol::Value> sargs = {sol::Value::integer(p)};
    v::RunOptions co;
    co.allow_defaults = true;
    co.initial = st;
    co.args = {self_i, p};
    if (f1) {
      sargs.push_back(sol::Value::integer(q));
      co.args.push_back(q);
    }
    co.args.push_back(sender);
    auto s2 = si.call(self_s, f1 ? "f1" : "f2", sargs, sender);
    v::RunResult i2 = v::interpret(ip, f1 ? "R_f1" : "R_f2", co);
    std::string where = "tx " + std::to_string(k) + (f1 ? " f1" : " f2");
    same((s2.outcome == sol::Interpreter::Outcome::Completed) == (i2.outcome == v::RunResult::Completed),
         where + " outcome differs");
    if (i2.outcome != v::RunResult::Completed || s2.outcome != sol::Interpreter::Outcome::Completed) continue;
    ++out.compared;
    if (!f1) same(s2.ret.i == i2.returns[0], where + " return value differs");
    st = i2.state;
    Compare{sp, si.state(), st, src + "\n" + where, diffs}.instance("R", self_s, self_i);
  }
  Compare{sp, si.state(), st, src + "\nfinal", diffs}.instance("R", self_s, self_i);
  return out;
}

}  // namespace semantics
