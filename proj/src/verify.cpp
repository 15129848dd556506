#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include "vsol/sol.hpp"
#include "vsol/verify.hpp"

namespace vsol::verify {

using vir::ExprP;
using vir::Stmt;
using vir::StmtP;
using vir::Type;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void dump(const smt::SolverConfig& cfg, const std::string& name, const std::string& script) {
  if (cfg.dump_dir.empty()) return;
  std::filesystem::create_directories(cfg.dump_dir);
  std::ofstream(std::filesystem::path(cfg.dump_dir) / (name + ".smt2")) << script << "(check-sat)\n";
}

std::string conj_terms(const std::vector<std::string>& ts) {
  std::string out = "(and true";
  for (const auto& t : ts) out += " " + t;
  return out + ")";
}

const StmtP* find_call(const StmtP& s) {
  if (!s) return nullptr;
  if (s->kind == Stmt::Call) return &s;
  for (const auto& b : s->body)
    if (const StmtP* c = find_call(b)) return c;
  return nullptr;
}

StmtP asserts_to_assumes(const StmtP& s) {
  if (!s) return s;
  auto c = std::make_shared<Stmt>(*s);
  if (s->kind == Stmt::Assert) {
    c->kind = Stmt::Assume;
    c->label.clear();
  }
  for (auto& b : c->body) b = asserts_to_assumes(b);
  c->then_s = asserts_to_assumes(s->then_s);
  c->else_s = asserts_to_assumes(s->else_s);
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Candidates

CandidateScope scope_from_policy(const sol::Program& typed, const std::string& root, const policy::Workflow& w) {
  CandidateScope s;
  for (const auto& ir : w.instance_roles) s.roles.push_back(ir.var);
  auto sv = sol::state_variable(typed, root);
  if (sv.decl) s.state_var = sv.decl->name;
  return s;
}

CandidateScope scope_from_contract(const sol::Program& typed, const std::string& root) {
  CandidateScope s;
  for (const auto& v : sol::all_state_vars(typed, root))
    if (v.decl->type->kind == sol::SolType::Address) s.roles.push_back(v.decl->name);
  auto sv = sol::state_variable(typed, root);
  if (sv.decl) s.state_var = sv.decl->name;
  return s;
}

std::vector<Candidate> generate_candidates(const sol::Program& typed, const std::string& root,
                                           const CandidateScope& scope) {
  ExprP self = vir::var("this", Type::ref());
  auto read = [&](const std::string& v) {
    auto sv = sol::resolve_state_var(typed, root, v);
    if (!sv.decl) throw Error("TypeError", "no state variable " + v + " in " + root);
    return vir::select(trans::state_map(v, sv.owner), {self}, trans::map_type(sv.decl->type));
  };
  std::vector<Candidate> out;
  std::set<std::string> seen;
  auto add = [&](ExprP e, std::string text) {
    if (seen.insert(vir::print_expr(e)).second) out.push_back({std::move(e), std::move(text)});
  };
  const auto& r = scope.roles;
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = i + 1; j < r.size(); ++j) {
      add(vir::op("==", read(r[i]), read(r[j])), r[i] + " == " + r[j]);
      add(vir::op("!=", read(r[i]), read(r[j])), r[i] + " != " + r[j]);
    }
  for (const auto& x : r) {
    add(vir::op("==", read(x), vir::null_const()), x + " == 0x0");
    add(vir::op("!=", read(x), vir::null_const()), x + " != 0x0");
  }
  if (!scope.state_var.empty()) {
    auto sv = sol::resolve_state_var(typed, root, scope.state_var);
    const sol::EnumDef* en = sv.decl ? sol::resolve_enum(typed, root, sv.decl->type->name) : nullptr;
    if (!en) throw Error("TypeError", "state variable " + scope.state_var + " is not enum-typed");
    for (size_t k = 0; k < en->members.size(); ++k) {
      ExprP s = read(scope.state_var), c = vir::int_const(static_cast<int64_t>(k));
      add(vir::op("==", s, c), scope.state_var + " == " + en->members[k]);
      add(vir::op("!=", s, c), scope.state_var + " != " + en->members[k]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Modular checks

HarnessParts harness_parts(const vir::Procedure& main) {
  HarnessParts hp;
  std::vector<StmtP> prefix;
  StmtP loop;
  const auto& top = main.body->kind == Stmt::Seq ? main.body->body : std::vector<StmtP>{main.body};
  for (const auto& s : top) {
    if (s->kind == Stmt::While) {
      loop = s;
      break;
    }
    prefix.push_back(s);
  }
  hp.prefix = vir::seq(prefix);
  std::function<void(const StmtP&)> walk = [&](const StmtP& s) {
    if (!s) return;
    if (s->kind == Stmt::Seq) {
      for (const auto& b : s->body) walk(b);
    } else if (s->kind == Stmt::If) {
      hp.branches.push_back(s->then_s);
      walk(s->else_s);
    }
  };
  if (loop) walk(loop->then_s);
  return hp;
}

std::vector<ModularCheck> modular_checks(const vir::Program& p, const std::string& root,
                                         const std::vector<ExprP>* invariant, const FlattenOptions& o) {
  const vir::Procedure* main = p.find_proc("main");
  if (!main) throw Error("IrTypeError", "program has no harness");
  HarnessParts hp = harness_parts(*main);

  auto finish = [&](ModularCheck& mc, const StmtP& body) {
    vir::Procedure shell = *main;
    shell.body = body;
    vir::Procedure flat = flatten(p, shell, o);
    StmtP b = flat.body;
    if (invariant) {
      std::vector<StmtP> tail = {asserts_to_assumes(b)};
      for (size_t i = 0; i < invariant->size(); ++i)
        tail.push_back(vir::assert_((*invariant)[i], "invariant " + std::to_string(i)));
      b = vir::seq(tail);
    }
    mc.body = b;
    mc.proc = flat;
    mc.proc.name = mc.name;
    mc.proc.body = mc.setup ? vir::seq({mc.setup, b}) : b;
  };

  std::vector<ModularCheck> out;
  ModularCheck ctor;
  ctor.name = "constructor";
  finish(ctor, hp.prefix);
  out.push_back(std::move(ctor));

  ExprP self = vir::var("this", Type::ref());
  for (const auto& br : hp.branches) {
    ModularCheck mc;
    const StmtP* call = find_call(br);
    mc.name = call ? (*call)->name : "branch" + std::to_string(out.size());
    std::vector<StmtP> setup = {
        vir::havoc("this"),
        vir::assume(vir::op("!=", self, vir::null_const())),
        vir::assume(vir::select("Alloc", {vir::null_const()}, Type::boolean())),
        vir::assume(vir::select("Alloc", {self}, Type::boolean())),
        vir::assume(vir::op("==", vir::select("DType", {self}, Type::integer()), vir::var(root, Type::integer()))),
    };
    if (invariant)
      for (const auto& e : *invariant) setup.push_back(vir::assume(e));
    mc.setup = vir::seq(setup);
    finish(mc, br);
    out.push_back(std::move(mc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Houdini

HoudiniResult houdini(const vir::Program& p, const std::string& root, const std::vector<Candidate>& cands,
                      const smt::SolverConfig& cfg) {
  struct Check {
    std::string name;
    std::unique_ptr<smt::Session> session;
    std::string base;
    bool has_entry = false;
    std::vector<std::string> in, out;  // per candidate
    std::string reach, fail;
  };
  std::vector<Check> checks;
  for (auto& mc : modular_checks(p, root, nullptr)) {
    Check c;
    c.name = mc.name;
    Encoder enc(p, mc.proc);
    if (mc.setup) enc.run(mc.setup);
    Encoder::Env entry = enc.env();
    c.has_entry = mc.setup != nullptr;
    enc.run(mc.body);
    std::string defs;
    for (size_t i = 0; i < cands.size(); ++i) {
      std::string in = "|!in" + std::to_string(i) + "|", out = "|!out" + std::to_string(i) + "|";
      if (c.has_entry) defs += "(define-fun " + in + " () Bool " + enc.term(cands[i].expr, entry) + ")\n";
      defs += "(define-fun " + out + " () Bool " + enc.term(cands[i].expr) + ")\n";
      c.in.push_back(in);
      c.out.push_back(out);
    }
    SmtQuery q = enc.query();
    std::string fails;
    for (const auto& a : q.asserts) fails += " " + a.fail;
    defs += "(define-fun |!exit| () Bool " + enc.reach() + ")\n";
    defs += "(define-fun |!fail| () Bool (or false" + fails + "))\n";
    c.base = enc.script() + defs;
    c.session = std::make_unique<smt::Session>(cfg);
    c.session->send(c.base);
    checks.push_back(std::move(c));
  }

  auto entry_of = [](const Check& c, const std::vector<size_t>& S) {
    std::vector<std::string> ts;
    if (c.has_entry)
      for (size_t i : S) ts.push_back(c.in[i]);
    return "(assert " + conj_terms(ts) + ")\n";
  };
  auto ask = [&](Check& c, const std::string& assertions, const std::string& tag) {
    if (!c.session->alive()) c.session->restart();
    dump(cfg, c.name + "_" + tag, c.base + assertions);
    c.session->send("(push 1)\n" + assertions);
    smt::Status st = c.session->check();
    return st;
  };
  auto done = [](Check& c) {
    if (c.session->alive()) c.session->send("(pop 1)\n");
  };

  HoudiniResult res;
  std::vector<size_t> S(cands.size());
  for (size_t i = 0; i < S.size(); ++i) S[i] = i;
  for (;;) {
    ++res.rounds;
    std::set<size_t> removed;
    for (auto& c : checks) {
      std::vector<std::string> outs;
      for (size_t i : S) outs.push_back(c.out[i]);
      std::string goal = entry_of(c, S) + "(assert (and |!exit| (not " + conj_terms(outs) + ")))\n";
      smt::Status st = ask(c, goal, "houdini_" + std::to_string(res.rounds));
      if (st == smt::Status::Sat) {
        auto vals = c.session->get_values(outs);
        bool any = false;
        for (size_t i : S)
          if (vals.at(c.out[i]) == "false") removed.insert(i), any = true;
        if (!any) throw Error("SolverError", "model of " + c.name + " refutes no candidate");
        done(c);
      } else if (st == smt::Status::Unknown) {
        done(c);
        // Find out candidate by candidate; Unknown counts as refuted.
        for (size_t i : S) {
          std::string one = entry_of(c, S) + "(assert (and |!exit| (not " + c.out[i] + ")))\n";
          if (ask(c, one, "houdini_" + std::to_string(res.rounds) + "_" + std::to_string(i)) != smt::Status::Unsat)
            removed.insert(i);
          done(c);
        }
      } else {
        done(c);
      }
    }
    if (removed.empty()) break;
    std::vector<size_t> next;
    for (size_t i : S)
      if (!removed.count(i)) next.push_back(i);
    S = next;
    res.pool_sizes.push_back(S.size());
  }
  res.kept = S;

  res.asserts_verified = true;
  for (auto& c : checks) {
    smt::Status st = ask(c, entry_of(c, S) + "(assert |!fail|)\n", "asserts");
    done(c);
    if (st != smt::Status::Unsat) {
      res.asserts_verified = false;
      break;
    }
  }
  return res;
}

bool invariant_holds(const vir::Program& p, const std::string& root, const std::vector<ExprP>& inv,
                     const smt::SolverConfig& cfg) {
  for (const auto& mc : modular_checks(p, root, &inv)) {
    SmtQuery q = vc_gen(p, mc.proc);
    if (smt::check_script(q.script, cfg, {}, mc.name + "_recheck_0").status != smt::Status::Unsat) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// BMC

Trace replay(const trans::Translation& t, const std::vector<int64_t>& tape, int stmt_id) {
  vir::RunOptions opt;
  opt.tape = tape;
  vir::RunResult r;
  try {
    r = vir::interpret(t.program, "main", opt);
  } catch (const Error& e) {
    throw Error("ReplayMismatch", "replay stopped: " + std::string(e.what()));
  }
  if (r.outcome != vir::RunResult::AssertFailed || r.stmt_id != stmt_id)
    throw Error("ReplayMismatch", "expected assertion failure at statement " + std::to_string(stmt_id) + ", replay ended " +
                                      vir::to_string(r.outcome) + " at statement " + std::to_string(r.stmt_id));
  if (r.consumed.size() != tape.size())
    throw Error("ReplayMismatch", "replay used " + std::to_string(r.consumed.size()) + " of " +
                                      std::to_string(tape.size()) + " havoc values");
  Trace tr;
  tr.label = r.label;
  tr.stmt_id = r.stmt_id;
  tr.tape = tape;
  for (const auto& ev : r.calls) {
    if (ev.depth != 1) continue;
    auto it = t.entry_points.find(ev.proc);
    if (it == t.entry_points.end()) continue;
    Transaction tx;
    tx.function = it->second;
    tx.proc = ev.proc;
    if (ev.args.size() >= 2) {
      tx.sender = ev.args.back();
      tx.args.assign(ev.args.begin() + 1, ev.args.end() - 1);
    }
    tx.nondet.assign(r.consumed.begin() + static_cast<long>(ev.tape_begin),
                     r.consumed.begin() + static_cast<long>(ev.tape_end));
    tr.txs.push_back(std::move(tx));
  }
  return tr;
}

BmcResult bmc(const trans::Translation& t, int k, const BmcOptions& o) {
  const vir::Procedure* main = t.program.find_proc("main");
  if (!main) throw Error("IrTypeError", "program has no harness");
  FlattenOptions fo = o.flatten;
  fo.loops = FlattenOptions::Loops::Unroll;
  vir::Procedure flat = unroll_harness(t.program, *main, k, fo);
  const std::string tag = "main_bmc_" + std::to_string(k);

  BmcResult out;
  const SmtQuery q = vc_gen(t.program, flat);
  std::vector<std::string> want;
  std::set<std::string> seen;
  auto need = [&](const std::string& n) {
    if (n != "true" && seen.insert(n).second) want.push_back(n);
  };
  for (const auto& h : q.havocs) need(h.smt), need(h.reach);
  for (const auto& a : q.asserts) need(a.fail);
  smt::Result r = smt::check_script(q.script, o.solver, want, tag);
  out.status = r.status;
  if (r.status != smt::Status::Sat) return out;

  auto truth = [&](const std::string& n) { return n == "true" || r.values.at(n) == "true"; };
  const AssertSite* failed = nullptr;
  for (const auto& a : q.asserts)
    if (truth(a.fail)) {
      failed = &a;
      break;
    }
  if (!failed) throw Error("SolverError", "model violates no assertion");
  std::vector<int64_t> tape;
  for (const auto& h : q.havocs)
    if (truth(h.reach)) tape.push_back(smt::value_of(r.values.at(h.smt)));
  if (!q.weakened) {
    out.trace = replay(t, tape, failed->stmt_id);
    return out;
  }
  // The instantiated query admits more than the program does; the model
  // counts only if the interpreter reproduces it.
  try {
    out.trace = replay(t, tape, failed->stmt_id);
  } catch (const Error& e) {
    if (e.kind() != "ReplayMismatch") throw;
    out.status = smt::Status::Unknown;
    out.unconfirmed = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Driver

std::string to_string(VerifyResult::Verdict v) {
  switch (v) {
    case VerifyResult::FullyVerified: return "FullyVerified";
    case VerifyResult::Refuted: return "Refuted";
    case VerifyResult::PartiallyVerified: return "PartiallyVerified";
  }
  return "?";
}

VerifyResult verify(const trans::Translation& t, const std::string& root, const std::vector<Candidate>& cands,
                    const VerifyOptions& o) {
  VerifyResult res;
  auto t0 = std::chrono::steady_clock::now();
  if (o.houdini) {
    HoudiniResult h = houdini(t.program, root, cands, o.solver);
    for (size_t i : h.kept) res.invariant.push_back(cands[i]);
    res.houdini_sufficient = h.asserts_verified;
    res.houdini_seconds = seconds_since(t0);
    if (h.asserts_verified) {
      res.verdict = VerifyResult::FullyVerified;
      return res;
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  BmcOptions bo{o.solver, o.flatten};
  res.verdict = VerifyResult::PartiallyVerified;
  for (int k = 1; k <= o.k_max; ++k) {
    BmcResult b = bmc(t, k, bo);
    if (b.status == smt::Status::Sat) {
      res.verdict = VerifyResult::Refuted;
      res.bound = k;
      res.trace = b.trace;
      break;
    }
    if (b.status == smt::Status::Unknown) break;  // safe only up to k - 1
    res.bound = k;
  }
  res.bmc_seconds = seconds_since(t1);
  return res;
}

}  // namespace vsol::verify
