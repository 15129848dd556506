#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vsol/smt.hpp"
#include "vsol/sol_ast.hpp"
#include "vsol/translate.hpp"
#include "vsol/vir.hpp"

namespace vsol::verify {

// ---------------------------------------------------------------------------
// Loop and call elimination

struct FlattenOptions {
  enum class Loops { Unroll, Cut };
  // Unroll: `depth` copies of each inner loop, then assume !guard.
  // Cut: havoc what the body writes, check one arbitrary iteration, then
  // assume !guard. Over-approximates; used for the modular checks.
  Loops loops = Loops::Unroll;
  int unroll_depth = 8;
  int recursion_limit = 8;  // nested activations of one procedure
};

// The harness with its top-level loop replaced by k copies of the loop body.
// Calls are left in place.
vir::Procedure unroll_loop(const vir::Procedure& harness, int k);

// Inlines every call transitively (callee variables become name#n) and
// removes inner loops. Statement ids of copied statements are kept, so an
// assert in the result names its source statement.
// Throws RecursionDepthExceeded.
vir::Procedure flatten(const vir::Program& p, const vir::Procedure& proc, const FlattenOptions& o = {});

vir::Procedure unroll_harness(const vir::Program& p, const vir::Procedure& harness, int k,
                              const FlattenOptions& o = {});

// ---------------------------------------------------------------------------
// Verification conditions

struct HavocSite {
  int stmt_id = 0;
  std::string var;    // IR variable
  std::string smt;    // its fresh constant
  std::string reach;  // true iff the havoc executes
  vir::TypeP type;
};

struct AssertSite {
  int stmt_id = 0;
  std::string label;
  std::string fail;  // true iff this assert is reached and violated
};

struct SmtQuery {
  std::string logic;
  std::string script;   // declarations and the goal, without check-sat
  std::string prelude;  // script without the goal
  std::map<std::string, std::string> symbols;  // SMT constant -> IR symbol
  std::vector<HavocSite> havocs;               // scalar havocs in program order
  std::vector<AssertSite> asserts;
  // Some quantified assumption was replaced by finitely many instances: the
  // query is weaker than the program, so a model may not be an execution.
  bool weakened = false;
};

// How quantified assumptions (allocation facts about fresh maps) reach the
// solver. Instantiate: each one becomes its instances over every ground key
// term the query uses, which keeps the query quantifier-free and decidable;
// Unsat carries over, a model has to be confirmed by replay. Patterns: the
// quantifier itself with an e-matching trigger; exact, but the solver cannot
// produce models for it and tends to answer unknown on satisfiable queries.
enum class Quantifiers { Instantiate, Patterns };

// Symbolic execution of a loop-free, call-free procedure in single
// assignment form: every statement defines fresh constants, a path
// condition tracks reachability, and each assert contributes the condition
// under which it fails. Globals and parameters start unconstrained, scalar
// locals start at 0 / false / null.
class Encoder {
 public:
  using Env = std::map<std::string, std::string>;

  Encoder(const vir::Program& p, const vir::Procedure& proc, Quantifiers q = Quantifiers::Instantiate);
  void run(const vir::StmtP& s);

  std::string term(const vir::ExprP& e) const { return term(e, env_); }
  std::string term(const vir::ExprP& e, const Env& env) const;
  const Env& env() const { return env_; }
  const std::string& reach() const { return reach_; }

  // set-logic plus everything emitted so far. Instances are generated here,
  // over the key terms of everything encoded up to this point.
  std::string script() const;
  std::string logic() const;
  bool weakened() const { return !pending_.empty(); }
  SmtQuery query() const;  // goal: some assert fails

 private:
  std::string walk(const vir::ExprP& e, const Env& env, const std::set<std::string>& bound) const;
  // Instantiate mode: records a top-level quantifier for script().
  bool assume_quantified(const std::string& guard, const vir::ExprP& e);
  std::string fresh(const std::string& base);
  std::string define(const std::string& var, const std::string& sort, const std::string& value);
  std::string sort(const vir::TypeP& t) const;
  vir::TypeP var_type(const std::string& n) const;
  void exec(const vir::StmtP& s);

  const vir::Program& p_;
  const vir::Procedure& proc_;
  std::string out_;
  Env env_;
  std::string reach_ = "true";
  int counter_ = 0;
  mutable bool nonlinear_ = false;
  mutable bool quantified_ = false;  // a quantifier went to the solver as such
  Quantifiers mode_;
  struct Pending {
    std::string guard;
    std::vector<std::string> binders;  // as printed in body
    std::string body;
  };
  std::vector<Pending> pending_;
  mutable std::vector<std::string> keys_;  // ground map keys, first use order
  mutable std::set<std::string> key_set_;
  std::map<std::string, std::string> symbols_;
  std::vector<HavocSite> havocs_;
  std::vector<AssertSite> asserts_;
};

// Satisfiable iff some execution of `proc` violates an assert.
SmtQuery vc_gen(const vir::Program& p, const vir::Procedure& proc, Quantifiers q = Quantifiers::Instantiate);

// ---------------------------------------------------------------------------
// Invariant inference

struct Candidate {
  vir::ExprP expr;   // over `this` and the state maps
  std::string text;  // source-level rendering, e.g. InstanceOwner != 0x0
};

// Role variables (address state variables) and the state variable whose
// relations make up the candidate pool.
struct CandidateScope {
  std::vector<std::string> roles;
  std::string state_var;  // empty: no state predicates
};

CandidateScope scope_from_policy(const sol::Program& typed, const std::string& root, const policy::Workflow& w);
// Without a policy: every address-typed state variable and the workflow
// state variable, if the contract has one.
CandidateScope scope_from_contract(const sol::Program& typed, const std::string& root);

// x == y and x != y for each pair of roles, x == 0x0 and x != 0x0 for each
// role, State == s and State != s for each state; in that order, without
// duplicates.
std::vector<Candidate> generate_candidates(const sol::Program& typed, const std::string& root,
                                           const CandidateScope& scope);

// The pieces of a harness `main` the modular checks reuse.
struct HarnessParts {
  vir::StmtP prefix;                // up to and including the constructor call
  std::vector<vir::StmtP> branches;  // one block per public function
};
HarnessParts harness_parts(const vir::Procedure& main);

// The procedures the modular checks are made of. The constructor check runs
// the harness prefix; each function check starts from an arbitrary state of
// an allocated `this` of the root type and runs one dispatch branch. Loops
// are cut. With `invariant` set, it is assumed at function entry (as IR
// assumes) and asserted at every exit, and the bodies' own asserts become
// assumes: an independent route to checking inductiveness.
struct ModularCheck {
  std::string name;
  vir::Procedure proc;
  vir::StmtP setup, body;  // setup is empty for the constructor check
};
std::vector<ModularCheck> modular_checks(const vir::Program& p, const std::string& root,
                                         const std::vector<vir::ExprP>* invariant = nullptr,
                                         const FlattenOptions& o = {FlattenOptions::Loops::Cut});

struct HoudiniResult {
  std::vector<size_t> kept;  // indices into the candidate list
  bool asserts_verified = false;
  int rounds = 0;
  std::vector<size_t> pool_sizes;  // retained set size after each round
};

// Greatest subset of `cands` that the constructor establishes and every
// public function preserves, by iterated batch removal. A solver Unknown
// removes the candidates it concerns.
HoudiniResult houdini(const vir::Program& p, const std::string& root, const std::vector<Candidate>& cands,
                      const smt::SolverConfig& cfg);

// Independent re-check of constructor establishment and preservation with
// plain vc_gen queries. True iff every query is Unsat.
bool invariant_holds(const vir::Program& p, const std::string& root, const std::vector<vir::ExprP>& inv,
                     const smt::SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Bounded model checking

struct Transaction {
  std::string function;  // source name; "constructor" for the constructor
  std::string proc;
  int64_t sender = 0;
  std::vector<int64_t> args;
  std::vector<int64_t> nondet;  // havoc values consumed inside the call
};

struct Trace {
  std::vector<Transaction> txs;
  std::string label;  // failing assert
  int stmt_id = 0;
  std::vector<int64_t> tape;  // every havoc value of the run, in order
};

// Replays `tape` through `main` in the reference interpreter. Throws
// ReplayMismatch unless the run ends in AssertFailed at `stmt_id`.
Trace replay(const trans::Translation& t, const std::vector<int64_t>& tape, int stmt_id);

struct BmcResult {
  smt::Status status = smt::Status::Unsat;  // Sat: a violation within k
  std::optional<Trace> trace;
  bool unconfirmed = false;  // Unknown because replay rejected the model
};

struct BmcOptions {
  smt::SolverConfig solver;
  FlattenOptions flatten;
};

BmcResult bmc(const trans::Translation& t, int k, const BmcOptions& o);

// ---------------------------------------------------------------------------
// Driver

struct VerifyOptions {
  smt::SolverConfig solver;
  int k_max = 6;
  FlattenOptions flatten;
  bool houdini = true;
};

struct VerifyResult {
  enum Verdict { FullyVerified, Refuted, PartiallyVerified };
  Verdict verdict = PartiallyVerified;
  std::vector<Candidate> invariant;  // Houdini's result, also when not sufficient
  bool houdini_sufficient = false;
  int bound = 0;  // Refuted: k of the violation; PartiallyVerified: k_max
  std::optional<Trace> trace;
  double houdini_seconds = 0, bmc_seconds = 0;
};

std::string to_string(VerifyResult::Verdict v);

// `t` must contain the harness. Candidates come from the caller.
VerifyResult verify(const trans::Translation& t, const std::string& root, const std::vector<Candidate>& cands,
                    const VerifyOptions& o);

}  // namespace vsol::verify
