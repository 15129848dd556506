#pragma once

// Pipeline loading and the two enumeration oracles for the verifier: an
// exhaustive transaction search over the reference interpreter, and a
// brute-force greatest inductive subset. Shared by the unit tests and the
// acceptance binary.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vsol/instrument.hpp"
#include "vsol/policy.hpp"
#include "vsol/sol.hpp"
#include "vsol/sol_interp.hpp"
#include "vsol/translate.hpp"
#include "vsol/verify.hpp"

namespace vtest {

using namespace vsol;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  sol::Program typed;  // instrumented when a policy was given
  trans::Translation t;
  std::string root;
  verify::CandidateScope scope;
  std::vector<verify::Candidate> cands;
};

inline Loaded load(const std::string& src, const std::string& root, const std::string& policy_json = "") {
  Loaded l;
  l.root = root;
  l.typed = sol::parse_contract(src);
  sol::typecheck(l.typed);
  if (!policy_json.empty()) {
    policy::Policy pol = policy::parse_policy(policy_json);
    l.typed = instr::instrument_for_conformance(l.typed, pol).program;
    l.scope = verify::scope_from_policy(l.typed, root, *pol.find_workflow(root));
  } else {
    l.scope = verify::scope_from_contract(l.typed, root);
  }
  l.t = trans::translate_program(l.typed);
  trans::generate_harness(l.t, l.typed, root);
  l.cands = verify::generate_candidates(l.typed, root, l.scope);
  return l;
}

// ---------------------------------------------------------------------------
// Exhaustive search over transaction sequences

struct Domain {
  std::vector<int64_t> ints = {0, 1, 2};  // int, enum and bool parameters (bools use 0, 1)
  std::vector<int64_t> addresses = {1, 2};
  std::vector<int64_t> senders = {1};
};

inline std::string state_key(const sol::SolState& st) {
  std::string k;
  for (const auto& [ref, o] : st.heap) {
    k += std::to_string(ref) + (o.instance ? "I" + o.contract : "M") + "{";
    for (const auto& [f, v] : o.fields) k += f + "=" + v.str() + ",";
    for (const auto& [key, v] : o.entries) k += key.str() + ":" + v.str() + ",";
    k += "#" + std::to_string(o.length) + "}";
  }
  return k;
}

inline std::vector<std::vector<sol::Value>> arg_tuples(const std::vector<sol::VarDecl>& params, const Domain& d) {
  std::vector<std::vector<sol::Value>> out = {{}};
  for (const auto& p : params) {
    std::vector<sol::Value> vals;
    switch (p.type->kind) {
      case sol::SolType::Address:
      case sol::SolType::Contract:
        for (int64_t a : d.addresses) vals.push_back(sol::Value::ref(a));
        break;
      case sol::SolType::Bool:
        vals = {sol::Value::integer(0), sol::Value::integer(1)};
        break;
      case sol::SolType::Int:
        for (int64_t i : d.ints) vals.push_back(sol::Value::integer(i));
        break;
      default: throw std::runtime_error("search domain has no values of type " + sol::print_type(p.type));
    }
    std::vector<std::vector<sol::Value>> next;
    for (const auto& prefix : out)
      for (const auto& v : vals) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

struct SearchResult {
  // Number of function calls after the constructor in the shortest failing
  // sequence (0: the constructor itself fails); -1 when none within the bound.
  int first_failure = -1;
  std::vector<std::string> witness;  // function names of that sequence
  size_t states = 0;                 // distinct states visited
};

// Breadth-first over all sequences constructor; f1; ...; fk with arguments
// and senders from `d`. Reverting calls leave the state unchanged.
inline SearchResult search(const sol::Program& typed, const std::string& root, int k, const Domain& d = {}) {
  sol::Interpreter in(typed);
  const sol::Contract* rc = typed.find(root);
  auto fns = sol::public_functions(typed, root);
  struct Node {
    sol::SolState st;
    int64_t self;
    std::vector<std::string> path;
  };
  SearchResult res;
  std::set<std::string> seen;
  std::vector<Node> frontier;
  for (const auto& args : arg_tuples(rc->ctor.params, d))
    for (int64_t sender : d.senders) {
      in.state() = sol::SolState{};
      auto r = in.create(root, args, sender);
      if (r.outcome == sol::Interpreter::Outcome::AssertFailed) {
        res.first_failure = 0;
        res.witness = {"constructor"};
        return res;
      }
      if (r.outcome != sol::Interpreter::Outcome::Completed) continue;
      if (seen.insert(state_key(in.state())).second) frontier.push_back({in.state(), r.created, {"constructor"}});
    }
  for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
    std::vector<Node> next;
    for (const auto& n : frontier)
      for (const auto& f : fns)
        for (const auto& args : arg_tuples(f.fn->params, d))
          for (int64_t sender : d.senders) {
            in.state() = n.st;
            auto r = in.call(n.self, f.fn->name, args, sender);
            if (r.outcome == sol::Interpreter::Outcome::AssertFailed) {
              res.first_failure = depth;
              res.witness = n.path;
              res.witness.push_back(f.fn->name);
              res.states = seen.size();
              return res;
            }
            if (r.outcome != sol::Interpreter::Outcome::Completed) continue;
            if (seen.insert(state_key(in.state())).second) {
              next.push_back({in.state(), n.self, n.path});
              next.back().path.push_back(f.fn->name);
            }
          }
    frontier = std::move(next);
  }
  res.states = seen.size();
  return res;
}

// ---------------------------------------------------------------------------
// Greatest inductive subset by enumeration

struct BruteHoudini {
  std::vector<size_t> greatest;
  size_t inductive_subsets = 0;
  bool union_closed = true;  // the union of all inductive subsets is inductive
};

// Checks each of the 2^n subsets with fresh establishment/preservation
// queries and returns the largest inductive one.
inline BruteHoudini brute_houdini(const Loaded& l, const smt::SolverConfig& cfg) {
  size_t n = l.cands.size();
  if (n > 10) throw std::runtime_error("pool too large for enumeration");
  BruteHoudini out;
  std::optional<uint32_t> best;
  uint32_t all = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<vir::ExprP> inv;
    for (size_t i = 0; i < n; ++i)
      if (mask >> i & 1) inv.push_back(l.cands[i].expr);
    if (!verify::invariant_holds(l.t.program, l.root, inv, cfg)) continue;
    ++out.inductive_subsets;
    all |= mask;
    if (!best || __builtin_popcount(mask) > __builtin_popcount(*best)) best = mask;
  }
  if (best && *best != all) out.union_closed = false;
  for (size_t i = 0; i < n; ++i)
    if (best && (*best >> i & 1)) out.greatest.push_back(i);
  return out;
}

}  // namespace vtest
