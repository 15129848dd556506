#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "test_util.hpp"
#include "truth_table.hpp"
#include "vsol/instrument.hpp"
#include "vsol/sol.hpp"
#include "vsol/sol_interp.hpp"

using namespace vsol;
using namespace vsol::sol;
using namespace vsol::instr;

namespace {

policy::Policy hello_policy() { return policy::parse_policy(read_fixture("HelloBlockchain.json")); }

Program typed_fixture(const std::string& name) {
  Program p = parse_contract(read_fixture(name));
  typecheck(p);
  return p;
}

const Modifier* modifier(const Program& p, const std::string& c, const std::string& m) {
  for (const auto& x : p.find(c)->modifiers)
    if (x.name == m) return &x;
  return nullptr;
}

void collect_checks(const StmtP& s, std::vector<ExprP>& out) {
  if (!s) return;
  if (s->kind == Stmt::Assert || s->kind == Stmt::Require) out.push_back(s->cond);
  for (const auto& b : s->body) collect_checks(b, out);
  collect_checks(s->then_s, out);
  collect_checks(s->else_s, out);
}

std::vector<ExprP> all_checks(const Program& p) {
  std::vector<ExprP> out;
  for (const auto& c : p.contracts) {
    collect_checks(c.ctor.body, out);
    for (const auto& f : c.functions) collect_checks(f.body, out);
    for (const auto& m : c.modifiers) collect_checks(m.body, out);
  }
  return out;
}

size_t count_kind(const StmtP& s, Stmt::Kind k) {
  if (!s) return 0;
  size_t n = s->kind == k;
  for (const auto& b : s->body) n += count_kind(b, k);
  return n + count_kind(s->then_s, k) + count_kind(s->else_s, k);
}

}  // namespace

TEST(AccessPredicate, Cases) {
  auto pol = hello_policy();
  const auto& w = pol.workflows[0];
  EXPECT_EQ(print_expr(access_predicate({}, w)), "false");
  EXPECT_EQ(print_expr(access_predicate({{}, {"Requestor"}}, w)), "msg.sender == Requestor");
  EXPECT_EQ(print_expr(access_predicate({{"Responder"}, {"Requestor"}}, w)), "nondet() || msg.sender == Requestor");
  EXPECT_EQ(print_expr(access_predicate({{}, {"Responder", "Requestor"}}, w)),
            "msg.sender == Requestor || msg.sender == Responder");
  EXPECT_THROW(access_predicate({{}, {"Ghost"}}, w), Error);
}

TEST(StatePredicate, Cases) {
  auto pol = hello_policy();
  const auto& w = pol.workflows[0];
  EXPECT_EQ(print_expr(state_predicate({"Request"}, w)), "State == StateType.Request");
  EXPECT_EQ(print_expr(state_predicate({}, w)), "false");
  EXPECT_EQ(print_expr(state_predicate({"Respond", "Request"}, w)),
            "State == StateType.Request || State == StateType.Respond");
  try {
    state_predicate({"Nowhere"}, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "UnknownState");
  }
}

TEST(Instrument, HelloBlockchainCheckers) {
  auto r = instrument_for_conformance(typed_fixture("HelloBlockchain.sol"), hello_policy());
  const Program& p = r.program;
  const Contract& c = *p.find("HelloBlockchain");
  ASSERT_EQ(c.modifiers.size(), 3u);
  EXPECT_EQ(print_stmt(modifier(p, "HelloBlockchain", "constructor_checker")->body),
            "{\n"
            "    _;\n"
            "    assert(nondet() ==> State == StateType.Request);\n"
            "}\n");
  EXPECT_EQ(print_stmt(modifier(p, "HelloBlockchain", "SendRequest_checker")->body),
            "{\n"
            "    StateType oldState = State;\n"
            "    address oldRequestor = Requestor;\n"
            "    address oldResponder = Responder;\n"
            "    _;\n"
            "    assert(msg.sender == oldRequestor && oldState == StateType.Respond ==> State == StateType.Request);\n"
            "}\n");
  EXPECT_EQ(print_stmt(modifier(p, "HelloBlockchain", "SendResponse_checker")->body),
            "{\n"
            "    StateType oldState = State;\n"
            "    address oldRequestor = Requestor;\n"
            "    address oldResponder = Responder;\n"
            "    _;\n"
            "    assert(nondet() && oldState == StateType.Request ==> State == StateType.Respond);\n"
            "}\n");
  EXPECT_EQ(c.ctor.modifiers.at(0).name, "constructor_checker");
  EXPECT_EQ(c.find_function("SendRequest")->modifiers.at(0).name, "SendRequest_checker");
  EXPECT_TRUE(r.notes.empty());
}

TEST(Instrument, ZeroTransitionsOnlyConstructor) {
  auto pol = hello_policy();
  pol.workflows[0].transitions.clear();
  auto r = instrument_for_conformance(typed_fixture("HelloBlockchain.sol"), pol);
  EXPECT_EQ(r.program.find("HelloBlockchain")->modifiers.size(), 1u);
  EXPECT_EQ(r.notes.size(), 2u);
  EXPECT_EQ(r.notes[0].kind, "NoTransitions");
}

TEST(Instrument, NonConformantRejected) {
  Program p = parse_contract("contract HelloBlockchain { }");
  EXPECT_THROW(instrument_for_conformance(p, hello_policy()), Error);
}

TEST(Instrument, AssertionCountAndSnapshots) {
  for (auto [sol, json] : {std::pair{"HelloBlockchain.sol", "HelloBlockchain.json"},
                           std::pair{"AssetTransfer.sol", "AssetTransfer.json"}}) {
    auto pol = policy::parse_policy(read_fixture(json));
    Program orig = typed_fixture(sol);
    auto r = instrument_for_conformance(orig, pol);
    const auto& w = pol.workflows[0];
    const Contract& c = *r.program.find(w.name);
    size_t inserted = 0;
    for (const auto& m : c.modifiers) {
      if (m.name == "constructor_checker") {
        EXPECT_EQ(count_kind(m.body, Stmt::Assert), 1u);
        continue;
      }
      inserted += count_kind(m.body, Stmt::Assert);
    }
    // Sum over functions of |gamma^g|.
    EXPECT_EQ(inserted, w.transitions.size()) << sol;

    // After desugaring, each old local is declared once, ahead of the body.
    Program d = clone(r.program);
    desugar_modifiers(d);
    for (const auto& f : d.find(w.name)->functions) {
      if (policy::transitions_for_function(w, f.name).empty()) continue;
      const auto& body = f.body->body;
      size_t snaps = 1 + w.instance_roles.size();
      ASSERT_GE(body.size(), snaps);
      std::set<std::string> seen;
      for (size_t i = 0; i < snaps; ++i) {
        EXPECT_EQ(body[i]->kind, Stmt::VarDecl);
        EXPECT_EQ(body[i]->name.rfind("old", 0), 0u);
        EXPECT_TRUE(seen.insert(body[i]->name).second);
      }
      std::function<void(const StmtP&)> no_old_writes = [&](const StmtP& s) {
        if (!s) return;
        if (s->kind == Stmt::Assign && s->lhs->kind == Expr::Ident) {
          EXPECT_FALSE(seen.count(s->lhs->name));
        }
        for (const auto& b : s->body) no_old_writes(b);
        no_old_writes(s->then_s);
        no_old_writes(s->else_s);
      };
      no_old_writes(f.body);
    }
  }
}

TEST(Instrument, AcceptGetsOneAssertionPerTransition) {
  auto pol = policy::parse_policy(read_fixture("AssetTransfer.json"));
  auto r = instrument_for_conformance(typed_fixture("AssetTransfer.sol"), pol);
  const Modifier* m = modifier(r.program, "AssetTransfer", "Accept_checker");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(count_kind(m->body, Stmt::Assert), 3u);
  std::string text = print_stmt(m->body);
  EXPECT_NE(text.find("assert(msg.sender == oldInstanceOwner && oldState == StateType.BuyerAccepted ==> State == "
                      "StateType.SellerAccepted);"),
            std::string::npos)
      << text;
}

TEST(Instrument, InstrumentedProgramRunsInReferenceInterpreter) {
  // The buggy Accept fails its checker assertion on the deep path.
  auto pol = policy::parse_policy(read_fixture("AssetTransfer.json"));
  for (bool buggy : {true, false}) {
    auto r = instrument_for_conformance(typed_fixture(buggy ? "AssetTransfer.sol" : "AssetTransferFixed.sol"), pol);
    Program p = clone(r.program);
    desugar_modifiers(p);
    typecheck(p);
    Interpreter in(p);
    in.set_nondet([] { return true; });
    const int64_t owner = 1, buyer = 2, insp = 3, appr = 4;
    auto c = in.create("AssetTransfer", {Value::str("house"), Value::integer(100)}, owner);
    ASSERT_EQ(c.outcome, Interpreter::Outcome::Completed);
    using O = Interpreter::Outcome;
    auto ok = [&](const char* f, std::vector<Value> args, int64_t s) { return in.call(c.created, f, args, s).outcome; };
    EXPECT_EQ(ok("MakeOffer", {Value::ref(insp), Value::ref(appr), Value::integer(90)}, buyer), O::Completed);
    EXPECT_EQ(ok("AcceptOffer", {}, owner), O::Completed);
    EXPECT_EQ(ok("MarkInspected", {}, insp), O::Completed);
    EXPECT_EQ(ok("MarkAppraised", {}, appr), O::Completed);
    EXPECT_EQ(ok("Accept", {}, buyer), O::Completed);
    EXPECT_EQ(ok("Accept", {}, owner), buggy ? O::AssertFailed : O::Completed);
  }
}

TEST(RuntimeChecks, HelloBlockchain) {
  auto r = instrument_for_conformance(typed_fixture("HelloBlockchain.sol"), hello_policy());
  Program rt = make_runtime_checks(r.program);
  EXPECT_EQ(count_nondet(rt), 0u);
  EXPECT_EQ(print_stmt(modifier(rt, "HelloBlockchain", "SendResponse_checker")->body->body.back()), "assert(true);\n");
  EXPECT_EQ(print_stmt(modifier(rt, "HelloBlockchain", "constructor_checker")->body->body.back()), "assert(true);\n");
  // No nondet: the check survives in NNF.
  EXPECT_EQ(print_stmt(modifier(rt, "HelloBlockchain", "SendRequest_checker")->body->body.back()),
            "assert(msg.sender != oldRequestor || oldState != StateType.Respond || State == StateType.Request);\n");
}

TEST(RuntimeChecks, NondetInDisjunctionWithNegation) {
  // !nondet() || Q: the nondet literal is replaced by true, so the check is
  // dropped; true is implied by both valuations.
  Program p = parse_contract("contract A { int x; function f() public { assert(!nondet() || x == 1); } }");
  typecheck(p);
  Program rt = make_runtime_checks(p);
  auto before = all_checks(p), after = all_checks(rt);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(print_expr(after[0]), "true");
  int k = 0;
  EXPECT_TRUE(tt::weakening_holds(before[0], after[0], &k));
  EXPECT_EQ(k, 1);
}

TEST(RuntimeChecks, NoNondetUnchangedModuloNnf) {
  Program p = parse_contract(
      "contract A { int x; function f() public { assert(!(x == 1 && x < 3)); require(x >= 0 ==> !(x > 5)); } }");
  typecheck(p);
  Program rt = make_runtime_checks(p);
  auto after = all_checks(rt);
  EXPECT_EQ(print_expr(after[0]), "x != 1 || x >= 3");
  EXPECT_EQ(print_expr(after[1]), "x < 0 || x <= 5");
}

TEST(RuntimeChecks, WeakeningTruthTableOnFixtures) {
  for (auto [sol, json] : {std::pair{"HelloBlockchain.sol", "HelloBlockchain.json"},
                           std::pair{"AssetTransfer.sol", "AssetTransfer.json"}}) {
    auto r = instrument_for_conformance(typed_fixture(sol), policy::parse_policy(read_fixture(json)));
    Program rt = make_runtime_checks(r.program);
    EXPECT_EQ(count_nondet(rt), 0u);
    auto before = all_checks(r.program), after = all_checks(rt);
    ASSERT_EQ(before.size(), after.size());
    for (size_t i = 0; i < before.size(); ++i) {
      int k = 0;
      EXPECT_TRUE(tt::weakening_holds(before[i], after[i], &k)) << print_expr(before[i]);
      EXPECT_LE(k, 4);
    }
  }
}

namespace {

ExprP random_formula(std::mt19937& rng, int depth, int& nondets) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  static const char* atoms[] = {"x == 1", "x < 2", "y != 0", "y >= x", "b"};
  int choice = depth == 0 ? pick(2) : pick(5);
  if (choice == 0 && nondets < 4) {
    ++nondets;
    return Expr::make(Expr::Nondet);
  }
  if (choice <= 1) {
    Program p = parse_contract(std::string("contract A { int x; int y; bool b; function f() public { require(") +
                               atoms[pick(5)] + "); } }");
    return p.contracts[0].functions[0].body->body[0]->cond;
  }
  if (choice == 2) {
    ExprP e = Expr::make(Expr::Unary);
    e->name = "!";
    e->args = {random_formula(rng, depth - 1, nondets)};
    return e;
  }
  static const char* ops[] = {"&&", "||", "==>"};
  ExprP e = Expr::make(Expr::Binary);
  e->name = ops[pick(3)];
  e->args = {random_formula(rng, depth - 1, nondets), random_formula(rng, depth - 1, nondets)};
  return e;
}

}  // namespace

TEST(RuntimeChecks, WeakeningPropertyRandom) {
  std::mt19937 rng(77);
  for (int iter = 0; iter < 300; ++iter) {
    int nd = 0;
    ExprP phi = random_formula(rng, 4, nd);
    Program p = parse_contract("contract A { int x; int y; bool b; function f() public { assert(true); } }");
    p.contracts[0].functions[0].body->body[0]->cond = phi;
    typecheck(p);
    Program rt = make_runtime_checks(p);
    ExprP psi = all_checks(rt)[0];
    EXPECT_EQ(count_nondet(rt), 0u);
    EXPECT_TRUE(tt::weakening_holds(phi, psi)) << print_expr(phi) << "  vs  " << print_expr(psi);
  }
}
