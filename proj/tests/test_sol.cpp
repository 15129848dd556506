#include <gtest/gtest.h>

#include <functional>

#include "test_util.hpp"
#include "vsol/sol.hpp"
#include "vsol/sol_interp.hpp"

using namespace vsol;
using namespace vsol::sol;

namespace {

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

Program typed(const std::string& src) {
  Program p = parse_contract(src);
  typecheck(p);
  return p;
}

size_t flat_count(const StmtP& s) {
  if (!s) return 0;
  if (s->kind == Stmt::Block) {
    size_t n = 0;
    for (const auto& b : s->body) n += flat_count(b);
    return n;
  }
  return 1;
}

void all_exprs(const StmtP& s, std::vector<ExprP>& out);
void all_exprs(const ExprP& e, std::vector<ExprP>& out) {
  if (!e) return;
  out.push_back(e);
  all_exprs(e->base, out);
  for (const auto& a : e->args) all_exprs(a, out);
}
void all_exprs(const StmtP& s, std::vector<ExprP>& out) {
  if (!s) return;
  all_exprs(s->lhs, out);
  all_exprs(s->rhs, out);
  all_exprs(s->cond, out);
  for (const auto& b : s->body) all_exprs(b, out);
  all_exprs(s->then_s, out);
  all_exprs(s->else_s, out);
}

}  // namespace

TEST(SolParse, HelloBlockchain) {
  Program p = parse_contract(read_fixture("HelloBlockchain.sol"));
  ASSERT_EQ(p.contracts.size(), 1u);
  const Contract& c = p.contracts[0];
  EXPECT_EQ(c.name, "HelloBlockchain");
  EXPECT_EQ(c.state_vars.size(), 5u);
  EXPECT_FALSE(c.ctor.implicit);
  EXPECT_EQ(c.ctor.params.size(), 1u);
  EXPECT_EQ(c.functions.size(), 2u);
  ASSERT_EQ(c.enums.size(), 1u);
  EXPECT_EQ(c.enums[0].members, (std::vector<std::string>{"Request", "Respond"}));
}

TEST(SolParse, EmptyContractGetsImplicitConstructor) {
  Program p = parse_contract("contract A { }");
  ASSERT_EQ(p.contracts.size(), 1u);
  EXPECT_TRUE(p.contracts[0].ctor.implicit);
  EXPECT_TRUE(p.contracts[0].ctor.params.empty());
  EXPECT_TRUE(p.contracts[0].ctor.body->body.empty());
}

TEST(SolParse, UnsupportedFeatures) {
  EXPECT_EQ(error_kind([] { parse_contract("contract A { function f() public { selfdestruct(msg.sender); } }"); }),
            "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { parse_contract("contract A { function f() public payable { } }"); }), "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { parse_contract("contract A { struct S { int x; } }"); }), "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { parse_contract("library L { }"); }), "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { parse_contract("contract A { function f() public { assembly { } } }"); }),
            "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { parse_contract("contract A { address x; function f() public { x.call(1); } }"); }),
            "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { parse_contract("contract A { event E(); }"); }), "UnsupportedFeature");
}

TEST(SolParse, ParseErrorHasPosition) {
  try {
    parse_contract("contract A {\n  function f( public { }\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "ParseError");
    EXPECT_EQ(e.detail().rfind("2:", 0), 0u) << e.detail();
  }
}

TEST(SolParse, RevertLowersToRequireFalse) {
  Program p = parse_contract("contract A { function f() public { revert(); } }");
  const StmtP& s = p.contracts[0].functions[0].body->body[0];
  EXPECT_EQ(s->kind, Stmt::Require);
  EXPECT_EQ(s->cond->kind, Expr::BoolLit);
  EXPECT_EQ(s->cond->ival, 0);
}

TEST(SolParse, ConstructorKeywordAndPragma) {
  Program p = parse_contract("pragma solidity ^0.5.0;\ncontract A { int x; constructor(int y) public { x = y; } }");
  EXPECT_FALSE(p.contracts[0].ctor.implicit);
  EXPECT_EQ(p.contracts[0].ctor.params.size(), 1u);
}

TEST(SolTypecheck, ExampleOneOperandTypes) {
  Program p = typed("contract C { mapping(int => int[]) x; function f() public { int y = x[0][1]; } }");
  const StmtP& d = p.contracts[0].functions[0].body->body[0];
  ASSERT_EQ(d->rhs->kind, Expr::Index);
  EXPECT_EQ(d->rhs->type->kind, SolType::Int);
  EXPECT_EQ(d->rhs->base->type->kind, SolType::Array);
  EXPECT_EQ(d->rhs->base->base->type->kind, SolType::Mapping);
  EXPECT_EQ(d->rhs->base->base->binding, Binding::State);
  EXPECT_EQ(d->rhs->base->base->owner, "C");
}

TEST(SolTypecheck, AssertRequiresBoolean) {
  EXPECT_EQ(error_kind([] { typed("contract A { function f() public { assert(1); } }"); }), "TypeError");
}

TEST(SolTypecheck, StorageArrayCopyRejected) {
  EXPECT_EQ(error_kind([] { typed("contract A { int[] a; int[] b; function f() public { a = b; } }"); }),
            "DeepCopyUnsupported");
  // A local storage pointer is a reference, not a copy.
  EXPECT_EQ(error_kind([] { typed("contract A { int[] a; function f() public { int[] storage p = a; p.push(1); } }"); }),
            "");
}

TEST(SolTypecheck, EnumsLowerToIntegers) {
  Program p = typed(read_fixture("HelloBlockchain.sol"));
  const Contract& c = p.contracts[0];
  EXPECT_TRUE(c.state_vars[0].type->is_enum());
  const StmtP& s = c.ctor.body->body[2];
  ASSERT_EQ(s->rhs->kind, Expr::EnumConst);
  EXPECT_EQ(s->rhs->ival, 0);
  EXPECT_EQ(s->rhs->name, "Request");
  EXPECT_EQ(c.ctor.body->body[0]->rhs->kind, Expr::MsgSender);
}

TEST(SolTypecheck, EveryExpressionAnnotated) {
  for (const char* f : {"HelloBlockchain.sol", "Companion.sol"}) {
    Program p = typed(read_fixture(f));
    std::vector<ExprP> es;
    for (const auto& c : p.contracts) {
      all_exprs(c.ctor.body, es);
      for (const auto& fn : c.functions) all_exprs(fn.body, es);
    }
    ASSERT_FALSE(es.empty());
    for (const auto& e : es) {
      if (e->kind == Expr::Call && !e->type) continue;  // void call statement
      EXPECT_TRUE(e->type != nullptr) << f << " " << print_expr(e);
    }
  }
}

TEST(SolTypecheck, MiscErrors) {
  EXPECT_EQ(error_kind([] { typed("contract A { function f() public { y = 1; } }"); }), "TypeError");
  EXPECT_EQ(error_kind([] { typed("contract A { int x; function f() public { x = true; } }"); }), "TypeError");
  EXPECT_EQ(error_kind([] { typed("contract A { function f() public returns (int) { return 1; int y = 2; } }"); }),
            "UnsupportedFeature");
  EXPECT_EQ(error_kind([] { typed("contract A { address a; function f() public { require(a != 0); } }"); }), "");
}

TEST(SolLinearize, Examples) {
  Program p = parse_contract("contract A {} contract B is A {} contract Solo {}");
  linearize(p);
  EXPECT_EQ(p.linearization["B"], (std::vector<std::string>{"B", "A"}));
  EXPECT_EQ(p.linearization["Solo"], (std::vector<std::string>{"Solo"}));
}

TEST(SolLinearize, Diamond) {
  Program p = parse_contract("contract A {} contract B is A {} contract C is A {} contract D is B, C {}");
  linearize(p);
  // Hand-run C3: L(B)=[B,A], L(C)=[C,A]; merge([B,A],[C,A],[B,C]) = B, C, A.
  EXPECT_EQ(p.linearization["D"], (std::vector<std::string>{"D", "B", "C", "A"}));
}

TEST(SolLinearize, ErrorsAndLocalPrecedence) {
  EXPECT_EQ(error_kind([] {
              Program p = parse_contract("contract A is B {} contract B is A {}");
              linearize(p);
            }),
            "InheritanceCycle");
  EXPECT_EQ(error_kind([] {
              Program p = parse_contract("contract A {} contract B is A {} contract C is A, B {}");
              linearize(p);
            }),
            "AmbiguousLinearization");
  Program p = parse_contract(
      "contract A {} contract B is A {} contract C is A {} contract E {} contract D is B, C, E {} contract F is D, E {}");
  linearize(p);
  for (const auto& c : p.contracts) {
    const auto& l = p.linearization[c.name];
    EXPECT_EQ(l.front(), c.name);
    for (size_t i = 0; i + 1 < c.bases.size(); ++i) {
      auto a = std::find(l.begin(), l.end(), c.bases[i]);
      auto b = std::find(l.begin(), l.end(), c.bases[i + 1]);
      EXPECT_LT(a, b);
    }
  }
}

TEST(SolDesugar, SingleModifier) {
  Program p = typed(
      "contract A { int x; modifier Foo() { x = 1; _; x = 3; } function Bar() public Foo { x = 2; } }");
  size_t pre_post = flat_count(p.contracts[0].modifiers[0].body) - 1;  // minus placeholder
  size_t body = flat_count(p.contracts[0].functions[0].body);
  desugar_modifiers(p);
  const StmtP& b = p.contracts[0].functions[0].body;
  EXPECT_EQ(flat_count(b), pre_post + body);
  EXPECT_TRUE(p.contracts[0].functions[0].modifiers.empty());
  std::string text = print_stmt(b);
  EXPECT_LT(text.find("x = 1"), text.find("x = 2"));
  EXPECT_LT(text.find("x = 2"), text.find("x = 3"));
}

TEST(SolDesugar, NoModifiersIsIdentity) {
  Program p = typed("contract A { int x; function Bar() public { x = 2; } }");
  Program q = clone(p);
  desugar_modifiers(q);
  EXPECT_TRUE(alpha_equal(p, q));
}

TEST(SolDesugar, TwoModifiersNestOutermostFirst) {
  // The same probe executed through the reference interpreter: the order of
  // writes into the log array shows M1.pre, M2.pre, body, M2.post, M1.post.
  Program p = typed(R"(
    contract A {
      int[] log;
      modifier M1() { log.push(1); _; log.push(5); }
      modifier M2() { log.push(2); _; log.push(4); }
      function Bar() public M1 M2 { log.push(3); }
    })");
  desugar_modifiers(p);
  Interpreter in(p);
  auto c = in.create("A", {}, 7);
  ASSERT_EQ(c.outcome, Interpreter::Outcome::Completed);
  ASSERT_EQ(in.call(c.created, "Bar", {}, 7).outcome, Interpreter::Outcome::Completed);
  const HeapObj& arr = in.state().heap.at(in.state().heap.at(c.created).fields.at("log").i);
  ASSERT_EQ(arr.length, 5);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(arr.entries.at(Value::integer(i)).i, i + 1);
}

TEST(SolDesugar, UnknownModifier) {
  Program p = typed("contract A { function Bar() public Nope { } }");
  EXPECT_EQ(error_kind([&] { desugar_modifiers(p); }), "UnknownModifier");
}

TEST(SolConformance, HelloBlockchain) {
  Program p = typed(read_fixture("HelloBlockchain.sol"));
  policy::Policy pol = policy::parse_policy(read_fixture("HelloBlockchain.json"));
  EXPECT_TRUE(check_syntactic_conformance(p, pol).empty());
}

TEST(SolConformance, MissingFunctionAndStateMismatch) {
  policy::Policy pol = policy::parse_policy(read_fixture("HelloBlockchain.json"));
  std::string src = read_fixture("HelloBlockchain.sol");
  std::string no_resp = src.substr(0, src.find("    // call this function to send a response")) + "}\n";
  Program p = typed(no_resp);
  auto d = check_syntactic_conformance(p, pol);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, "MissingFunction");
  EXPECT_EQ(d[0].message, "SendResponse");

  std::string three = src;
  three.replace(three.find("{ Request, Respond }"), 20, "{ Request, Respond, Extra }");
  Program q = typed(three);
  auto d2 = check_syntactic_conformance(q, pol);
  ASSERT_EQ(d2.size(), 1u);
  EXPECT_EQ(d2[0].kind, "StateSetMismatch");
}

TEST(SolPrinter, RoundTripFixtures) {
  for (const char* f : {"HelloBlockchain.sol", "Companion.sol"}) {
    Program p = parse_contract(read_fixture(f));
    Program q = parse_contract(print_program(p));
    EXPECT_TRUE(alpha_equal(p, q)) << print_program(p);
  }
}

TEST(SolPrinter, PrecedenceSurvivesRoundTrip) {
  Program p = parse_contract(
      "contract A { int x; function f() public { x = (1 - 2) - 3; x = 1 - (2 - 3); x = (1 + 2) * 3; "
      "require((true ==> false) ==> true); require(true ==> (false ==> true)); require(!(x == 1 || x == 2)); } }");
  Program q = parse_contract(print_program(p));
  EXPECT_TRUE(alpha_equal(p, q)) << print_program(p);
}

TEST(SolInterp, CompanionAssertsHold) {
  Program p = typed(read_fixture("Companion.sol"));
  desugar_modifiers(p);
  Interpreter in(p);
  auto r = in.create("C", {}, 1);
  EXPECT_EQ(r.outcome, Interpreter::Outcome::Completed);
}
