#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <regex>

#include "semantics_oracle.hpp"
#include "test_util.hpp"
#include "vsol/sol_interp.hpp"
#include "vsol/translate.hpp"

using namespace vsol;
namespace v = vsol::vir;

namespace {

sol::Program typed(const std::string& src) {
  sol::Program p = sol::parse_contract(src);
  sol::typecheck(p);
  return p;
}

const v::Procedure& proc(const trans::Translation& t, const std::string& n) {
  const v::Procedure* p = t.program.find_proc(n);
  if (!p) throw std::runtime_error("no procedure " + n);
  return *p;
}

void walk(const v::StmtP& s, const std::function<void(const v::StmtP&)>& f) {
  if (!s) return;
  f(s);
  for (const auto& b : s->body) walk(b, f);
  walk(s->then_s, f);
  walk(s->else_s, f);
}

void walk(const v::ExprP& e, const std::function<void(const v::ExprP&)>& f) {
  if (!e) return;
  f(e);
  for (const auto& a : e->args) walk(a, f);
}

}  // namespace

TEST(TranslateTypes, MapType) {
  EXPECT_EQ(v::type_str(trans::map_type(sol::SolType::string_t())), "int");
  EXPECT_EQ(v::type_str(trans::map_type(sol::SolType::integer())), "int");
  EXPECT_EQ(v::type_str(trans::map_type(sol::SolType::integer("StateType"))), "int");
  EXPECT_EQ(v::type_str(trans::map_type(sol::SolType::boolean())), "bool");
  EXPECT_EQ(v::type_str(trans::map_type(sol::SolType::address())), "Ref");
  EXPECT_EQ(v::type_str(trans::map_type(sol::SolType::contract("A"))), "Ref");
  auto nested = sol::SolType::mapping(sol::SolType::integer(),
                                      sol::SolType::mapping(sol::SolType::integer(), sol::SolType::integer()));
  EXPECT_EQ(v::type_str(trans::map_type(nested)), "Ref");
  v::MapShape s = trans::shape_of(nested);
  EXPECT_EQ(s.keys.size(), 2u);
  EXPECT_EQ(s.tag(), "int_int_int");
}

TEST(TranslateExpr, ExampleOneNestedIndex) {
  sol::Program p = typed(
      "contract C {\n  mapping(int => int[]) x;\n"
      "  function f() public returns (int) {\n    return x[0][1];\n  }\n}\n");
  trans::Translator tr(p);
  const auto& ret = tr.source().find("C")->functions[0].body->body[0];
  std::vector<v::StmtP> pre;
  v::ExprP got = tr.expr("C", ret->rhs, pre);
  EXPECT_TRUE(pre.empty());
  using namespace vsol::vir;
  ExprP want = select("M_int_int",
                      {select("M_int_Ref", {select("x_C", {var("this")}), int_const(0)}), int_const(1)});
  EXPECT_TRUE(expr_equal(got, want)) << print_expr(got);
  EXPECT_EQ(print_expr(got), "M_int_int[M_int_Ref[x_C[this]][0]][1]");
}

TEST(TranslateExpr, SenderAndStateVariables) {
  sol::Program q = typed(
      "contract HelloBlockchain { address Requestor; function g(int y) public returns (int) { require(msg.sender == "
      "Requestor); return y; } }");
  trans::Translator tq(q);
  const auto& body = tq.source().find("HelloBlockchain")->functions[0].body->body;
  EXPECT_EQ(v::print_stmt(tq.stmt("HelloBlockchain", body[0])), "assume msg_sender == Requestor_HelloBlockchain[this];\n");
  EXPECT_EQ(v::print_stmt(tq.stmt("HelloBlockchain", body[1])), "__ret := y;\n");
}

TEST(TranslateStmt, ExampleTwoNewNestedMap) {
  sol::Program p = typed(
      "contract C {\n  mapping(int => mapping(int => int)) x;\n"
      "  function f() public {\n    x = new mapping(int => mapping(int => int))();\n  }\n}\n");
  trans::Translator tr(p);
  v::StmtP s = tr.stmt("C", tr.source().find("C")->functions[0].body->body[0]);
  ASSERT_EQ(s->kind, v::Stmt::Seq);
  // The listing puts the first two statements on one line: 9 statements.
  std::vector<v::Stmt::Kind> kinds;
  for (const auto& b : s->body) kinds.push_back(b->kind);
  std::vector<v::Stmt::Kind> want = {v::Stmt::Call,   v::Stmt::Assume, v::Stmt::Assume,
                                     v::Stmt::Assume, v::Stmt::Call,   v::Stmt::Assume,
                                     v::Stmt::Assume, v::Stmt::Assume, v::Stmt::Store};
  EXPECT_EQ(kinds, want);
  std::string text;
  for (const auto& b : s->body) text += v::print_stmt(b);
  EXPECT_EQ(normalize_temps(text),
            "call v := New();\n"
            "assume Length[v] == 0;\n"
            "assume (forall i: int :: Length[M_int_Ref[v][i]] == 0);\n"
            "assume (forall i: int :: !Alloc[M_int_Ref[v][i]]);\n"
            "call NewUnbounded();\n"
            "assume (forall i: int :: Alloc[M_int_Ref[v][i]]);\n"
            "assume (forall i: int, j: int :: i == j || M_int_Ref[v][i] != M_int_Ref[v][j]);\n"
            "assume (forall i: int, j: int :: M_int_int[M_int_Ref[v][i]][j] == 0);\n"
            "x_C[this] := v;\n");
}

TEST(TranslateStmt, PushNewArrayAndGuards) {
  sol::Program p = typed(
      "contract C {\n  int[] a;\n  int z;\n"
      "  function f(int d) public {\n    a.push(d);\n    a = new int[](3);\n"
      "    if (d != 0 && 10 / d > 1) { z = 1; }\n  }\n}\n");
  trans::Translator tr(p);
  const auto& body = tr.source().find("C")->functions[0].body->body;
  EXPECT_EQ(v::print_stmt(tr.stmt("C", body[0])),
            "M_int_int[a_C[this]][Length[a_C[this]]] := d;\n"
            "Length[a_C[this]] := Length[a_C[this]] + 1;\n");
  EXPECT_EQ(normalize_temps(v::print_stmt(tr.stmt("C", body[1]))),
            "call v := New();\n"
            "Length[v] := 3;\n"
            "assume (forall i: int :: M_int_int[v][i] == 0);\n"
            "a_C[this] := v;\n");
  // The division guard only applies where the division is evaluated.
  EXPECT_EQ(v::print_stmt(tr.stmt("C", body[2])),
            "assume d != 0 ==> d != 0;\n"
            "if (d != 0 && 10 div d > 1) {\n  z_C[this] := 1;\n}\n");
}

TEST(TranslateStmt, NondetAndStrings) {
  sol::Program p = typed(
      "contract C {\n  string s;\n  bool b;\n"
      "  function f() public {\n    s = \"hello\";\n    b = nondet() || s == \"\";\n    s = \"hello\";\n"
      "    s = \"bye\";\n  }\n}\n");
  trans::Translation t = trans::translate_program(p);
  EXPECT_EQ(t.strings.at(""), 0);
  EXPECT_EQ(t.strings.at("hello"), 1);
  EXPECT_EQ(t.strings.at("bye"), 2);
  EXPECT_EQ(t.program.axioms.size(), 3u);
  std::string text = v::print_program(t.program);
  EXPECT_NE(text.find("s_C[this] := StrToInt(1);"), std::string::npos);
  EXPECT_NE(text.find("havoc __nd1;\n  b_C[this] := __nd1 || s_C[this] == StrToInt(0);"), std::string::npos) << text;
  EXPECT_NE(text.find("axiom StrToInt(2) == 2;"), std::string::npos);
}

TEST(TranslateProgram, HelloBlockchainShape) {
  trans::Translation t = trans::translate_program(typed(read_fixture("HelloBlockchain.sol")));
  for (const char* g : {"State_HelloBlockchain", "Requestor_HelloBlockchain", "Responder_HelloBlockchain",
                        "RequestMessage_HelloBlockchain", "ResponseMessage_HelloBlockchain"})
    EXPECT_TRUE(t.program.find_global(g)) << g;
  std::set<std::string> procs;
  for (const auto& p : t.program.procedures) procs.insert(p.name);
  EXPECT_EQ(procs, (std::set<std::string>{"New", "NewUnbounded", "HelloBlockchain_Ctor",
                                          "HelloBlockchain_SendRequest", "HelloBlockchain_SendResponse"}));
  const auto& ctor = proc(t, "HelloBlockchain_Ctor");
  ASSERT_EQ(ctor.params.size(), 3u);
  EXPECT_EQ(ctor.params[0].name, "this");
  EXPECT_EQ(ctor.params[2].name, "msg_sender");
  EXPECT_EQ(t.contract_ids.at("HelloBlockchain"), 1);
  // Round trip through the text form.
  v::Program back = v::typecheck(v::parse_program(v::print_program(t.program)));
  EXPECT_TRUE(v::program_equal(back, t.program));
}

TEST(TranslateProgram, CompanionConstructorsAndDispatch) {
  trans::Translation t = trans::translate_program(typed(read_fixture("Companion.sol")));
  const auto& b = proc(t, "B_Ctor");
  ASSERT_EQ(b.body->kind, v::Stmt::Seq);
  EXPECT_EQ(v::print_stmt(b.body->body[0]), "call A_Ctor(this, msg_sender);\n");
  std::string c = normalize_temps(v::print_stmt(proc(t, "C_Ctor").body));
  EXPECT_NE(c.find("call v := New();\nassume DType[v] == B;\ncall B_Ctor(v, this);\n"), std::string::npos) << c;
  EXPECT_NE(c.find("if (DType[a_C[this]] == A) {\n  call v2 := A_F(a_C[this], this);\n} "
                   "else if (DType[a_C[this]] == B) {\n  call v2 := B_F(a_C[this], this);\n} "
                   "else {\n  assume false;\n}\n"),
            std::string::npos)
      << c;
}

// Resolution computed by hand from the linearizations [A], [B, A], [C, B, A]:
// B inherits F from A, C overrides it.
TEST(TranslateProgram, InternalDispatchOverHierarchy) {
  trans::Translation t = trans::translate_program(typed(
      "contract A {\n  int r;\n  function F() public returns (int) { return 1; }\n"
      "  function G() public { r = F(); }\n}\n"
      "contract B is A {\n}\n"
      "contract C is B {\n  function F() public returns (int) { return 3; }\n}\n"));
  std::string g = normalize_temps(v::print_stmt(proc(t, "A_G").body));
  EXPECT_NE(g.find("if (DType[this] == A) {\n  call v := A_F(this, msg_sender);\n} "
                   "else if (DType[this] == B) {\n  call v := A_F(this, msg_sender);\n} "
                   "else if (DType[this] == C) {\n  call v := C_F(this, msg_sender);\n} else {\n  assume false;\n}\n"),
            std::string::npos)
      << g;
  EXPECT_FALSE(t.program.find_proc("B_F"));
  // Single contract: a direct call.
  trans::Translation s = trans::translate_program(
      typed("contract S {\n  int r;\n  function F() internal returns (int) { return 1; }\n"
            "  function G() public { r = F(); }\n}\n"));
  EXPECT_NE(v::print_stmt(proc(s, "S_G").body).find("call __t1 := S_F(this, msg_sender);"), std::string::npos);
}

TEST(TranslateProgram, MultipleInheritanceRunsEachConstructorOnce) {
  trans::Translation t = trans::translate_program(typed(
      "contract A {\n  int a;\n  constructor() public { a = a + 1; }\n}\n"
      "contract B is A {\n}\ncontract C is A {\n}\n"
      "contract D is B, C {\n}\n"));
  const auto& d = proc(t, "D_Ctor");
  std::vector<std::string> calls;
  walk(d.body, [&](const v::StmtP& s) {
    if (s->kind == v::Stmt::Call) calls.push_back(s->name);
  });
  // Linearization of D is [D, B, C, A].
  EXPECT_EQ(calls, (std::vector<std::string>{"A_Ctor_Own", "C_Ctor_Own", "B_Ctor_Own"}));
}

// External calls pass `this` as sender, internal calls forward msg_sender.
TEST(TranslateProgram, SenderThreading) {
  for (const char* f : {"Companion.sol", "AssetTransfer.sol", "HelloBlockchain.sol"}) {
    trans::Translation t = trans::translate_program(typed(read_fixture(f)));
    for (const auto& p : t.program.procedures) {
      walk(p.body, [&](const v::StmtP& s) {
        if (s->kind != v::Stmt::If || !s->then_s || s->then_s->kind != v::Stmt::Call) return;
        const auto& test = s->e;
        if (test->kind != v::Expr::Op || test->args[0]->kind != v::Expr::Select || test->args[0]->name != "DType")
          return;
        const auto& recv = test->args[0]->args[0];
        const auto& call = s->then_s;
        if (call->name.find("_Ctor") != std::string::npos) return;
        bool internal = recv->kind == v::Expr::Var && recv->name == "this";
        ASSERT_FALSE(call->args.empty());
        EXPECT_EQ(v::print_expr(call->args.back()), internal ? "msg_sender" : "this") << p.name;
        EXPECT_TRUE(v::expr_equal(call->args.front(), recv));
      });
    }
  }
}

TEST(TranslateProgram, EverySelectUsesADeclaredMap) {
  for (const char* f : {"Companion.sol", "AssetTransfer.sol", "HelloBlockchain.sol"}) {
    trans::Translation t = trans::translate_program(typed(read_fixture(f)));
    for (const auto& p : t.program.procedures) {
      std::set<std::string> locals;
      for (const auto* ds : {&p.params, &p.returns, &p.locals})
        for (const auto& d : *ds) locals.insert(d.name);
      auto check_name = [&](const std::string& n) {
        EXPECT_TRUE(t.program.find_global(n) || locals.count(n)) << n << " in " << p.name;
      };
      walk(p.body, [&](const v::StmtP& s) {
        if (s->kind == v::Stmt::Store) check_name(s->name);
        for (const auto& e : s->args) walk(e, [&](const v::ExprP& x) {
            if (x->kind == v::Expr::Select) check_name(x->name);
          });
        walk(s->e, [&](const v::ExprP& x) {
          if (x->kind == v::Expr::Select) check_name(x->name);
        });
      });
    }
  }
}

TEST(TranslateHarness, BranchPerPublicFunction) {
  sol::Program p = typed(read_fixture("HelloBlockchain.sol"));
  trans::Translation t = trans::translate_program(p);
  trans::generate_harness(t, p, "HelloBlockchain");
  const auto& m = proc(t, "main");
  std::string text = v::print_stmt(m.body);
  EXPECT_EQ(text.rfind("assume Alloc[null];\ncall this := New();\nassume DType[this] == HelloBlockchain;\n"
                       "havoc msg_sender;\nassume msg_sender != null;\nhavoc __ctor_message;\n"
                       "call HelloBlockchain_Ctor(this, __ctor_message, msg_sender);\nwhile (true) {\n",
                       0),
            0u)
      << text;
  std::vector<std::string> order;
  walk(m.body, [&](const v::StmtP& s) {
    if (s->kind == v::Stmt::Call) order.push_back(s->name);
  });
  EXPECT_EQ(order, (std::vector<std::string>{"New", "HelloBlockchain_Ctor", "HelloBlockchain_SendRequest",
                                             "HelloBlockchain_SendResponse"}));

  sol::Program q = typed("contract K {\n  int x;\n  constructor() public { x = 1; }\n}\n");
  trans::Translation tk = trans::translate_program(q);
  trans::generate_harness(tk, q, "K");
  const auto& body = proc(tk, "main").body->body;
  ASSERT_EQ(body.back()->kind, v::Stmt::While);
  EXPECT_EQ(body.back()->then_s->kind, v::Stmt::Skip);

  sol::Program r = typed(
      "contract K {\n  int x;\n  function c() public { x = 3; }\n  function a() public { x = 1; }\n"
      "  function b(int y) public { x = y; }\n  function h() internal { x = 0; }\n}\n");
  trans::Translation tr = trans::translate_program(r);
  trans::generate_harness(tr, r, "K");
  order.clear();
  walk(proc(tr, "main").body, [&](const v::StmtP& s) {
    if (s->kind == v::Stmt::Call) order.push_back(s->name);
  });
  EXPECT_EQ(order, (std::vector<std::string>{"New", "K_Ctor", "K_c", "K_a", "K_b"}));
}

TEST(TranslateSemantics, CompanionAssertsHoldInIr) {
  sol::Program sp = typed(read_fixture("Companion.sol"));
  v::Program ip = semantics::with_create(trans::translate_program(sp), sp, "C");
  v::RunOptions o;
  o.allow_defaults = true;
  o.args = {5};
  v::RunResult r = v::interpret(ip, "__create", o);
  EXPECT_EQ(r.outcome, v::RunResult::Completed) << r.label;
  sol::Interpreter si(sp);
  EXPECT_EQ(si.create("C", {}, 5).outcome, sol::Interpreter::Outcome::Completed);
}

TEST(TranslateSemantics, RandomProgramsAgree) {
  semantics::ProgGen g(4242);
  std::mt19937 rng(17);
  int programs = 0, txs = 0;
  for (int i = 0; i < 60; ++i) {
    std::string src = g.program();
    SCOPED_TRACE(src);
    auto eq = semantics::check_equivalent(src, rng, 6);
    for (const auto& d : eq.diffs) ADD_FAILURE() << d;
    if (!eq.diffs.empty()) return;
    int n = eq.compared;
    programs += n > 0;
    txs += n;
  }
  EXPECT_GE(programs, 20);
  std::printf("compared %d programs, %d transactions\n", programs, txs);
}
