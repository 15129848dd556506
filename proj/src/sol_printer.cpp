#include "vsol/sol.hpp"

namespace vsol::sol {

namespace {

int prec(const std::string& op) {
  if (op == "==>") return 1;
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "==" || op == "!=") return 4;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 5;
  if (op == "+" || op == "-") return 6;
  return 7;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string args_str(const std::vector<ExprP>& a) {
  std::string out;
  for (size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + print_expr(a[i]);
  return out;
}

// Binary operators are left-associative except ==>, which associates right.
std::string operand(const ExprP& e, const std::string& parent, bool right) {
  std::string s = print_expr(e);
  if (e->kind != Expr::Binary) return s;
  int c = prec(e->name), p = prec(parent);
  bool rassoc = parent == "==>";
  bool need = c < p || (c == p && (right != rassoc));
  return need ? "(" + s + ")" : s;
}

std::string pad(int n) { return std::string(n * 4, ' '); }

}  // namespace

std::string print_type(const TypeP& t) { return type_str(t); }

std::string print_expr(const ExprP& e) {
  switch (e->kind) {
    case Expr::IntLit: return std::to_string(e->ival);
    case Expr::BoolLit: return e->ival ? "true" : "false";
    case Expr::StrLit: return quote(e->name);
    case Expr::Null: return "address(0)";
    case Expr::Ident: return e->name;
    case Expr::Member: return print_expr(e->base) + "." + e->name;
    case Expr::Index: return print_expr(e->base) + "[" + print_expr(e->args[0]) + "]";
    case Expr::Unary: {
      std::string s = print_expr(e->args[0]);
      if (e->args[0]->kind == Expr::Binary) s = "(" + s + ")";
      return e->name + s;
    }
    case Expr::Binary:
      return operand(e->args[0], e->name, false) + " " + e->name + " " + operand(e->args[1], e->name, true);
    case Expr::Call: return (e->base ? print_expr(e->base) + "." : "") + e->name + "(" + args_str(e->args) + ")";
    case Expr::New: return "new " + type_str(e->new_type) + "(" + args_str(e->args) + ")";
    case Expr::MsgSender: return "msg.sender";
    case Expr::This: return "this";
    case Expr::Length: return print_expr(e->base) + ".length";
    case Expr::Nondet: return "nondet()";
    case Expr::EnumConst: return e->enum_name + "." + e->name;
  }
  return "?";
}

std::string print_stmt(const StmtP& s, int ind) {
  std::string p = pad(ind);
  switch (s->kind) {
    case Stmt::Block: {
      std::string out = p + "{\n";
      for (const auto& b : s->body) out += print_stmt(b, ind + 1);
      return out + p + "}\n";
    }
    case Stmt::VarDecl:
      return p + type_str(s->decl_type) + " " + s->name + (s->rhs ? " = " + print_expr(s->rhs) : "") + ";\n";
    case Stmt::Assign: return p + print_expr(s->lhs) + " = " + print_expr(s->rhs) + ";\n";
    case Stmt::ExprStmt: return p + print_expr(s->rhs) + ";\n";
    case Stmt::Require: return p + "require(" + print_expr(s->cond) + ");\n";
    case Stmt::Assert: return p + "assert(" + print_expr(s->cond) + ");\n";
    case Stmt::If: {
      std::string out = p + "if (" + print_expr(s->cond) + ")\n" + print_stmt(s->then_s, s->then_s->kind == Stmt::Block ? ind : ind + 1);
      if (s->else_s)
        out += p + "else\n" + print_stmt(s->else_s, s->else_s->kind == Stmt::Block ? ind : ind + 1);
      return out;
    }
    case Stmt::While:
      return p + "while (" + print_expr(s->cond) + ")\n" + print_stmt(s->then_s, s->then_s->kind == Stmt::Block ? ind : ind + 1);
    case Stmt::Return: return p + "return" + (s->rhs ? " " + print_expr(s->rhs) : "") + ";\n";
    case Stmt::Placeholder: return p + "_;\n";
    case Stmt::Push: return p + print_expr(s->lhs) + ".push(" + print_expr(s->rhs) + ");\n";
  }
  return "";
}

namespace {

std::string print_function(const Function& f, const std::string& contract) {
  std::string out = pad(1);
  out += f.is_ctor ? "constructor(" : "function " + f.name + "(";
  for (size_t i = 0; i < f.params.size(); ++i)
    out += (i ? ", " : "") + type_str(f.params[i].type) + " " + f.params[i].name;
  out += ")";
  out += f.is_public ? " public" : " internal";
  for (const auto& m : f.modifiers) out += " " + m.name;
  if (f.ret) out += " returns (" + type_str(f.ret) + ")";
  out += "\n" + print_stmt(f.body, 1);
  (void)contract;
  return out;
}

}  // namespace

std::string print_program(const Program& p) {
  std::string out;
  for (size_t ci = 0; ci < p.contracts.size(); ++ci) {
    const Contract& c = p.contracts[ci];
    if (ci) out += "\n";
    out += "contract " + c.name;
    for (size_t i = 0; i < c.bases.size(); ++i) out += (i ? ", " : " is ") + c.bases[i];
    out += " {\n";
    for (const auto& e : c.enums) {
      out += pad(1) + "enum " + e.name + " {";
      for (size_t i = 0; i < e.members.size(); ++i) out += (i ? ", " : " ") + e.members[i];
      out += " }\n";
    }
    for (const auto& v : c.state_vars) out += pad(1) + type_str(v.type) + " " + v.name + ";\n";
    for (const auto& m : c.modifiers) out += pad(1) + "modifier " + m.name + "()\n" + print_stmt(m.body, 1);
    if (!c.ctor.implicit || !c.ctor.modifiers.empty() || !c.ctor.body->body.empty()) out += print_function(c.ctor, c.name);
    for (const auto& f : c.functions) out += print_function(f, c.name);
    out += "}\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality

bool expr_equal(const ExprP& a, const ExprP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
  if (a->kind == Expr::IntLit || a->kind == Expr::BoolLit || a->kind == Expr::EnumConst)
    if (a->ival != b->ival) return false;
  if (a->kind == Expr::New && type_str(a->new_type) != type_str(b->new_type)) return false;
  if (!expr_equal(a->base, b->base)) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

bool stmt_equal(const StmtP& a, const StmtP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->body.size() != b->body.size()) return false;
  if (a->kind == Stmt::VarDecl && type_str(a->decl_type) != type_str(b->decl_type)) return false;
  if (!expr_equal(a->lhs, b->lhs) || !expr_equal(a->rhs, b->rhs) || !expr_equal(a->cond, b->cond)) return false;
  for (size_t i = 0; i < a->body.size(); ++i)
    if (!stmt_equal(a->body[i], b->body[i])) return false;
  return stmt_equal(a->then_s, b->then_s) && stmt_equal(a->else_s, b->else_s);
}

namespace {
bool fn_equal(const Function& a, const Function& b) {
  if (a.name != b.name || a.params.size() != b.params.size() || a.is_public != b.is_public ||
      type_str(a.ret) != type_str(b.ret) || a.modifiers.size() != b.modifiers.size())
    return false;
  for (size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name || type_str(a.params[i].type) != type_str(b.params[i].type)) return false;
  for (size_t i = 0; i < a.modifiers.size(); ++i)
    if (a.modifiers[i].name != b.modifiers[i].name) return false;
  return stmt_equal(a.body, b.body);
}
}  // namespace

bool alpha_equal(const Program& a, const Program& b) {
  if (a.contracts.size() != b.contracts.size()) return false;
  for (size_t i = 0; i < a.contracts.size(); ++i) {
    const Contract& x = a.contracts[i];
    const Contract& y = b.contracts[i];
    if (x.name != y.name || x.bases != y.bases || x.state_vars.size() != y.state_vars.size() ||
        x.functions.size() != y.functions.size() || x.modifiers.size() != y.modifiers.size() ||
        x.enums.size() != y.enums.size())
      return false;
    for (size_t j = 0; j < x.enums.size(); ++j)
      if (x.enums[j].name != y.enums[j].name || x.enums[j].members != y.enums[j].members) return false;
    for (size_t j = 0; j < x.state_vars.size(); ++j)
      if (x.state_vars[j].name != y.state_vars[j].name || type_str(x.state_vars[j].type) != type_str(y.state_vars[j].type))
        return false;
    if (!fn_equal(x.ctor, y.ctor)) return false;
    for (size_t j = 0; j < x.functions.size(); ++j)
      if (!fn_equal(x.functions[j], y.functions[j])) return false;
    for (size_t j = 0; j < x.modifiers.size(); ++j)
      if (x.modifiers[j].name != y.modifiers[j].name || !stmt_equal(x.modifiers[j].body, y.modifiers[j].body))
        return false;
  }
  return true;
}

}  // namespace vsol::sol
