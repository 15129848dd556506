#include <algorithm>
#include <cctype>
#include <map>

#include "vsol/vir.hpp"

namespace vsol::vir {

// ---------------------------------------------------------------------------
// Printer

namespace {

int prec(const std::string& o) {
  if (o == "==>") return 1;
  if (o == "||") return 2;
  if (o == "&&") return 3;
  if (o == "==" || o == "!=" || o == "<" || o == "<=" || o == ">" || o == ">=") return 4;
  if (o == "+" || o == "-") return 5;
  if (o == "*" || o == "div" || o == "mod") return 6;
  return 7;
}

bool is_binary(const ExprP& e) { return e->kind == Expr::Op && e->args.size() == 2; }

std::string operand(const ExprP& e, const std::string& parent, bool right) {
  std::string s = print_expr(e);
  if (!is_binary(e)) return s;
  int c = prec(e->name), p = prec(parent);
  bool need = c < p;
  if (c == p) {
    if (p == 4)
      need = true;  // comparisons do not chain
    else
      need = parent == "==>" ? !right : right;
  }
  return need ? "(" + s + ")" : s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string pad(int n) { return std::string(n * 2, ' '); }

std::string args_str(const std::vector<ExprP>& a) {
  std::string out;
  for (size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + print_expr(a[i]);
  return out;
}

std::string decls_str(const std::vector<VarDecl>& ds) {
  std::string out;
  for (size_t i = 0; i < ds.size(); ++i) out += (i ? ", " : "") + ds[i].name + ": " + type_str(ds[i].type);
  return out;
}

std::string block(const StmtP& s, int ind) {
  std::string out = "{\n";
  if (s->kind == Stmt::Seq)
    for (const auto& b : s->body) out += print_stmt(b, ind + 1);
  else if (s->kind != Stmt::Skip)
    out += print_stmt(s, ind + 1);
  return out + pad(ind) + "}";
}

}  // namespace

std::string print_expr(const ExprP& e) {
  switch (e->kind) {
    case Expr::Const:
      if (e->type && e->type->kind == Type::Bool) return e->val ? "true" : "false";
      if (e->type && e->type->kind == Type::Ref) return e->val == 0 ? "null" : "ref(" + std::to_string(e->val) + ")";
      return std::to_string(e->val);
    case Expr::Var: return e->name;
    case Expr::UF: return e->name + "(" + args_str(e->args) + ")";
    case Expr::Select: {
      std::string out = e->name;
      for (const auto& k : e->args) out += "[" + print_expr(k) + "]";
      return out;
    }
    case Expr::Forall: {
      std::string out = "(forall ";
      for (size_t i = 0; i < e->binders.size(); ++i)
        out += (i ? ", " : "") + e->binders[i].name + ": " + type_str(e->binders[i].type);
      return out + " :: " + print_expr(e->args[0]) + ")";
    }
    case Expr::Op: {
      if (e->args.size() == 1) {
        std::string s = print_expr(e->args[0]);
        if (is_binary(e->args[0])) s = "(" + s + ")";
        return (e->name == "neg" ? "-" : e->name) + s;
      }
      return operand(e->args[0], e->name, false) + " " + e->name + " " + operand(e->args[1], e->name, true);
    }
  }
  return "?";
}

std::string print_stmt(const StmtP& s, int ind) {
  std::string p = pad(ind);
  switch (s->kind) {
    case Stmt::Skip: return p + "skip;\n";
    case Stmt::Havoc: return p + "havoc " + s->name + ";\n";
    case Stmt::Assign: return p + s->name + " := " + print_expr(s->e) + ";\n";
    case Stmt::Store: {
      std::string out = p + s->name;
      for (const auto& k : s->args) out += "[" + print_expr(k) + "]";
      return out + " := " + print_expr(s->e) + ";\n";
    }
    case Stmt::Assume: return p + "assume " + print_expr(s->e) + ";\n";
    case Stmt::Assert:
      return p + "assert " + (s->label.empty() ? "" : "{:loc " + quote(s->label) + "} ") + print_expr(s->e) + ";\n";
    case Stmt::Call: {
      std::string out = p + "call ";
      for (size_t i = 0; i < s->results.size(); ++i) out += (i ? ", " : "") + s->results[i];
      if (!s->results.empty()) out += " := ";
      return out + s->name + "(" + args_str(s->args) + ");\n";
    }
    case Stmt::Seq: {
      std::string out;
      for (const auto& b : s->body) out += print_stmt(b, ind);
      return out;
    }
    case Stmt::If: {
      std::string out = p + "if (" + print_expr(s->e) + ") " + block(s->then_s, ind);
      StmtP el = s->else_s;
      while (el && el->kind == Stmt::If) {
        out += " else if (" + print_expr(el->e) + ") " + block(el->then_s, ind);
        el = el->else_s;
      }
      if (el && el->kind != Stmt::Skip) out += " else " + block(el, ind);
      return out + "\n";
    }
    case Stmt::While: return p + "while (" + print_expr(s->e) + ") " + block(s->then_s, ind) + "\n";
  }
  return "";
}

std::string print_program(const Program& prog) {
  auto by_name = [](const auto& v) {
    std::vector<const std::remove_reference_t<decltype(v[0])>*> out;
    for (const auto& x : v) out.push_back(&x);
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->name < b->name; });
    return out;
  };
  std::string out;
  for (const auto* g : by_name(prog.globals)) out += "var " + g->name + ": " + type_str(g->type) + ";\n";
  if (!prog.globals.empty()) out += "\n";
  for (const auto* f : by_name(prog.functions))
    out += "function " + f->name + "(" + decls_str(f->params) + "): " + type_str(f->ret) + ";\n";
  for (const auto* c : by_name(prog.consts))
    out += "const " + c->name + ": " + type_str(c->type) + " = " + std::to_string(c->value) + ";\n";
  for (const auto& a : prog.axioms) out += "axiom " + print_expr(a) + ";\n";
  if (!prog.functions.empty() || !prog.consts.empty() || !prog.axioms.empty()) out += "\n";
  for (const auto* p : by_name(prog.procedures)) {
    out += "procedure " + p->name + "(" + decls_str(p->params) + ")";
    if (!p->returns.empty()) out += " returns (" + decls_str(p->returns) + ")";
    out += "\n{\n";
    for (const auto& l : p->locals) out += pad(1) + "var " + l.name + ": " + type_str(l.type) + ";\n";
    if (p->body->kind == Stmt::Seq)
      for (const auto& b : p->body->body) out += print_stmt(b, 1);
    else if (p->body->kind != Stmt::Skip)
      out += print_stmt(p->body, 1);
    out += "}\n\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Tok {
  enum Kind { Ident, Num, Str, Punct, End } kind = End;
  std::string text;
  int line = 0, col = 0;
};

std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* puncts[] = {"==>", ":=", "::", "==", "!=", "<=", ">=", "&&", "||", "[", "]", "(", ")", "{",
                                 "}",   ";",  ",",  ":",  "<",  ">",  "+",  "-",  "*",  "!",  "="};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Tok t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$' || src[j] == '#'))
        ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Num;
      t.text = src.substr(i, j - i);
      adv(j - i);
    } else if (c == '"') {
      adv(1);
      t.kind = Tok::Str;
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size()) adv(1);
        t.text += src[i];
        adv(1);
      }
      if (i >= src.size())
        throw Error("ParseError", std::to_string(t.line) + ":" + std::to_string(t.col) + ": unterminated string");
      adv(1);
    } else {
      bool found = false;
      for (const char* p : puncts) {
        size_t n = std::char_traits<char>::length(p);
        if (src.compare(i, n, p) == 0) {
          t.kind = Tok::Punct;
          t.text = p;
          adv(n);
          found = true;
          break;
        }
      }
      if (!found)
        throw Error("ParseError",
                    std::to_string(line) + ":" + std::to_string(col) + ": unexpected character '" + c + "'");
    }
    out.push_back(t);
  }
  Tok end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Tok> t) : t_(std::move(t)) {}

  Program program() {
    Program p;
    while (cur().kind != Tok::End) {
      if (accept_kw("var")) {
        std::string n = ident();
        expect(":");
        p.globals.push_back({n, type()});
        expect(";");
      } else if (accept_kw("function")) {
        Function f;
        f.name = ident();
        expect("(");
        f.params = decls(")");
        expect(":");
        f.ret = type();
        expect(";");
        p.functions.push_back(f);
      } else if (accept_kw("const")) {
        Constant c;
        c.name = ident();
        expect(":");
        c.type = type();
        expect("=");
        bool neg = accept("-");
        c.value = number() * (neg ? -1 : 1);
        expect(";");
        p.consts.push_back(c);
      } else if (accept_kw("axiom")) {
        p.axioms.push_back(expr());
        expect(";");
      } else if (accept_kw("procedure")) {
        p.procedures.push_back(procedure());
      } else {
        fail("declaration");
      }
    }
    return p;
  }

 private:
  std::vector<Tok> t_;
  size_t pos_ = 0;

  const Tok& cur() const { return t_[pos_]; }
  [[noreturn]] void fail(const std::string& what) const {
    const Tok& t = cur();
    throw Error("ParseError", std::to_string(t.line) + ":" + std::to_string(t.col) + ": expected " + what + ", found '" +
                                  (t.kind == Tok::End ? std::string("end of input") : t.text) + "'");
  }
  bool is(const std::string& p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_kw(const std::string& k) const { return cur().kind == Tok::Ident && cur().text == k; }
  bool accept(const std::string& p) {
    if (!is(p)) return false;
    ++pos_;
    return true;
  }
  bool accept_kw(const std::string& k) {
    if (!is_kw(k)) return false;
    ++pos_;
    return true;
  }
  void expect(const std::string& p) {
    if (!accept(p)) fail("'" + p + "'");
  }
  std::string ident() {
    if (cur().kind != Tok::Ident) fail("identifier");
    return t_[pos_++].text;
  }
  int64_t number() {
    if (cur().kind != Tok::Num) fail("number");
    return std::stoll(t_[pos_++].text);
  }

  TypeP type() {
    if (accept("[")) {
      TypeP k = type();
      expect("]");
      return Type::map(k, type());
    }
    std::string n = ident();
    if (n == "int") return Type::integer();
    if (n == "bool") return Type::boolean();
    if (n == "Ref") return Type::ref();
    --pos_;
    fail("type");
  }

  std::vector<VarDecl> decls(const std::string& close) {
    std::vector<VarDecl> out;
    if (accept(close)) return out;
    do {
      std::string n = ident();
      expect(":");
      out.push_back({n, type()});
    } while (accept(","));
    expect(close);
    return out;
  }

  Procedure procedure() {
    Procedure p;
    p.name = ident();
    expect("(");
    p.params = decls(")");
    if (accept_kw("returns")) {
      expect("(");
      p.returns = decls(")");
    }
    expect("{");
    while (accept_kw("var")) {
      std::string n = ident();
      expect(":");
      p.locals.push_back({n, type()});
      expect(";");
    }
    std::vector<StmtP> ss;
    while (!is("}")) ss.push_back(stmt());
    expect("}");
    p.body = seq(ss);
    return p;
  }

  StmtP block() {
    expect("{");
    std::vector<StmtP> ss;
    while (!is("}")) ss.push_back(stmt());
    expect("}");
    return seq(ss);
  }

  StmtP stmt() {
    if (accept_kw("skip")) {
      expect(";");
      return skip();
    }
    if (accept_kw("havoc")) {
      std::string x = ident();
      expect(";");
      return havoc(x);
    }
    if (accept_kw("assume")) {
      ExprP e = expr();
      expect(";");
      return assume(e);
    }
    if (accept_kw("assert")) {
      std::string label;
      if (accept("{")) {
        expect(":");
        if (ident() != "loc") fail("loc attribute");
        if (cur().kind != Tok::Str) fail("string");
        label = t_[pos_++].text;
        expect("}");
      }
      ExprP e = expr();
      expect(";");
      return assert_(e, label);
    }
    if (accept_kw("call")) {
      std::vector<std::string> results;
      std::string first = ident();
      if (is(",") || is(":=")) {
        results.push_back(first);
        while (accept(",")) results.push_back(ident());
        expect(":=");
        first = ident();
      }
      expect("(");
      auto args = expr_list(")");
      expect(";");
      return call(first, args, results);
    }
    if (accept_kw("if")) return if_rest();
    if (accept_kw("while")) {
      expect("(");
      ExprP c = expr();
      expect(")");
      return while_(c, block());
    }
    std::string x = ident();
    std::vector<ExprP> keys;
    while (accept("[")) {
      keys.push_back(expr());
      expect("]");
    }
    expect(":=");
    ExprP v = expr();
    expect(";");
    return keys.empty() ? assign(x, v) : store(x, keys, v);
  }

  StmtP if_rest() {
    expect("(");
    ExprP c = expr();
    expect(")");
    StmtP t = block();
    StmtP e;
    if (accept_kw("else")) e = accept_kw("if") ? if_rest() : block();
    return if_(c, t, e);
  }

  std::vector<ExprP> expr_list(const std::string& close) {
    std::vector<ExprP> out;
    if (accept(close)) return out;
    do out.push_back(expr());
    while (accept(","));
    expect(close);
    return out;
  }

  ExprP expr() { return implies(); }

  ExprP implies() {
    ExprP a = binary_level(2);
    if (accept("==>")) return op("==>", a, implies());
    return a;
  }

  static const std::vector<std::vector<std::string>>& levels() {
    static const std::vector<std::vector<std::string>> l = {
        {}, {}, {"||"}, {"&&"}, {"==", "!=", "<", "<=", ">", ">="}, {"+", "-"}, {"*", "div", "mod"}};
    return l;
  }

  std::string match_op(int level) {
    for (const auto& o : levels()[level]) {
      if (o == "div" || o == "mod") {
        if (is_kw(o)) {
          ++pos_;
          return o;
        }
      } else if (is(o)) {
        ++pos_;
        return o;
      }
    }
    return "";
  }

  ExprP binary_level(int level) {
    if (level > 6) return unary();
    ExprP a = binary_level(level + 1);
    if (level == 4) {
      std::string o = match_op(level);
      if (!o.empty()) a = op(o, a, binary_level(level + 1));
      return a;
    }
    for (std::string o = match_op(level); !o.empty(); o = match_op(level)) a = op(o, a, binary_level(level + 1));
    return a;
  }

  ExprP unary() {
    if (accept("!")) return op("!", unary());
    if (accept("-")) return op("neg", unary());
    return atom();
  }

  ExprP atom() {
    if (cur().kind == Tok::Num) return int_const(number());
    if (accept("(")) {
      if (accept_kw("forall")) {
        std::vector<Binder> bs;
        do {
          std::string n = ident();
          expect(":");
          bs.push_back({n, type()});
        } while (accept(","));
        expect("::");
        ExprP body = expr();
        expect(")");
        return forall(bs, body);
      }
      ExprP e = expr();
      expect(")");
      return e;
    }
    if (accept_kw("true")) return bool_const(true);
    if (accept_kw("false")) return bool_const(false);
    if (accept_kw("null")) return null_const();
    std::string n = ident();
    if (accept("(")) return uf(n, expr_list(")"));
    std::vector<ExprP> keys;
    while (accept("[")) {
      keys.push_back(expr());
      expect("]");
    }
    return keys.empty() ? var(n) : select(n, keys);
  }
};

}  // namespace

Program parse_program(const std::string& text) {
  Parser p(lex(text));
  return p.program();
}

// ---------------------------------------------------------------------------
// Typecheck

namespace {

[[noreturn]] void type_error(const std::string& msg) { throw Error("IrTypeError", msg); }

class Checker {
 public:
  explicit Checker(const Program& p) : p_(p) {}

  Program run() {
    Program out = p_;
    for (auto& a : out.axioms) {
      a = expr(a);
      require_bool(a, "axiom");
    }
    for (auto& proc : out.procedures) {
      scope_.clear();
      for (const auto& d : proc.params) declare(d, proc.name);
      for (const auto& d : proc.returns) declare(d, proc.name);
      for (const auto& d : proc.locals) declare(d, proc.name);
      proc_ = proc.name;
      proc.body = stmt(proc.body);
    }
    return out;
  }

 private:
  const Program& p_;
  std::map<std::string, TypeP> scope_;
  std::string proc_;

  void declare(const VarDecl& d, const std::string& proc) {
    if (!scope_.emplace(d.name, d.type).second) type_error(proc + ": duplicate local " + d.name);
  }

  TypeP lookup(const std::string& n) const {
    auto it = scope_.find(n);
    if (it != scope_.end()) return it->second;
    if (const VarDecl* g = p_.find_global(n)) return g->type;
    if (const Constant* c = p_.find_const(n)) return c->type;
    type_error(proc_ + ": unknown variable " + n);
  }

  static void require_bool(const ExprP& e, const std::string& what) {
    if (e->type->kind != Type::Bool) type_error(what + " must be bool: " + print_expr(e));
  }

  static void same(const TypeP& want, const ExprP& e, const std::string& what) {
    if (!type_equal(want, e->type))
      type_error(what + ": expected " + type_str(want) + ", got " + type_str(e->type) + " in " + print_expr(e));
  }

  TypeP select_type(TypeP t, const std::vector<ExprP>& keys, const std::string& base) {
    for (const auto& k : keys) {
      if (t->kind != Type::Map) type_error("too many indices on " + base);
      same(t->key, k, "index of " + base);
      t = t->value;
    }
    return t;
  }

  ExprP expr(const ExprP& e) {
    auto c = std::make_shared<Expr>(*e);
    switch (e->kind) {
      case Expr::Const: break;
      case Expr::Var: c->type = lookup(e->name); break;
      case Expr::Select:
        for (auto& a : c->args) a = expr(a);
        c->type = select_type(lookup(e->name), c->args, e->name);
        break;
      case Expr::UF: {
        const Function* f = p_.find_function(e->name);
        if (!f) type_error("unknown function " + e->name);
        if (f->params.size() != e->args.size()) type_error("arity of " + e->name);
        for (size_t i = 0; i < c->args.size(); ++i) {
          c->args[i] = expr(c->args[i]);
          same(f->params[i].type, c->args[i], "argument of " + e->name);
        }
        c->type = f->ret;
        break;
      }
      case Expr::Forall: {
        auto saved = scope_;
        for (const auto& b : e->binders) {
          if (!b.type->elementary()) type_error("quantified variable " + b.name + " must be elementary");
          scope_[b.name] = b.type;
        }
        c->args[0] = expr(c->args[0]);
        require_bool(c->args[0], "quantifier body");
        scope_ = saved;
        c->type = Type::boolean();
        break;
      }
      case Expr::Op: {
        for (auto& a : c->args) a = expr(a);
        const std::string& o = e->name;
        if (o == "!" || o == "&&" || o == "||" || o == "==>") {
          for (const auto& a : c->args) require_bool(a, "operand of " + o);
          c->type = Type::boolean();
        } else if (o == "==" || o == "!=") {
          if (c->args.size() != 2) type_error("arity of " + o);
          same(c->args[0]->type, c->args[1], "operand of " + o);
          c->type = Type::boolean();
        } else {
          for (const auto& a : c->args) same(Type::integer(), a, "operand of " + o);
          bool cmp = o == "<" || o == "<=" || o == ">" || o == ">=";
          c->type = cmp ? Type::boolean() : Type::integer();
        }
        break;
      }
    }
    return c;
  }

  StmtP stmt(const StmtP& s) {
    auto c = std::make_shared<Stmt>(*s);
    switch (s->kind) {
      case Stmt::Skip: break;
      case Stmt::Havoc: lookup(s->name); break;
      case Stmt::Assign:
        c->e = expr(s->e);
        same(lookup(s->name), c->e, "assignment to " + s->name);
        break;
      case Stmt::Store: {
        for (auto& k : c->args) k = expr(k);
        TypeP t = select_type(lookup(s->name), c->args, s->name);
        c->e = expr(s->e);
        same(t, c->e, "store into " + s->name);
        break;
      }
      case Stmt::Assume:
      case Stmt::Assert:
        c->e = expr(s->e);
        require_bool(c->e, s->kind == Stmt::Assume ? "assume" : "assert");
        break;
      case Stmt::Call: {
        const Procedure* p = p_.find_proc(s->name);
        if (!p) type_error(proc_ + ": call to unknown procedure " + s->name);
        if (p->params.size() != s->args.size()) type_error(proc_ + ": argument count of call to " + s->name);
        if (p->returns.size() != s->results.size() && !s->results.empty())
          type_error(proc_ + ": result count of call to " + s->name);
        for (size_t i = 0; i < c->args.size(); ++i) {
          c->args[i] = expr(c->args[i]);
          same(p->params[i].type, c->args[i], "argument " + p->params[i].name + " of " + s->name);
        }
        for (size_t i = 0; i < s->results.size(); ++i)
          if (!type_equal(lookup(s->results[i]), p->returns[i].type))
            type_error(proc_ + ": result " + s->results[i] + " of call to " + s->name + " has the wrong type");
        break;
      }
      case Stmt::Seq:
        for (auto& b : c->body) b = stmt(b);
        break;
      case Stmt::If:
      case Stmt::While:
        c->e = expr(s->e);
        require_bool(c->e, "condition");
        c->then_s = stmt(s->then_s);
        if (s->else_s) c->else_s = stmt(s->else_s);
        break;
    }
    return c;
  }
};

}  // namespace

Program typecheck(const Program& p) { return Checker(p).run(); }

}  // namespace vsol::vir
