#include <cctype>
#include <set>

#include "vsol/sol.hpp"

namespace vsol::sol {

namespace {

struct Token {
  enum Kind { Ident, Number, String, Punct, End };
  Kind kind = End;
  std::string text;
  Loc loc;
};

// Constructs outside the subset. They are rejected rather than skipped so a
// verification result never silently ignores code.
const std::set<std::string> kUnsupported = {
    "payable", "assembly", "struct", "library", "selfdestruct", "suicide", "event", "emit",
    "interface", "import", "using", "delegatecall", "send", "transfer", "tx", "fallback",
    "receive", "modifier_args", "abstract", "try", "catch", "unchecked", "ether", "wei"};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
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
  static const char* puncts[] = {"==>", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
                                 "*=", "{",  "}",  "(",  ")",  "[",  "]",  ";",  ",",  ".",  "=",  "<",
                                 ">",  "+",  "-",  "*",  "/",  "%",  "!",  "?",  ":"};
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
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      adv(2);
      while (i < src.size() && !(src[i] == '*' && i + 1 < src.size() && src[i + 1] == '/')) adv(1);
      if (i >= src.size()) throw Error("ParseError", std::to_string(line) + ":" + std::to_string(col) + ": expected */");
      adv(2);
      continue;
    }
    Token t;
    t.loc = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$')) ++j;
      t.kind = Token::Ident;
      t.text = src.substr(i, j - i);
      adv(j - i);
      if (t.text == "pragma") {
        // Version pragmas carry free-form text; drop everything up to ';'.
        while (i < src.size() && src[i] != ';') adv(1);
        if (i < src.size()) adv(1);
        continue;
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      if (c == '0' && j + 1 < src.size() && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
        j += 2;
        while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
      } else {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.kind = Token::Number;
      t.text = src.substr(i, j - i);
      adv(j - i);
    } else if (c == '"' || c == '\'') {
      size_t j = i + 1;
      std::string val;
      while (j < src.size() && src[j] != c) {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        val += src[j++];
      }
      if (j >= src.size()) throw Error("ParseError", t.loc.str() + ": expected closing quote");
      t.kind = Token::String;
      t.text = val;
      adv(j + 1 - i);
    } else {
      bool found = false;
      for (const char* p : puncts) {
        size_t n = std::char_traits<char>::length(p);
        if (src.compare(i, n, p) == 0) {
          t.kind = Token::Punct;
          t.text = p;
          adv(n);
          found = true;
          break;
        }
      }
      if (!found) throw Error("ParseError", t.loc.str() + ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back(t);
  }
  Token end;
  end.kind = Token::End;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

bool is_int_type_name(const std::string& s) {
  if (s == "int" || s == "uint") return true;
  auto digits = [](const std::string& r) {
    if (r.empty()) return false;
    for (char c : r)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  if (s.rfind("uint", 0) == 0) return digits(s.substr(4));
  if (s.rfind("int", 0) == 0) return digits(s.substr(3));
  return false;
}

bool is_elementary_kw(const std::string& s) {
  return is_int_type_name(s) || s == "bool" || s == "string" || s == "address" || s == "byte";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Program program() {
    Program p;
    while (!at_end()) {
      if (is_kw("contract")) {
        p.contracts.push_back(contract());
      } else {
        unsupported_or_fail("contract");
      }
    }
    return p;
  }

 private:
  std::vector<Token> t_;
  size_t pos_ = 0;
  std::string cur_contract_;

  const Token& peek(size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::End; }
  bool is_punct(const char* p, size_t k = 0) const { return peek(k).kind == Token::Punct && peek(k).text == p; }
  bool is_kw(const char* w, size_t k = 0) const { return peek(k).kind == Token::Ident && peek(k).text == w; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& tk = peek();
    std::string got = tk.kind == Token::End ? "end of input" : "'" + tk.text + "'";
    throw Error("ParseError", tk.loc.str() + ": expected " + expected + ", got " + got);
  }

  [[noreturn]] void unsupported_or_fail(const std::string& expected) const {
    if (peek().kind == Token::Ident && kUnsupported.count(peek().text))
      throw Error("UnsupportedFeature", peek().text + " at " + peek().loc.str());
    fail(expected);
  }

  Token expect(const char* p) {
    if (!is_punct(p)) fail(std::string("'") + p + "'");
    return t_[pos_++];
  }

  Token ident() {
    if (peek().kind != Token::Ident) fail("identifier");
    if (kUnsupported.count(peek().text)) throw Error("UnsupportedFeature", peek().text + " at " + peek().loc.str());
    return t_[pos_++];
  }

  void expect_kw(const char* w) {
    if (!is_kw(w)) fail(std::string("'") + w + "'");
    ++pos_;
  }

  Contract contract() {
    Contract c;
    c.loc = peek().loc;
    expect_kw("contract");
    c.name = ident().text;
    cur_contract_ = c.name;
    if (is_kw("is")) {
      ++pos_;
      c.bases.push_back(ident().text);
      while (is_punct(",")) {
        ++pos_;
        c.bases.push_back(ident().text);
      }
    }
    expect("{");
    bool have_ctor = false;
    std::vector<StmtP> inits;
    while (!is_punct("}")) {
      if (at_end()) fail("'}'");
      if (is_kw("enum")) {
        EnumDef e;
        e.loc = peek().loc;
        ++pos_;
        e.name = ident().text;
        expect("{");
        e.members.push_back(ident().text);
        while (is_punct(",")) {
          ++pos_;
          e.members.push_back(ident().text);
        }
        expect("}");
        c.enums.push_back(e);
      } else if (is_kw("modifier")) {
        Modifier m;
        m.loc = peek().loc;
        ++pos_;
        m.name = ident().text;
        if (is_punct("(")) {
          ++pos_;
          if (!is_punct(")")) throw Error("UnsupportedFeature", "modifier parameters at " + peek().loc.str());
          expect(")");
        }
        m.body = block(true);
        c.modifiers.push_back(m);
      } else if (is_kw("constructor")) {
        if (have_ctor) throw Error("ParseError", peek().loc.str() + ": duplicate constructor");
        Loc l = peek().loc;
        ++pos_;
        c.ctor = function_rest("", l, true);
        have_ctor = true;
      } else if (is_kw("function")) {
        Loc l = peek().loc;
        ++pos_;
        std::string name = ident().text;
        bool is_ctor = name == c.name;
        Function f = function_rest(name, l, is_ctor);
        if (is_ctor) {
          if (have_ctor) throw Error("ParseError", l.str() + ": duplicate constructor");
          c.ctor = f;
          have_ctor = true;
        } else {
          c.functions.push_back(f);
        }
      } else {
        state_var(c, inits);
      }
    }
    expect("}");
    if (!have_ctor) {
      c.ctor.implicit = true;
      c.ctor.loc = c.loc;
      c.ctor.body = Stmt::make(Stmt::Block, c.loc);
    }
    c.ctor.name = c.name;
    c.ctor.is_ctor = true;
    // State variable initializers run at the start of the constructor body.
    if (!inits.empty()) {
      auto b = Stmt::make(Stmt::Block, c.ctor.body->loc);
      b->body = inits;
      for (auto& s : c.ctor.body->body) b->body.push_back(s);
      c.ctor.body = b;
    }
    return c;
  }

  void state_var(Contract& c, std::vector<StmtP>& inits) {
    VarDecl v;
    v.loc = peek().loc;
    v.type = type();
    while (is_kw("public") || is_kw("private") || is_kw("internal")) ++pos_;
    if (is_kw("constant") || is_kw("immutable")) throw Error("UnsupportedFeature", peek().text + " at " + peek().loc.str());
    v.name = ident().text;
    if (is_punct("=")) {
      Loc l = peek().loc;
      ++pos_;
      auto s = Stmt::make(Stmt::Assign, l);
      s->lhs = Expr::make(Expr::Ident, v.loc);
      s->lhs->name = v.name;
      s->rhs = expr();
      inits.push_back(s);
    }
    expect(";");
    c.state_vars.push_back(v);
  }

  Function function_rest(const std::string& name, Loc l, bool is_ctor) {
    Function f;
    f.name = name;
    f.loc = l;
    f.is_ctor = is_ctor;
    expect("(");
    if (!is_punct(")")) {
      f.params.push_back(param());
      while (is_punct(",")) {
        ++pos_;
        f.params.push_back(param());
      }
    }
    expect(")");
    while (!is_punct("{")) {
      if (at_end()) fail("'{'");
      if (is_kw("public") || is_kw("external")) {
        f.is_public = true;
        ++pos_;
      } else if (is_kw("internal") || is_kw("private")) {
        f.is_public = false;
        ++pos_;
      } else if (is_kw("view") || is_kw("pure") || is_kw("constant")) {
        ++pos_;
      } else if (is_kw("returns")) {
        ++pos_;
        expect("(");
        f.ret = type();
        skip_location();
        if (peek().kind == Token::Ident && !is_punct(")")) ++pos_;
        if (is_punct(",")) throw Error("UnsupportedFeature", "multiple return values at " + peek().loc.str());
        expect(")");
      } else if (peek().kind == Token::Ident) {
        ModifierRef m;
        m.loc = peek().loc;
        m.name = ident().text;
        if (is_punct("(")) {
          ++pos_;
          if (!is_punct(")")) {
            if (is_ctor) throw Error("UnsupportedFeature", "base constructor arguments at " + m.loc.str());
            throw Error("UnsupportedFeature", "modifier arguments at " + m.loc.str());
          }
          expect(")");
        }
        f.modifiers.push_back(m);
      } else {
        fail("'{'");
      }
    }
    f.body = block(false);
    return f;
  }

  void skip_location() {
    while (is_kw("memory") || is_kw("storage") || is_kw("calldata")) ++pos_;
  }

  VarDecl param() {
    VarDecl v;
    v.loc = peek().loc;
    v.type = type();
    skip_location();
    v.name = ident().text;
    return v;
  }

  TypeP type() {
    TypeP t;
    if (is_kw("mapping")) {
      ++pos_;
      expect("(");
      TypeP k = type();
      expect("=>");
      TypeP v = type();
      expect(")");
      t = SolType::mapping(k, v);
    } else {
      Token id = ident();
      if (is_int_type_name(id.text)) {
        t = SolType::integer();
      } else if (id.text == "bool") {
        t = SolType::boolean();
      } else if (id.text == "string") {
        t = SolType::string_t();
      } else if (id.text == "address") {
        if (is_kw("payable")) throw Error("UnsupportedFeature", "payable at " + peek().loc.str());
        t = SolType::address();
      } else if (id.text == "bytes" || id.text == "byte" || id.text.rfind("bytes", 0) == 0 ||
                 id.text == "fixed" || id.text == "ufixed") {
        throw Error("UnsupportedFeature", id.text + " at " + id.loc.str());
      } else {
        t = SolType::named(id.text);
      }
    }
    while (is_punct("[") && is_punct("]", 1)) {
      pos_ += 2;
      t = SolType::array(t);
    }
    if (is_punct("[")) throw Error("UnsupportedFeature", "fixed-size arrays at " + peek().loc.str());
    return t;
  }

  // Does a local variable declaration start here?
  bool at_decl() const {
    if (peek().kind != Token::Ident) return false;
    const std::string& w = peek().text;
    if (w == "mapping") return true;
    if (is_elementary_kw(w)) return !is_punct("(", 1);
    // Named type: "T x", "T storage x", "T[] x".
    if (peek(1).kind == Token::Ident) return true;
    if (is_punct("[", 1) && is_punct("]", 2)) return true;
    return false;
  }

  StmtP block(bool allow_placeholder) {
    auto b = Stmt::make(Stmt::Block, peek().loc);
    expect("{");
    while (!is_punct("}")) {
      if (at_end()) fail("'}'");
      b->body.push_back(stmt(allow_placeholder));
    }
    expect("}");
    return b;
  }

  StmtP stmt(bool allow_placeholder) {
    Loc l = peek().loc;
    if (is_punct("{")) return block(allow_placeholder);
    if (is_kw("_") && is_punct(";", 1)) {
      if (!allow_placeholder) throw Error("ParseError", l.str() + ": placeholder '_' outside modifier");
      pos_ += 2;
      return Stmt::make(Stmt::Placeholder, l);
    }
    if (is_kw("if")) {
      ++pos_;
      auto s = Stmt::make(Stmt::If, l);
      expect("(");
      s->cond = expr();
      expect(")");
      s->then_s = stmt(allow_placeholder);
      if (is_kw("else")) {
        ++pos_;
        s->else_s = stmt(allow_placeholder);
      }
      return s;
    }
    if (is_kw("while")) {
      ++pos_;
      auto s = Stmt::make(Stmt::While, l);
      expect("(");
      s->cond = expr();
      expect(")");
      s->then_s = stmt(allow_placeholder);
      return s;
    }
    if (is_kw("for")) return for_stmt(allow_placeholder);
    if (is_kw("do") || is_kw("break") || is_kw("continue"))
      throw Error("UnsupportedFeature", peek().text + " at " + l.str());
    if (is_kw("require") || is_kw("assert")) {
      bool req = peek().text == "require";
      ++pos_;
      auto s = Stmt::make(req ? Stmt::Require : Stmt::Assert, l);
      expect("(");
      s->cond = expr();
      if (req && is_punct(",")) {
        ++pos_;
        if (peek().kind != Token::String) fail("string message");
        ++pos_;
      }
      expect(")");
      expect(";");
      return s;
    }
    if (is_kw("revert") || is_kw("throw")) {
      bool thr = peek().text == "throw";
      ++pos_;
      if (!thr) {
        expect("(");
        if (peek().kind == Token::String) ++pos_;
        expect(")");
      }
      expect(";");
      auto s = Stmt::make(Stmt::Require, l);
      s->cond = Expr::make(Expr::BoolLit, l);
      s->cond->ival = 0;
      return s;
    }
    if (is_kw("return")) {
      ++pos_;
      auto s = Stmt::make(Stmt::Return, l);
      if (!is_punct(";")) s->rhs = expr();
      expect(";");
      return s;
    }
    if (peek().kind == Token::Ident && kUnsupported.count(peek().text))
      throw Error("UnsupportedFeature", peek().text + " at " + l.str());
    if (at_decl()) {
      auto s = Stmt::make(Stmt::VarDecl, l);
      s->decl_type = type();
      skip_location();
      s->name = ident().text;
      if (is_punct("=")) {
        ++pos_;
        s->rhs = expr();
      }
      expect(";");
      return s;
    }
    StmtP s = simple_stmt();
    expect(";");
    return s;
  }

  // Assignment, compound assignment, increment, push, or call statement.
  StmtP simple_stmt() {
    Loc l = peek().loc;
    ExprP e = expr();
    auto assign = [&](ExprP rhs) {
      auto s = Stmt::make(Stmt::Assign, l);
      s->lhs = e;
      s->rhs = rhs;
      return s;
    };
    auto binop = [&](const char* op, ExprP rhs) {
      auto b = Expr::make(Expr::Binary, l);
      b->name = op;
      b->args = {clone(e), rhs};
      return b;
    };
    if (is_punct("=")) {
      ++pos_;
      return assign(expr());
    }
    if (is_punct("+=") || is_punct("-=") || is_punct("*=")) {
      std::string op = peek().text.substr(0, 1);
      ++pos_;
      return assign(binop(op.c_str(), expr()));
    }
    if (is_punct("++") || is_punct("--")) {
      std::string op = peek().text.substr(0, 1);
      ++pos_;
      auto one = Expr::make(Expr::IntLit, l);
      one->ival = 1;
      return assign(binop(op.c_str(), one));
    }
    if (e->kind == Expr::Call && e->base && e->name == "push") {
      if (e->args.size() != 1) throw Error("ParseError", l.str() + ": expected one argument to push");
      auto s = Stmt::make(Stmt::Push, l);
      s->lhs = e->base;
      s->rhs = e->args[0];
      return s;
    }
    if (e->kind != Expr::Call) throw Error("ParseError", l.str() + ": expected assignment or call statement");
    auto s = Stmt::make(Stmt::ExprStmt, l);
    s->rhs = e;
    return s;
  }

  // for (init; cond; step) body  =>  { init; while (cond) { body; step } }
  StmtP for_stmt(bool allow_placeholder) {
    Loc l = peek().loc;
    ++pos_;
    expect("(");
    auto outer = Stmt::make(Stmt::Block, l);
    if (!is_punct(";")) {
      if (at_decl()) {
        auto d = Stmt::make(Stmt::VarDecl, peek().loc);
        d->decl_type = type();
        d->name = ident().text;
        if (is_punct("=")) {
          ++pos_;
          d->rhs = expr();
        }
        outer->body.push_back(d);
      } else {
        outer->body.push_back(simple_stmt());
      }
    }
    expect(";");
    auto w = Stmt::make(Stmt::While, l);
    if (is_punct(";")) {
      w->cond = Expr::make(Expr::BoolLit, l);
      w->cond->ival = 1;
    } else {
      w->cond = expr();
    }
    expect(";");
    StmtP step;
    if (!is_punct(")")) step = simple_stmt();
    expect(")");
    auto body = Stmt::make(Stmt::Block, peek().loc);
    body->body.push_back(stmt(allow_placeholder));
    if (step) body->body.push_back(step);
    w->then_s = body;
    outer->body.push_back(w);
    return outer;
  }

  ExprP expr() { return implies(); }

  ExprP bin(const std::string& op, ExprP a, ExprP b, Loc l) {
    auto e = Expr::make(Expr::Binary, l);
    e->name = op;
    e->args = {std::move(a), std::move(b)};
    return e;
  }

  ExprP implies() {
    Loc l = peek().loc;
    ExprP a = or_expr();
    if (is_punct("==>")) {
      ++pos_;
      return bin("==>", a, implies(), l);
    }
    return a;
  }

  ExprP or_expr() {
    ExprP a = and_expr();
    while (is_punct("||")) {
      Loc l = peek().loc;
      ++pos_;
      a = bin("||", a, and_expr(), l);
    }
    return a;
  }

  ExprP and_expr() {
    ExprP a = eq_expr();
    while (is_punct("&&")) {
      Loc l = peek().loc;
      ++pos_;
      a = bin("&&", a, eq_expr(), l);
    }
    return a;
  }

  ExprP eq_expr() {
    ExprP a = rel_expr();
    while (is_punct("==") || is_punct("!=")) {
      Loc l = peek().loc;
      std::string op = t_[pos_++].text;
      a = bin(op, a, rel_expr(), l);
    }
    return a;
  }

  ExprP rel_expr() {
    ExprP a = add_expr();
    while (is_punct("<") || is_punct("<=") || is_punct(">") || is_punct(">=")) {
      Loc l = peek().loc;
      std::string op = t_[pos_++].text;
      a = bin(op, a, add_expr(), l);
    }
    return a;
  }

  ExprP add_expr() {
    ExprP a = mul_expr();
    while (is_punct("+") || is_punct("-")) {
      Loc l = peek().loc;
      std::string op = t_[pos_++].text;
      a = bin(op, a, mul_expr(), l);
    }
    return a;
  }

  ExprP mul_expr() {
    ExprP a = unary();
    while (is_punct("*") || is_punct("/") || is_punct("%")) {
      Loc l = peek().loc;
      std::string op = t_[pos_++].text;
      a = bin(op, a, unary(), l);
    }
    return a;
  }

  ExprP unary() {
    if (is_punct("!") || is_punct("-")) {
      Loc l = peek().loc;
      std::string op = t_[pos_++].text;
      auto e = Expr::make(Expr::Unary, l);
      e->name = op;
      e->args = {unary()};
      return e;
    }
    return postfix(primary());
  }

  std::vector<ExprP> call_args() {
    std::vector<ExprP> a;
    expect("(");
    if (!is_punct(")")) {
      a.push_back(expr());
      while (is_punct(",")) {
        ++pos_;
        a.push_back(expr());
      }
    }
    expect(")");
    return a;
  }

  ExprP postfix(ExprP e) {
    for (;;) {
      Loc l = peek().loc;
      if (is_punct(".")) {
        ++pos_;
        Token m = ident();
        if (m.text == "call" || m.text == "send" || m.text == "transfer" || m.text == "delegatecall" ||
            m.text == "balance" || m.text == "pop")
          throw Error("UnsupportedFeature", m.text + " at " + m.loc.str());
        if (is_punct("(")) {
          auto c = Expr::make(Expr::Call, l);
          c->base = e;
          c->name = m.text;
          c->args = call_args();
          e = c;
        } else {
          auto mem = Expr::make(Expr::Member, l);
          mem->base = e;
          mem->name = m.text;
          e = mem;
        }
      } else if (is_punct("[")) {
        ++pos_;
        auto ix = Expr::make(Expr::Index, l);
        ix->base = e;
        ix->args = {expr()};
        expect("]");
        e = ix;
      } else {
        return e;
      }
    }
  }

  ExprP primary() {
    Loc l = peek().loc;
    const Token& tk = peek();
    if (tk.kind == Token::Number) {
      ++pos_;
      auto e = Expr::make(Expr::IntLit, l);
      e->hex = tk.text.size() > 1 && (tk.text[1] == 'x' || tk.text[1] == 'X');
      try {
        e->ival = static_cast<int64_t>(std::stoull(tk.text, nullptr, e->hex ? 16 : 10));
      } catch (...) {
        throw Error("UnsupportedFeature", "integer literal out of range at " + l.str());
      }
      if (is_kw("ether") || is_kw("wei") || is_kw("seconds") || is_kw("days"))
        throw Error("UnsupportedFeature", peek().text + " at " + peek().loc.str());
      return e;
    }
    if (tk.kind == Token::String) {
      ++pos_;
      auto e = Expr::make(Expr::StrLit, l);
      e->name = tk.text;
      return e;
    }
    if (is_punct("(")) {
      ++pos_;
      ExprP e = expr();
      expect(")");
      return e;
    }
    if (is_kw("true") || is_kw("false")) {
      auto e = Expr::make(Expr::BoolLit, l);
      e->ival = tk.text == "true";
      ++pos_;
      return e;
    }
    if (is_kw("this")) {
      ++pos_;
      return Expr::make(Expr::This, l);
    }
    if (is_kw("new")) {
      ++pos_;
      auto e = Expr::make(Expr::New, l);
      e->new_type = type();
      e->args = call_args();
      return e;
    }
    if (is_kw("address") && is_punct("(", 1)) {
      pos_ += 2;
      ExprP inner = expr();
      expect(")");
      if (inner->kind == Expr::IntLit && inner->ival == 0) return Expr::make(Expr::Null, l);
      throw Error("UnsupportedFeature", "address conversion at " + l.str());
    }
    if (peek().kind == Token::Ident && is_int_type_name(peek().text) && is_punct("(", 1)) {
      // Integer conversions are the identity on unbounded integers.
      pos_ += 2;
      ExprP inner = expr();
      expect(")");
      return inner;
    }
    if (peek().kind == Token::Ident) {
      Token id = ident();
      if (is_punct("(")) {
        auto c = Expr::make(Expr::Call, l);
        c->name = id.text;
        c->args = call_args();
        if (id.text == "nondet") {
          if (!c->args.empty()) throw Error("ParseError", l.str() + ": nondet takes no arguments");
          c->kind = Expr::Nondet;
        }
        return c;
      }
      auto e = Expr::make(Expr::Ident, l);
      e->name = id.text;
      return e;
    }
    fail("expression");
  }
};

}  // namespace

Program parse_contract(const std::string& source) {
  Parser p(lex(source));
  return p.program();
}

}  // namespace vsol::sol
