#include "p2sc/parser.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "lexer.hpp"

namespace p2sc {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + msg),
      message_(msg), line_(line), column_(column) {}

namespace {

using detail::Tok;
using detail::Token;

const std::unordered_set<std::string> kKeywords = {
    "var",    "proc",      "reg",    "assume",    "if",     "then", "else",
    "while",  "do",        "terminated", "atomic", "constrain", "choose"};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    expect_word("var");
    while (!is_sym(";")) {
      VarDecl d;
      d.name = name("variable name");
      while (accept_sym("[")) {
        const Token& n = expect(Tok::Number, "array dimension");
        d.dims.push_back(std::stoi(n.text));
        expect_sym("]");
      }
      if (p.var_index(d.name) >= 0)
        fail("duplicate variable '" + d.name + "'", prev());
      p.vars.push_back(std::move(d));
      accept_sym(",");
    }
    expect_sym(";");
    vars_ = &p.vars;
    while (is_word("proc"))
      p.procs.push_back(process());
    if (peek().kind != Tok::End)
      fail("expected 'proc' or end of input", peek());
    return p;
  }

private:
  Process process() {
    expect_word("proc");
    Process pr;
    pr.name = name("process name");
    regs_.clear();
    if (accept_word("reg")) {
      while (!is_sym(";")) {
        std::string r = name("register name");
        if (std::find(pr.regs.begin(), pr.regs.end(), r) != pr.regs.end())
          fail("duplicate register '" + r + "'", prev());
        pr.regs.push_back(r);
        accept_sym(",");
      }
      expect_sym(";");
    }
    regs_.insert(pr.regs.begin(), pr.regs.end());
    pr.body = instrs();
    return pr;
  }

  std::vector<Instr> instrs() {
    std::vector<Instr> out;
    while (!is_sym("}") && !is_word("proc") && peek().kind != Tok::End)
      out.push_back(instr());
    return out;
  }

  Instr instr() {
    const Token& lt = peek();
    if (lt.kind != Tok::Number && !(lt.kind == Tok::Ident && !kKeywords.count(lt.text)))
      fail("expected instruction label", lt);
    ++pos_;
    Instr in;
    in.label = lt.text;
    if (!labels_.insert(in.label).second)
      fail("duplicate label '" + in.label + "'", lt);
    expect_sym(":");
    if (accept_word("atomic")) {
      in.atomic = true;
      expect_sym("{");
      in.prelude = atomic_block();
      expect_sym("}");
      if (accept_sym(";")) {
        in.stmt.kind = StmtKind::Skip;
        return in;
      }
    }
    in.stmt = stmt();
    return in;
  }

  Stmt stmt() {
    Stmt s;
    const Token& t = peek();
    if (accept_word("assume")) {
      s.kind = StmtKind::Assume;
      s.expr = expr();
      expect_sym(";");
    } else if (accept_word("terminated")) {
      s.kind = StmtKind::Terminated;
      expect_sym(";");
    } else if (accept_word("if")) {
      s.kind = StmtKind::If;
      s.expr = expr();
      expect_word("then");
      s.then_block = braced_instrs();
      if (accept_word("else"))
        s.else_block = braced_instrs();
      accept_sym(";");
    } else if (accept_word("while")) {
      s.kind = StmtKind::While;
      s.expr = expr();
      expect_word("do");
      s.then_block = braced_instrs();
      accept_sym(";");
    } else if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
      ++pos_;
      expect_sym(":=");
      if (regs_.count(t.text)) {
        s.kind = StmtKind::Read;
        s.reg = t.text;
        const Token& v = peek();
        s.var = name("variable");
        if (!is_var(s.var))
          fail("read source '" + s.var + "' is not a declared variable", v);
      } else if (is_var(t.text)) {
        s.kind = StmtKind::Write;
        s.var = t.text;
        s.expr = expr();
      } else {
        fail("undeclared register or variable '" + t.text + "'", t);
      }
      expect_sym(";");
    } else {
      fail("expected statement", t);
    }
    return s;
  }

  std::vector<Instr> braced_instrs() {
    expect_sym("{");
    auto out = instrs();
    expect_sym("}");
    return out;
  }

  std::vector<AtomicStmt> atomic_block() {
    std::vector<AtomicStmt> out;
    while (!is_sym("}")) {
      if (accept_word("constrain")) {
        out.push_back(AtomicStmt::constrain(expr()));
        expect_sym(";");
      } else if (accept_word("if")) {
        Expr c = expr();
        expect_word("then");
        expect_sym("{");
        auto th = atomic_block();
        expect_sym("}");
        std::vector<AtomicStmt> el;
        if (accept_word("else")) {
          expect_sym("{");
          el = atomic_block();
          expect_sym("}");
        }
        accept_sym(";");
        out.push_back(AtomicStmt::when(std::move(c), std::move(th), std::move(el)));
      } else {
        const Token& t = peek();
        LValue lv;
        lv.name = name("assignment target");
        if (regs_.count(lv.name)) {
          lv.is_register = true;
        } else if (is_var(lv.name)) {
          while (accept_sym("[")) {
            lv.indices.push_back(expr());
            expect_sym("]");
          }
        } else {
          fail("undeclared register or variable '" + lv.name + "'", t);
        }
        expect_sym(":=");
        out.push_back(AtomicStmt::assign(std::move(lv), expr()));
        expect_sym(";");
      }
    }
    return out;
  }

  // Precedence climbing; all binary operators are left-associative.
  static int prec(const std::string& s) {
    if (s == "||") return 1;
    if (s == "&&") return 2;
    if (s == "=" || s == "!=") return 3;
    if (s == "<" || s == "<=" || s == ">" || s == ">=") return 4;
    if (s == "+" || s == "-") return 5;
    if (s == "*" || s == "%") return 6;
    return 0;
  }
  static BinOp to_op(const std::string& s) {
    if (s == "||") return BinOp::Or;
    if (s == "&&") return BinOp::And;
    if (s == "=") return BinOp::Eq;
    if (s == "!=") return BinOp::Ne;
    if (s == "<") return BinOp::Lt;
    if (s == "<=") return BinOp::Le;
    if (s == ">") return BinOp::Gt;
    if (s == ">=") return BinOp::Ge;
    if (s == "+") return BinOp::Add;
    if (s == "-") return BinOp::Sub;
    if (s == "*") return BinOp::Mul;
    return BinOp::Mod;
  }

  Expr expr(int min_prec = 1) {
    Expr lhs = unary();
    while (peek().kind == Tok::Sym && prec(peek().text) >= min_prec) {
      std::string op = peek().text;
      ++pos_;
      Expr rhs = expr(prec(op) + 1);
      lhs = Expr::binary(to_op(op), std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary() {
    if (accept_sym("!"))
      return Expr::negate(unary());
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      return Expr::constant(std::stoll(t.text));
    }
    if (accept_sym("(")) {
      Expr e = expr();
      expect_sym(")");
      return e;
    }
    if (accept_word("choose")) {
      expect_sym("[");
      Value lo = std::stoll(expect(Tok::Number, "range bound").text);
      expect_sym("..");
      Value hi = std::stoll(expect(Tok::Number, "range bound").text);
      expect_sym("]");
      if (hi < lo)
        fail("empty choose range", t);
      return Expr::choose(lo, hi);
    }
    if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
      ++pos_;
      if (regs_.count(t.text))
        return Expr::reg(t.text);
      if (is_var(t.text)) {
        std::vector<Expr> idx;
        while (accept_sym("[")) {
          idx.push_back(expr());
          expect_sym("]");
        }
        return Expr::var(t.text, std::move(idx));
      }
      fail("undeclared register or variable '" + t.text + "'", t);
    }
    fail("expected expression", t);
  }

  bool is_var(const std::string& n) const {
    return std::any_of(vars_->begin(), vars_->end(),
                       [&](const VarDecl& d) { return d.name == n; });
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& prev() const { return toks_[pos_ - 1]; }
  bool is_sym(const char* s) const {
    return peek().kind == Tok::Sym && peek().text == s;
  }
  bool is_word(const char* s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  bool accept_sym(const char* s) {
    if (!is_sym(s))
      return false;
    ++pos_;
    return true;
  }
  bool accept_word(const char* s) {
    if (!is_word(s))
      return false;
    ++pos_;
    return true;
  }
  void expect_sym(const char* s) {
    if (!accept_sym(s))
      fail(std::string("expected '") + s + "'", peek());
  }
  void expect_word(const char* s) {
    if (!accept_word(s))
      fail(std::string("expected '") + s + "'", peek());
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k)
      fail(std::string("expected ") + what, peek());
    return toks_[pos_++];
  }
  std::string name(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text))
      fail(std::string("expected ") + what, t);
    ++pos_;
    return t.text;
  }
  [[noreturn]] static void fail(const std::string& msg, const Token& at) {
    std::string got = at.kind == Tok::End ? "end of input" : "'" + at.text + "'";
    throw ParseError(msg + " (got " + got + ")", at.line, at.column);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::vector<VarDecl>* vars_ = nullptr;
  std::set<std::string> regs_;
  std::set<std::string> labels_;
};

} // namespace

Program parse_program(std::string_view text) {
  Parser p(detail::tokenize(text));
  return p.program();
}

} // namespace p2sc
