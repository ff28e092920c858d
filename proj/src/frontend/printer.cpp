#include <sstream>

#include "p2sc/parser.hpp"

namespace p2sc {

namespace {

int prec(BinOp op) {
  switch (op) {
  case BinOp::Or: return 1;
  case BinOp::And: return 2;
  case BinOp::Eq:
  case BinOp::Ne: return 3;
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Gt:
  case BinOp::Ge: return 4;
  case BinOp::Add:
  case BinOp::Sub: return 5;
  case BinOp::Mul:
  case BinOp::Mod: return 6;
  }
  return 0;
}

const char* spelling(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Mod: return "%";
  case BinOp::Eq: return "=";
  case BinOp::Ne: return "!=";
  case BinOp::Lt: return "<";
  case BinOp::Le: return "<=";
  case BinOp::Gt: return ">";
  case BinOp::Ge: return ">=";
  case BinOp::And: return "&&";
  case BinOp::Or: return "||";
  }
  return "?";
}

// `ctx` is the minimum precedence the printed form must bind at.
void put(std::ostream& os, const Expr& e, int ctx) {
  switch (e.kind) {
  case ExprKind::Const:
    os << e.value;
    return;
  case ExprKind::Reg:
    os << e.name;
    return;
  case ExprKind::Var:
    os << e.name;
    for (const auto& i : e.args) {
      os << '[';
      put(os, i, 0);
      os << ']';
    }
    return;
  case ExprKind::Choose:
    os << "choose[" << e.value << ".." << e.hi << ']';
    return;
  case ExprKind::Not:
    os << '!';
    put(os, e.args[0], 7);
    return;
  case ExprKind::Binary: {
    int p = prec(e.op);
    bool paren = p < ctx;
    if (paren)
      os << '(';
    put(os, e.args[0], p);
    os << ' ' << spelling(e.op) << ' ';
    put(os, e.args[1], p + 1);
    if (paren)
      os << ')';
    return;
  }
  }
}

class Printer {
public:
  std::string run(const Program& p) {
    os_ << "var";
    for (std::size_t i = 0; i < p.vars.size(); ++i) {
      os_ << (i ? ", " : " ") << p.vars[i].name;
      for (int d : p.vars[i].dims)
        os_ << '[' << d << ']';
    }
    os_ << ";\n";
    for (const auto& pr : p.procs) {
      os_ << "\nproc " << pr.name << "\n  reg";
      for (std::size_t i = 0; i < pr.regs.size(); ++i)
        os_ << (i ? ", " : " ") << pr.regs[i];
      os_ << ";\n";
      block(pr.body, 1);
    }
    return os_.str();
  }

private:
  void indent(int d) {
    for (int i = 0; i < d; ++i)
      os_ << "  ";
  }

  void block(const std::vector<Instr>& b, int d) {
    for (const auto& i : b)
      instr(i, d);
  }

  void instr(const Instr& in, int d) {
    indent(d);
    os_ << in.label << ": ";
    if (in.atomic) {
      os_ << "atomic {\n";
      atomic(in.prelude, d + 1);
      indent(d);
      os_ << "}";
      if (in.stmt.kind == StmtKind::Skip) {
        os_ << ";\n";
        return;
      }
      os_ << ' ';
    }
    const Stmt& s = in.stmt;
    switch (s.kind) {
    case StmtKind::Read:
      os_ << s.reg << " := " << s.var << ";\n";
      break;
    case StmtKind::Write:
      os_ << s.var << " := ";
      put(os_, s.expr, 0);
      os_ << ";\n";
      break;
    case StmtKind::Assume:
      os_ << "assume ";
      put(os_, s.expr, 0);
      os_ << ";\n";
      break;
    case StmtKind::If:
      os_ << "if ";
      put(os_, s.expr, 0);
      os_ << " then {\n";
      block(s.then_block, d + 1);
      indent(d);
      os_ << "} else {\n";
      block(s.else_block, d + 1);
      indent(d);
      os_ << "}\n";
      break;
    case StmtKind::While:
      os_ << "while ";
      put(os_, s.expr, 0);
      os_ << " do {\n";
      block(s.then_block, d + 1);
      indent(d);
      os_ << "}\n";
      break;
    case StmtKind::Terminated:
      os_ << "terminated;\n";
      break;
    case StmtKind::Skip:
      os_ << ";\n";
      break;
    }
  }

  void atomic(const std::vector<AtomicStmt>& b, int d) {
    for (const auto& s : b) {
      indent(d);
      switch (s.kind) {
      case AtomicKind::Assign:
        os_ << s.target.name;
        for (const auto& i : s.target.indices) {
          os_ << '[';
          put(os_, i, 0);
          os_ << ']';
        }
        os_ << " := ";
        put(os_, s.expr, 0);
        os_ << ";\n";
        break;
      case AtomicKind::Constrain:
        os_ << "constrain ";
        put(os_, s.expr, 0);
        os_ << ";\n";
        break;
      case AtomicKind::If:
        os_ << "if ";
        put(os_, s.expr, 0);
        os_ << " then {\n";
        atomic(s.then_body, d + 1);
        indent(d);
        os_ << "}";
        if (!s.else_body.empty()) {
          os_ << " else {\n";
          atomic(s.else_body, d + 1);
          indent(d);
          os_ << "}";
        }
        os_ << "\n";
        break;
      }
    }
  }

  std::ostringstream os_;
};

} // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  put(os, e, 0);
  return os.str();
}

std::string print_program(const Program& p) { return Printer().run(p); }

} // namespace p2sc
