#include <algorithm>
#include <cctype>
#include <sstream>

#include "p2sc/cli.hpp"

namespace p2sc::cli {

namespace {

std::string ident(const std::string& prefix, const std::string& name) {
  std::string out = prefix;
  for (char ch : name) {
    if (ch == kReservedPrefix)
      out += "aux_";
    else
      out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  }
  return out;
}

const char* infix(BinOp op) {
  switch (op) {
  case BinOp::Add:
    return "+";
  case BinOp::Sub:
    return "-";
  case BinOp::Mul:
    return "*";
  case BinOp::Eq:
    return "==";
  case BinOp::Ne:
    return "!=";
  case BinOp::Lt:
    return "<";
  case BinOp::Le:
    return "<=";
  case BinOp::Gt:
    return ">";
  case BinOp::Ge:
    return ">=";
  case BinOp::And:
    return "&&";
  case BinOp::Or:
    return "||";
  case BinOp::Mod:
    break;
  }
  return "%";
}

class Emitter {
public:
  Emitter(const Program& p, const std::vector<std::string>& errors, int domain)
      : p_(p), errors_(errors), domain_(domain) {}

  std::string run() {
    prologue();
    for (const auto& v : p_.vars) {
      out_ << "int " << ident("v_", v.name);
      for (int d : v.dims)
        out_ << "[" << d << "]";
      out_ << ";\n";
    }
    for (const auto& proc : p_.procs)
      thread(proc);
    main_function();
    return out_.str();
  }

private:
  const Program& p_;
  const std::vector<std::string>& errors_;
  int domain_;
  std::ostringstream out_;
  int depth_ = 0;

  void prologue() {
    out_ << "/* C-like encoding for a bounded model checker: " << p_.procs.size()
         << " thread functions, memory values modulo " << domain_ << ". */\n"
         << "#include <assert.h>\n"
         << "#include <pthread.h>\n\n"
         << "extern int __VERIFIER_nondet_int(void);\n"
         << "extern void __VERIFIER_assume(int cond);\n"
         << "extern void __VERIFIER_atomic_begin(void);\n"
         << "extern void __VERIFIER_atomic_end(void);\n\n"
         << "#define CHOOSE(lo, hi) p2sc_choose(lo, hi)\n"
         << "#define CONSTRAIN(e) __VERIFIER_assume(e)\n"
         << "#define ATOMIC_BEGIN() __VERIFIER_atomic_begin()\n"
         << "#define ATOMIC_END() __VERIFIER_atomic_end()\n\n"
         << "static int p2sc_choose(int lo, int hi) {\n"
         << "  int v = __VERIFIER_nondet_int();\n"
         << "  __VERIFIER_assume(lo <= v && v <= hi);\n"
         << "  return v;\n"
         << "}\n\n"
         << "static int p2sc_mod(int a, int b) { return b == 0 ? 0 : (a % b + b) % b; }\n\n";
  }

  std::string expr(const Expr& e) const {
    switch (e.kind) {
    case ExprKind::Const:
      return std::to_string(e.value);
    case ExprKind::Reg:
      return ident("r_", e.name);
    case ExprKind::Var: {
      std::string s = ident("v_", e.name);
      for (const auto& i : e.args)
        s += "[" + expr(i) + "]";
      return s;
    }
    case ExprKind::Choose:
      return "CHOOSE(" + std::to_string(e.value) + ", " + std::to_string(e.hi) + ")";
    case ExprKind::Not:
      return "!(" + expr(e.args[0]) + ")";
    case ExprKind::Binary:
      if (e.op == BinOp::Mod)
        return "p2sc_mod(" + expr(e.args[0]) + ", " + expr(e.args[1]) + ")";
      return "(" + expr(e.args[0]) + " " + infix(e.op) + " " + expr(e.args[1]) + ")";
    }
    return "0";
  }

  std::ostream& line() { return out_ << std::string(2 * depth_, ' '); }

  void atomic(const std::vector<AtomicStmt>& block) {
    for (const auto& st : block) {
      switch (st.kind) {
      case AtomicKind::Assign: {
        std::string lhs = ident(st.target.is_register ? "r_" : "v_", st.target.name);
        for (const auto& i : st.target.indices)
          lhs += "[" + expr(i) + "]";
        line() << lhs << " = " << expr(st.expr) << ";\n";
        break;
      }
      case AtomicKind::Constrain:
        line() << "CONSTRAIN(" << expr(st.expr) << ");\n";
        break;
      case AtomicKind::If:
        line() << "if (" << expr(st.expr) << ") {\n";
        ++depth_;
        atomic(st.then_body);
        --depth_;
        if (!st.else_body.empty()) {
          line() << "} else {\n";
          ++depth_;
          atomic(st.else_body);
          --depth_;
        }
        line() << "}\n";
        break;
      }
    }
  }

  // The prelude and the condition evaluate as one step; the condition is
  // kept in p2sc_c.
  void step(const Instr& in, bool has_cond) {
    if (!in.atomic) {
      if (has_cond)
        line() << "p2sc_c = " << expr(in.stmt.expr) << ";\n";
      return;
    }
    line() << "ATOMIC_BEGIN();\n";
    atomic(in.prelude);
    if (has_cond)
      line() << "p2sc_c = " << expr(in.stmt.expr) << ";\n";
    line() << "ATOMIC_END();\n";
  }

  void block(const std::vector<Instr>& b) {
    for (const auto& in : b)
      instr(in);
  }

  void nested(const std::vector<Instr>& b) {
    ++depth_;
    block(b);
    --depth_;
  }

  void instr(const Instr& in) {
    out_ << ident("L_", in.label) << ":;\n";
    if (std::find(errors_.begin(), errors_.end(), in.label) != errors_.end())
      line() << "assert(0); /* error label reached */\n";
    const Stmt& s = in.stmt;
    switch (s.kind) {
    case StmtKind::Skip:
      step(in, false);
      break;
    case StmtKind::Read:
      step(in, false);
      line() << ident("r_", s.reg) << " = " << ident("v_", s.var) << ";\n";
      break;
    case StmtKind::Write:
      step(in, false);
      line() << ident("v_", s.var) << " = p2sc_mod(" << expr(s.expr) << ", " << domain_
             << ");\n";
      break;
    case StmtKind::Assume:
      step(in, true);
      line() << "if (!p2sc_c) return 0;\n";
      break;
    case StmtKind::If:
      step(in, true);
      line() << "if (p2sc_c) {\n";
      nested(s.then_block);
      line() << "} else {\n";
      nested(s.else_block);
      line() << "}\n";
      break;
    case StmtKind::While:
      line() << "for (;;) {\n";
      ++depth_;
      step(in, true);
      line() << "if (!p2sc_c) break;\n";
      block(s.then_block);
      --depth_;
      line() << "}\n";
      break;
    case StmtKind::Terminated:
      step(in, false);
      line() << "return 0;\n";
      break;
    }
  }

  void thread(const Process& proc) {
    out_ << "\nvoid *" << ident("thread_", proc.name) << "(void *arg) {\n";
    depth_ = 1;
    line() << "(void)arg;\n";
    line() << "int p2sc_c = 0;\n";
    for (const auto& r : proc.regs)
      line() << "int " << ident("r_", r) << " = 0;\n";
    line() << "(void)p2sc_c;\n";
    block(proc.body);
    line() << "return 0;\n";
    depth_ = 0;
    out_ << "}\n";
  }

  void main_function() {
    int ini = p_.proc_index(kIniProc);
    out_ << "\nint main(void) {\n";
    if (ini >= 0)
      out_ << "  " << ident("thread_", kIniProc) << "(0); /* runs before every other thread */\n";
    std::vector<const Process*> threads;
    for (std::size_t i = 0; i < p_.procs.size(); ++i)
      if (static_cast<int>(i) != ini)
        threads.push_back(&p_.procs[i]);
    out_ << "  pthread_t t[" << std::max<std::size_t>(1, threads.size()) << "];\n";
    for (std::size_t i = 0; i < threads.size(); ++i)
      out_ << "  pthread_create(&t[" << i << "], 0, " << ident("thread_", threads[i]->name)
           << ", 0);\n";
    for (std::size_t i = 0; i < threads.size(); ++i)
      out_ << "  pthread_join(t[" << i << "], 0);\n";
    out_ << "  return 0;\n}\n";
  }
};

} // namespace

std::string export_c(const Program& p, const std::vector<std::string>& error_labels, int domain) {
  return Emitter(p, error_labels, domain).run();
}

std::string export_c(const ExtendedProgram& ep, int domain) {
  return export_c(ep.program, {ep.error_label}, domain);
}

} // namespace p2sc::cli
