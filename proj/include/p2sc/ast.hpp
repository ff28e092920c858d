#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace p2sc {

using Value = std::int64_t;

enum class BinOp { Add, Sub, Mul, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

enum class ExprKind { Const, Reg, Var, Choose, Not, Binary };

/// Expression tree. Source programs only use Const/Reg/Not/Binary; Var
/// (possibly indexed) and Choose appear in translated programs.
struct Expr {
  ExprKind kind = ExprKind::Const;
  Value value = 0;  // Const value, or Choose lower bound
  Value hi = 0;     // Choose upper bound
  std::string name; // Reg / Var
  BinOp op = BinOp::Add;
  std::vector<Expr> args; // Var indices, Not operand, Binary operands

  static Expr constant(Value v);
  static Expr reg(std::string name);
  static Expr var(std::string name, std::vector<Expr> indices = {});
  static Expr choose(Value lo, Value hi);
  static Expr negate(Expr e);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);

  bool operator==(const Expr&) const = default;
};

/// Helpers for building expressions in the translator and tests.
Expr eq(Expr a, Expr b);
Expr ne(Expr a, Expr b);
Expr le(Expr a, Expr b);
Expr lt(Expr a, Expr b);
Expr ge(Expr a, Expr b);
Expr land(Expr a, Expr b);
Expr lor(Expr a, Expr b);
Expr lnot(Expr a);
Expr add(Expr a, Expr b);

/// Registers mentioned by an expression, in first-occurrence order.
std::vector<std::string> registers_of(const Expr& e);
bool mentions_variable(const Expr& e);
bool mentions_choose(const Expr& e);

/// Target of an assignment inside an atomic block.
struct LValue {
  std::string name;
  std::vector<Expr> indices;
  bool is_register = false;

  bool operator==(const LValue&) const = default;
};

enum class AtomicKind { Assign, Constrain, If };

/// Straight-line statement allowed inside `atomic { ... }`.
struct AtomicStmt {
  AtomicKind kind = AtomicKind::Assign;
  LValue target;
  Expr expr;
  std::vector<AtomicStmt> then_body;
  std::vector<AtomicStmt> else_body;

  static AtomicStmt assign(LValue target, Expr e);
  static AtomicStmt constrain(Expr e);
  static AtomicStmt when(Expr cond, std::vector<AtomicStmt> then_body,
                         std::vector<AtomicStmt> else_body = {});

  bool operator==(const AtomicStmt&) const = default;
};

enum class StmtKind { Read, Write, Assume, If, While, Terminated, Skip };

struct Instr;

struct Stmt {
  StmtKind kind = StmtKind::Skip;
  std::string reg; // Read destination
  std::string var; // Read source / Write destination
  Expr expr;       // Write value or aci condition
  std::vector<Instr> then_block; // If-then, While body
  std::vector<Instr> else_block;

  bool operator==(const Stmt& other) const;
};

/// `label: [atomic { prelude }] stmt`. The prelude and the statement's
/// condition evaluation execute as one indivisible step.
struct Instr {
  std::string label;
  bool atomic = false;
  std::vector<AtomicStmt> prelude;
  Stmt stmt;

  bool operator==(const Instr&) const = default;
};

inline bool Stmt::operator==(const Stmt& o) const {
  return kind == o.kind && reg == o.reg && var == o.var && expr == o.expr &&
         then_block == o.then_block && else_block == o.else_block;
}

Instr make_read(std::string label, std::string reg, std::string var);
Instr make_write(std::string label, std::string var, Expr e);
Instr make_assume(std::string label, Expr e);
Instr make_if(std::string label, Expr e, std::vector<Instr> then_block,
              std::vector<Instr> else_block);
Instr make_while(std::string label, Expr e, std::vector<Instr> body);
Instr make_terminated(std::string label);

bool is_aci(StmtKind k);

struct VarDecl {
  std::string name;
  std::vector<int> dims; // empty for scalars

  bool operator==(const VarDecl&) const = default;
};

struct Process {
  std::string name;
  std::vector<std::string> regs;
  std::vector<Instr> body;

  bool operator==(const Process&) const = default;
};

struct Program {
  std::vector<VarDecl> vars;
  std::vector<Process> procs;

  int var_index(const std::string& name) const; // -1 if absent
  int proc_index(const std::string& name) const;
  bool operator==(const Program&) const = default;
};

/// Reserved prefix for names the translator generates.
inline constexpr char kReservedPrefix = '@';
inline bool is_reserved(const std::string& name) {
  return !name.empty() && name.front() == kReservedPrefix;
}

/// Visits every instruction in program order (pre-order through blocks).
template <class F> void for_each_instr(const std::vector<Instr>& block, F&& f) {
  for (const auto& i : block) {
    f(i);
    for_each_instr(i.stmt.then_block, f);
    for_each_instr(i.stmt.else_block, f);
  }
}

} // namespace p2sc
