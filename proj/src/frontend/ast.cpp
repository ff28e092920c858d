#include "p2sc/ast.hpp"

#include <algorithm>

namespace p2sc {

Expr Expr::constant(Value v) {
  Expr e;
  e.kind = ExprKind::Const;
  e.value = v;
  return e;
}

Expr Expr::reg(std::string name) {
  Expr e;
  e.kind = ExprKind::Reg;
  e.name = std::move(name);
  return e;
}

Expr Expr::var(std::string name, std::vector<Expr> indices) {
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  e.args = std::move(indices);
  return e;
}

Expr Expr::choose(Value lo, Value hi) {
  Expr e;
  e.kind = ExprKind::Choose;
  e.value = lo;
  e.hi = hi;
  return e;
}

Expr Expr::negate(Expr inner) {
  Expr e;
  e.kind = ExprKind::Not;
  e.args.push_back(std::move(inner));
  return e;
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr eq(Expr a, Expr b) { return Expr::binary(BinOp::Eq, std::move(a), std::move(b)); }
Expr ne(Expr a, Expr b) { return Expr::binary(BinOp::Ne, std::move(a), std::move(b)); }
Expr le(Expr a, Expr b) { return Expr::binary(BinOp::Le, std::move(a), std::move(b)); }
Expr lt(Expr a, Expr b) { return Expr::binary(BinOp::Lt, std::move(a), std::move(b)); }
Expr ge(Expr a, Expr b) { return Expr::binary(BinOp::Ge, std::move(a), std::move(b)); }
Expr land(Expr a, Expr b) { return Expr::binary(BinOp::And, std::move(a), std::move(b)); }
Expr lor(Expr a, Expr b) { return Expr::binary(BinOp::Or, std::move(a), std::move(b)); }
Expr lnot(Expr a) { return Expr::negate(std::move(a)); }
Expr add(Expr a, Expr b) { return Expr::binary(BinOp::Add, std::move(a), std::move(b)); }

namespace {
void collect_regs(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == ExprKind::Reg &&
      std::find(out.begin(), out.end(), e.name) == out.end())
    out.push_back(e.name);
  for (const auto& a : e.args)
    collect_regs(a, out);
}

template <class P> bool any_node(const Expr& e, P pred) {
  if (pred(e))
    return true;
  return std::any_of(e.args.begin(), e.args.end(),
                     [&](const Expr& a) { return any_node(a, pred); });
}
} // namespace

std::vector<std::string> registers_of(const Expr& e) {
  std::vector<std::string> out;
  collect_regs(e, out);
  return out;
}

bool mentions_variable(const Expr& e) {
  return any_node(e, [](const Expr& n) { return n.kind == ExprKind::Var; });
}

bool mentions_choose(const Expr& e) {
  return any_node(e, [](const Expr& n) { return n.kind == ExprKind::Choose; });
}

AtomicStmt AtomicStmt::assign(LValue target, Expr e) {
  AtomicStmt s;
  s.kind = AtomicKind::Assign;
  s.target = std::move(target);
  s.expr = std::move(e);
  return s;
}

AtomicStmt AtomicStmt::constrain(Expr e) {
  AtomicStmt s;
  s.kind = AtomicKind::Constrain;
  s.expr = std::move(e);
  return s;
}

AtomicStmt AtomicStmt::when(Expr cond, std::vector<AtomicStmt> then_body,
                            std::vector<AtomicStmt> else_body) {
  AtomicStmt s;
  s.kind = AtomicKind::If;
  s.expr = std::move(cond);
  s.then_body = std::move(then_body);
  s.else_body = std::move(else_body);
  return s;
}

Instr make_read(std::string label, std::string reg, std::string var) {
  Instr i;
  i.label = std::move(label);
  i.stmt.kind = StmtKind::Read;
  i.stmt.reg = std::move(reg);
  i.stmt.var = std::move(var);
  return i;
}

Instr make_write(std::string label, std::string var, Expr e) {
  Instr i;
  i.label = std::move(label);
  i.stmt.kind = StmtKind::Write;
  i.stmt.var = std::move(var);
  i.stmt.expr = std::move(e);
  return i;
}

Instr make_assume(std::string label, Expr e) {
  Instr i;
  i.label = std::move(label);
  i.stmt.kind = StmtKind::Assume;
  i.stmt.expr = std::move(e);
  return i;
}

Instr make_if(std::string label, Expr e, std::vector<Instr> then_block,
              std::vector<Instr> else_block) {
  Instr i;
  i.label = std::move(label);
  i.stmt.kind = StmtKind::If;
  i.stmt.expr = std::move(e);
  i.stmt.then_block = std::move(then_block);
  i.stmt.else_block = std::move(else_block);
  return i;
}

Instr make_while(std::string label, Expr e, std::vector<Instr> body) {
  Instr i;
  i.label = std::move(label);
  i.stmt.kind = StmtKind::While;
  i.stmt.expr = std::move(e);
  i.stmt.then_block = std::move(body);
  return i;
}

Instr make_terminated(std::string label) {
  Instr i;
  i.label = std::move(label);
  i.stmt.kind = StmtKind::Terminated;
  return i;
}

bool is_aci(StmtKind k) {
  return k == StmtKind::Assume || k == StmtKind::If || k == StmtKind::While;
}

int Program::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name)
      return static_cast<int>(i);
  return -1;
}

int Program::proc_index(const std::string& name) const {
  for (std::size_t i = 0; i < procs.size(); ++i)
    if (procs[i].name == name)
      return static_cast<int>(i);
  return -1;
}

} // namespace p2sc
