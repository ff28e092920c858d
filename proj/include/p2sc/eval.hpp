#pragma once

#include "p2sc/ast.hpp"

namespace p2sc {

/// Integer semantics shared by every engine. Truth is "nonzero";
/// comparisons yield 0/1; `%` is the non-negative remainder (x % 0 = 0).
Value apply_binop(BinOp op, Value a, Value b);

/// Maps a value into the data domain 0..domain-1 (wrap-around).
inline Value reduce(Value v, int domain) {
  Value m = v % domain;
  return m < 0 ? m + domain : m;
}

/// Evaluates a register-only expression; `reg` maps a register name to
/// its value.
template <class RegFn> Value eval_regs(const Expr& e, RegFn&& reg) {
  switch (e.kind) {
  case ExprKind::Const:
    return e.value;
  case ExprKind::Reg:
    return reg(e.name);
  case ExprKind::Not:
    return eval_regs(e.args[0], reg) == 0 ? 1 : 0;
  case ExprKind::Binary: {
    Value a = eval_regs(e.args[0], reg);
    if (e.op == BinOp::And && a == 0)
      return 0;
    if (e.op == BinOp::Or && a != 0)
      return 1;
    return apply_binop(e.op, a, eval_regs(e.args[1], reg));
  }
  case ExprKind::Var:
  case ExprKind::Choose:
    break;
  }
  return 0;
}

} // namespace p2sc
