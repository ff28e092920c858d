#include "p2sc/eval.hpp"

namespace p2sc {

Value apply_binop(BinOp op, Value a, Value b) {
  switch (op) {
  case BinOp::Add: return a + b;
  case BinOp::Sub: return a - b;
  case BinOp::Mul: return a * b;
  case BinOp::Mod: {
    if (b == 0)
      return 0;
    Value m = a % b;
    return m < 0 ? m + (b < 0 ? -b : b) : m;
  }
  case BinOp::Eq: return a == b;
  case BinOp::Ne: return a != b;
  case BinOp::Lt: return a < b;
  case BinOp::Le: return a <= b;
  case BinOp::Gt: return a > b;
  case BinOp::Ge: return a >= b;
  case BinOp::And: return a != 0 && b != 0;
  case BinOp::Or: return a != 0 || b != 0;
  }
  return 0;
}

} // namespace p2sc
