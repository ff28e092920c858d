#include <algorithm>

#include "p2sc/translate.hpp"

namespace p2sc {

long AuxLayout::logical_cells() const {
  long P = nprocs, X = nvars, R = nregs, K = k;
  return 4 * P * X * K + 5 * P * X + 2 * R + P + K + 1 + ntargets;
}

long AuxLayout::emitted_scalars() const {
  long P = nprocs, X = nvars, R = nregs, K1 = k + 1;
  return 2 * P * X * K1 + 2 * P * X * K1 * P + 5 * P * X + 2 * R + P + K1 + 1 + ntargets;
}

int AuxLayout::reg_index(const std::string& reg) const {
  auto it = std::find(regs.begin(), regs.end(), reg);
  return it == regs.end() ? -1 : static_cast<int>(it - regs.begin());
}

long translation_size_bound(int nprocs, int nvars, int nregs, int k, int ninstrs) {
  long P = nprocs, X = nvars, R = nregs, K = k;
  long c1 = 3 * P * P + 6 * P + 2 * R + 15;
  long c2 = 4 * P + 9;
  return c1 * ninstrs + c2 * P * X * K + 2 * R + P + K + 2;
}

} // namespace p2sc
