#pragma once

#include <vector>

namespace p2sc {

/// Per-process propagation contexts of a write. Entries are 1-based
/// contexts; kNever (0) means the write is never propagated there.
struct Timestamp {
  static constexpr int kNever = 0;

  std::vector<int> at;

  Timestamp() = default;
  explicit Timestamp(std::vector<int> v) : at(std::move(v)) {}
  static Timestamp never(int nprocs) { return Timestamp(std::vector<int>(nprocs, kNever)); }

  int size() const { return static_cast<int>(at.size()); }
  bool operator==(const Timestamp&) const = default;
};

/// a ⊑ b: for every process, either entry is never or a <= b.
/// Throws std::invalid_argument on mismatched sizes.
bool timestamp_leq(const Timestamp& a, const Timestamp& b);

/// a ⊑ b with some commonly defined entry strictly smaller.
bool timestamp_strict(const Timestamp& a, const Timestamp& b);

/// a ⊕ b: b's entry where defined, a's otherwise. Requires a ⊑ b.
Timestamp timestamp_summary(const Timestamp& a, const Timestamp& b);

/// Summary of a non-empty ⊑-chain (left fold of ⊕).
Timestamp timestamp_sum(const std::vector<Timestamp>& chain);

} // namespace p2sc
