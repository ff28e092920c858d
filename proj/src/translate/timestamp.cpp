#include "p2sc/timestamp.hpp"

#include <stdexcept>

namespace p2sc {

namespace {

void same_size(const Timestamp& a, const Timestamp& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("timestamps over different process sets");
}

Timestamp combine(const Timestamp& a, const Timestamp& b) {
  Timestamp out = a;
  for (int p = 0; p < a.size(); ++p)
    if (b.at[p] != Timestamp::kNever)
      out.at[p] = b.at[p];
  return out;
}

} // namespace

bool timestamp_leq(const Timestamp& a, const Timestamp& b) {
  same_size(a, b);
  for (int p = 0; p < a.size(); ++p)
    if (a.at[p] != Timestamp::kNever && b.at[p] != Timestamp::kNever && a.at[p] > b.at[p])
      return false;
  return true;
}

bool timestamp_strict(const Timestamp& a, const Timestamp& b) {
  if (!timestamp_leq(a, b))
    return false;
  for (int p = 0; p < a.size(); ++p)
    if (a.at[p] != Timestamp::kNever && b.at[p] != Timestamp::kNever && a.at[p] < b.at[p])
      return true;
  return false;
}

Timestamp timestamp_summary(const Timestamp& a, const Timestamp& b) {
  if (!timestamp_leq(a, b))
    throw std::invalid_argument("summary requires the first timestamp to precede the second");
  return combine(a, b);
}

Timestamp timestamp_sum(const std::vector<Timestamp>& chain) {
  if (chain.empty())
    throw std::invalid_argument("summary of an empty chain");
  // Only consecutive elements are ordered; the running summary need not
  // precede the next element, so the fold combines without the check.
  Timestamp acc = chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!timestamp_leq(chain[i - 1], chain[i]))
      throw std::invalid_argument("not a chain");
    acc = combine(acc, chain[i]);
  }
  return acc;
}

} // namespace p2sc
