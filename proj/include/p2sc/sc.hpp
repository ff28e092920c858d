#pragma once

// Bounded SC exploration of plain and translated programs.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2sc/ast.hpp"
#include "p2sc/translate.hpp"

namespace p2sc::sc {

struct ExploreBounds {
  int unroll = 4;        // iterations per loop entry
  int max_trace = 10000; // instructions per trace
  int domain = 4;        // data values 0..domain-1 for plain programs
};

/// One executed instruction and the values its `choose` sites produced.
struct TraceStep {
  std::string proc;
  std::string label;
  std::vector<Value> chooses;
  bool operator==(const TraceStep&) const = default;
};

struct Trace {
  std::vector<TraceStep> steps;
};

struct ScStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t pruned_by_constrain = 0;
  int contexts = 0; // process switches in the witness, counted as in the bound
};

struct ScVerdict {
  bool reachable = false;
  bool bounded_out = false;
  std::optional<Trace> witness;
  ScStats stats;
};

/// Concrete SC state, as produced by replay.
struct ScState {
  std::vector<int> pc; // per process; -1 once a process has finished
  std::vector<Value> mem;
  std::vector<Value> regs;
};

class ReplayError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Explores `p` under SC with at most `k` contexts. A program with an "@ini"
/// process is scheduled as a translated program: "@ini" runs first and
/// neither it nor "@ver" counts towards the context bound.
/// Reachable iff some process's next instruction carries a target label.
ScVerdict sc_explore(const Program& p, const std::vector<std::string>& targets, int k,
                     const ExploreBounds& b = {});

/// Explores a translated program towards its error label.
ScVerdict sc_explore(const ExtendedProgram& ep, int k, const ExploreBounds& b = {});

/// Re-executes a trace; throws ReplayError if it does not fit `p`.
ScState sc_replay(const Program& p, const Trace& t, const ExploreBounds& b = {});

bool sc_at_label(const Program& p, const ScState& s, const std::vector<std::string>& labels);

/// Reads a (possibly indexed) shared variable of a replayed state.
Value sc_read(const Program& p, const ScState& s, const std::string& var,
              const std::vector<int>& idx = {});

/// Reads a register of a replayed state.
Value sc_reg(const Program& p, const ScState& s, const std::string& proc, const std::string& reg);

std::string trace_to_json(const Trace& t);
std::string stats_to_json(const ScStats& s);

} // namespace p2sc::sc
