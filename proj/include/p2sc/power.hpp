#pragma once

// Explicit-state POWER semantics: events are fetched, initialized and
// committed out of order, and committed writes are propagated to each
// process separately, subject to a global coherence order.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "p2sc/cfg.hpp"

namespace p2sc::power {

/// An event is named by its process and fetch position. proc == -1 names
/// the initial write of variable `idx`.
struct EventRef {
  int proc = -1;
  int idx = 0;

  static EventRef init(int var) { return {-1, var}; }
  bool is_init() const { return proc < 0; }
  auto operator<=>(const EventRef&) const = default;
};

enum class Status : std::uint8_t { Fetch, Init, Commit };

struct Event {
  int instr = 0; // index into the process's FlatProcess::instrs
  Status status = Status::Fetch;
  bool has_value = false;
  Value value = 0; // read: loaded value; write: stored value; aci: condition
  EventRef rf;     // reads only, meaningful once initialized
  auto operator<=>(const Event&) const = default;
};

struct Configuration {
  std::vector<std::vector<Event>> events; // per process, in fetch (po) order
  std::vector<EventRef> prop;             // [proc * nvars + var]
  /// Per variable: the coherence order as a sorted, transitively closed
  /// list of (earlier, later) pairs of committed writes.
  std::vector<std::vector<std::pair<EventRef, EventRef>>> co;

  bool operator==(const Configuration&) const = default;
};

struct OracleBounds {
  int max_events_per_process = 8;
  int max_run_length = 64;
};

enum class Rule : std::uint8_t {
  Fetch,
  LocalRead,
  PropRead,
  ComRead,
  InitWrite,
  ComWrite,
  ComAci,
  Prop
};

const char* rule_name(Rule r);

/// One transition. `proc` is the process the transition is attributed to
/// (for Prop, the writer). `param` is the fetched instruction index for
/// Fetch and the receiving process for Prop.
struct Step {
  int proc = 0;
  Rule rule = Rule::Fetch;
  EventRef event;
  int param = 0;
  bool operator==(const Step&) const = default;
};

struct Transition {
  Step step;
  Configuration next;
};

/// Tri-state predicate value.
enum class Flag : std::uint8_t { NotApplicable, False, True, NotReady };

struct CommitPredicates {
  Flag rd_cnd = Flag::NotApplicable;
  Flag com_cnd = Flag::NotApplicable;
  Flag init_cnd = Flag::NotApplicable;
  Flag valid_cnd = Flag::NotApplicable;
};

class Semantics {
public:
  /// `domain` is the number of data values; stored values wrap modulo it.
  Semantics(const FlatProgram& prog, int domain = 4);

  const FlatProgram& program() const { return prog_; }
  int nprocs() const { return static_cast<int>(prog_.procs().size()); }
  int nvars() const { return nvars_; }

  Configuration initial() const;

  const Event& event(const Configuration& c, EventRef e) const {
    return c.events[e.proc][e.idx];
  }
  const Instr& instr_of(const Configuration& c, EventRef e) const;
  /// Variable index of a read/write event, -1 otherwise.
  int var_of(const Configuration& c, EventRef e) const;
  bool is_read(const Configuration& c, EventRef e) const;
  bool is_write(const Configuration& c, EventRef e) const;
  bool is_aci(const Configuration& c, EventRef e) const;

  std::optional<EventRef> closest_write(const Configuration& c, EventRef e) const;
  /// Reads that feed registers of a write/aci event's expression.
  std::vector<EventRef> data_preds(const Configuration& c, EventRef e) const;
  CommitPredicates commit_predicates(const Configuration& c, EventRef e) const;
  /// Value of a read (through rf) or of a write/aci expression; empty when
  /// a needed read is not initialized yet.
  std::optional<Value> eval_event_value(const Configuration& c, EventRef e) const;

  /// a is equal to or precedes b in coherence (initial writes come first).
  bool co_leq(const Configuration& c, int var, EventRef a, EventRef b) const;

  /// All transitions enabled in `c`. `fetch_capped` is set when a Fetch was
  /// suppressed by the per-process event bound.
  std::vector<Transition> enabled(const Configuration& c, const OracleBounds& b,
                                  bool* fetch_capped = nullptr) const;

  /// Applies one step; throws std::logic_error if it is not enabled.
  Configuration apply(const Configuration& c, const Step& s) const;

  bool committed(const Configuration& c) const;
  /// Label of the last fetched event of `proc`, empty if none.
  std::string label_of(const Configuration& c, int proc) const;
  /// True when some aci event can provably never be committed.
  bool dead(const Configuration& c) const;

  /// Violated structural invariants of one configuration.
  std::vector<std::string> check(const Configuration& c) const;
  /// Violated step invariants (status and propagation monotonicity).
  std::vector<std::string> check_step(const Configuration& before,
                                      const Configuration& after) const;

  /// Canonical byte encoding, used as a visited-set key.
  std::string encode(const Configuration& c) const;

private:
  bool try_rule(const Configuration& c, const Step& s, Configuration* out) const;
  bool add_co(Configuration& c, int var, EventRef a, EventRef b) const;
  EventRef& prop(Configuration& c, int p, int x) const { return c.prop[p * nvars_ + x]; }
  EventRef prop(const Configuration& c, int p, int x) const { return c.prop[p * nvars_ + x]; }

  const FlatProgram& prog_;
  int nvars_;
  int domain_;
};

struct Run {
  std::vector<Step> steps;
  Configuration final;
};

/// Replays steps from the initial configuration.
Run replay(const Semantics& sem, const std::vector<Step>& steps);

/// Number of maximal single-process blocks in a step sequence.
int count_contexts(const std::vector<Step>& steps);

struct OracleStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
};

struct OracleVerdict {
  bool reachable = false;
  bool bounded_out = false;
  int contexts_used = 0;
  std::optional<Run> witness;
  OracleStats stats;
  OracleBounds bounds;
};

/// Is some label in `targets` reachable by a committed run with at most
/// `k` contexts, within `bounds`?
OracleVerdict k_bounded_reachability(const FlatProgram& prog,
                                     const std::vector<std::string>& targets, int k,
                                     const OracleBounds& bounds = {}, int domain = 4);

std::string witness_to_json(const Semantics& sem, const Run& run);
std::string verdict_to_json(const Semantics& sem, const OracleVerdict& v);

} // namespace p2sc::power
