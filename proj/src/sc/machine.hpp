#pragma once

// Internal state representation shared by the SC executor and explorer.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "p2sc/cfg.hpp"
#include "p2sc/sc.hpp"

namespace p2sc::sc::detail {

// Values at or below kUnknownTag stand for a lazily chosen value:
// kUnknownTag - id refers to entry `id` of the state's unknown table.
inline constexpr Value kUnknownTag = -(Value(1) << 62);
inline bool is_unknown(Value v) { return v <= kUnknownTag; }
inline int unknown_id(Value v) { return static_cast<int>(kUnknownTag - v); }
inline Value unknown_ref(int id) { return kUnknownTag - id; }

// A chosen value not yet fixed. `mask` holds the remaining candidates
// (bit v = value v); unified unknowns point to a representative.
struct Unknown {
  int parent = -1;
  std::uint64_t mask = 0;
};

struct State {
  std::vector<int> pc;
  std::vector<Value> mem;
  std::vector<Value> regs;
  std::vector<std::uint8_t> loops; // iterations of the current loop entry
  std::vector<Unknown> unk;

  int find(int id) const {
    while (unk[id].parent >= 0)
      id = unk[id].parent;
    return id;
  }
  /// Concrete value of `v` if it is fixed.
  bool concrete(Value v, Value& out) const;
};

struct VarInfo {
  int offset = 0;
  std::vector<int> dims;
};

// Expressions and statements with names resolved to register slots and
// memory offsets.
struct CExpr {
  ExprKind kind = ExprKind::Const;
  BinOp op = BinOp::Add;
  Value value = 0;
  Value hi = 0;
  int slot = -1; // Reg: register slot; Var: memory offset
  std::vector<int> dims;
  std::vector<CExpr> args; // Var indices, operands
};

struct CAtomic {
  AtomicKind kind = AtomicKind::Assign;
  bool to_reg = false;
  int slot = -1;
  std::vector<int> dims;
  std::vector<CExpr> indices;
  CExpr expr;
  std::vector<CAtomic> then_body;
  std::vector<CAtomic> else_body;
};

struct CInstr {
  std::vector<CAtomic> prelude;
  StmtKind kind = StmtKind::Skip;
  int reg = -1; // Read destination
  int var = -1; // Read source / Write destination offset
  CExpr expr;
  int next = -1, tnext = -1, fnext = -1;
  int loop = -1; // While: loop counter slot
  bool runnable = false;
};

class Machine {
public:
  Machine(const Program& p, const ExploreBounds& b);

  const FlatProgram& flat() const { return flat_; }
  const Program& program() const { return flat_.program(); }
  const ExploreBounds& bounds() const { return bounds_; }
  int nprocs() const { return static_cast<int>(flat_.procs().size()); }

  bool translated() const { return ini_ >= 0; }
  int ini_proc() const { return ini_; }
  int ver_proc() const { return ver_; }
  /// Whether steps of `proc` count towards the context bound.
  bool counts_context(int proc) const { return proc != ini_ && proc != ver_; }

  const CInstr& code(int proc, int idx) const { return code_[proc][idx]; }
  int code_size(int proc) const { return static_cast<int>(code_[proc].size()); }
  /// Declared variable, or nullptr.
  const VarInfo* find_var(const std::string& name) const;

  /// Generated registers that every instruction assigns before reading; their values
  /// are dead between steps and are cleared after each one.
  const std::vector<int>& scratch_regs() const { return scratch_; }

  State initial() const;
  /// Whether `proc` has an instruction left to execute.
  bool enabled(const State& s, int proc) const;
  bool at_target(const State& s, const std::vector<std::pair<int, int>>& targets) const;

  /// Canonical encoding of a state: unknowns are renumbered by first
  /// occurrence so that equivalent states share a key.
  std::string key(const State& s) const;

  ScState concretize(const State& s) const;

private:
  const VarInfo& var(const std::string& name) const;
  int reg_slot(int proc, const std::string& name) const;
  CExpr compile(const Expr& e, int proc) const;
  CAtomic compile(const AtomicStmt& s, int proc) const;

  FlatProgram flat_;
  ExploreBounds bounds_;
  int ini_ = -1;
  int ver_ = -1;
  std::unordered_map<std::string, VarInfo> vars_;
  int mem_size_ = 0;
  std::vector<std::unordered_map<std::string, int>> regs_;
  int reg_size_ = 0;
  std::vector<int> scratch_;
  int loop_size_ = 0;
  std::vector<std::vector<CInstr>> code_;
};

// Result of executing one instruction along one branch of its choices.
using NodeValues = std::vector<std::pair<const CExpr*, Value>>;

struct Outcome {
  State next;
  std::vector<std::pair<const CExpr*, int>> chooses; // choose node and its unknown
  std::vector<Value> consumed;                       // replay: choose values in use order
};

/// Where `choose` takes concrete values from when replaying: a sequence
/// consumed in evaluation order, or a value per choose node.
struct ReplaySource {
  const std::vector<Value>* sequence = nullptr;
  const NodeValues* by_node = nullptr;
};

struct ExecCounters {
  std::uint64_t pruned_by_constrain = 0;
  bool unrolled_out = false;
};

/// Executes the next instruction of `proc`, appending one state per
/// outcome. With `replay` set, `choose` takes its values from it and a
/// violated constraint raises ReplayError.
void execute(const Machine& m, const State& s, int proc, std::vector<Outcome>& out,
             ExecCounters& counters, const ReplaySource* replay = nullptr);

} // namespace p2sc::sc::detail
