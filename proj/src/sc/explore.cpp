#include <algorithm>
#include <bit>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "machine.hpp"
#include "p2sc/eval.hpp"

namespace p2sc::sc {

using detail::Machine;
using detail::Outcome;
using detail::State;

namespace {

std::vector<std::pair<int, int>> resolve_targets(const Machine& m,
                                                 const std::vector<std::string>& labels) {
  std::vector<std::pair<int, int>> out;
  for (const auto& l : labels) {
    auto loc = m.flat().find(l);
    if (!loc)
      throw std::invalid_argument("unknown target label " + l);
    out.push_back(*loc);
  }
  return out;
}

void regs_in(const detail::CExpr& e, std::vector<int>& out) {
  if (e.kind == ExprKind::Reg)
    out.push_back(e.slot);
  for (const auto& a : e.args)
    regs_in(a, out);
}

void assigned_regs(const std::vector<detail::CAtomic>& block, std::vector<int>& out) {
  for (const auto& st : block) {
    if (st.kind == AtomicKind::Assign && st.to_reg)
      out.push_back(st.slot);
    assigned_regs(st.then_body, out);
    assigned_regs(st.else_body, out);
  }
}

bool writes_cells(const std::vector<detail::CAtomic>& block, int lo, int hi) {
  for (const auto& st : block) {
    if (st.kind == AtomicKind::Assign && !st.to_reg && st.slot >= lo && st.slot < hi)
      return true;
    if (writes_cells(st.then_body, lo, hi) || writes_cells(st.else_body, lo, hi))
      return true;
  }
  return false;
}

std::optional<Value> concrete_eval(const detail::CExpr& e, const State& s) {
  switch (e.kind) {
  case ExprKind::Const:
    return e.value;
  case ExprKind::Reg: {
    Value v;
    if (s.concrete(s.regs[e.slot], v))
      return v;
    return std::nullopt;
  }
  case ExprKind::Not: {
    auto a = concrete_eval(e.args[0], s);
    return a ? std::optional<Value>(*a == 0) : std::nullopt;
  }
  case ExprKind::Binary: {
    auto a = concrete_eval(e.args[0], s);
    auto b = concrete_eval(e.args[1], s);
    if (a && b)
      return apply_binop(e.op, *a, *b);
    return std::nullopt;
  }
  default:
    return std::nullopt;
  }
}

// Finds states from which no goal instruction can execute any more. Goals
// are the targets, or in a translated program the instructions that record
// a reached target (the error label needs one of them first).
class Liveness {
public:
  Liveness(const Machine& m, const std::vector<std::pair<int, int>>& targets) : m_(m) {
    int n = m.nprocs();
    goal_.resize(n);
    live_.resize(n);
    stable_.resize(n);
    const detail::VarInfo* reached = m.translated() ? m.find_var(AuxLayout::reached) : nullptr;
    if (reached) {
      int cells = 1;
      for (int d : reached->dims)
        cells *= d;
      reached_ = {reached->offset, reached->offset + cells};
    }
    for (int p = 0; p < n; ++p) {
      int size = m.code_size(p);
      goal_[p].assign(size, false);
      live_[p].assign(size, false);
      stable_[p].assign(size, false);
      for (int i = 0; i < size; ++i) {
        const auto& ci = m.code(p, i);
        if (reached)
          goal_[p][i] = writes_cells(ci.prelude, reached_.first, reached_.second);
        std::vector<int> used, set;
        regs_in(ci.expr, used);
        assigned_regs(ci.prelude, set);
        stable_[p][i] = std::none_of(used.begin(), used.end(), [&](int r) {
          return std::find(set.begin(), set.end(), r) != set.end();
        });
      }
    }
    if (!reached)
      for (const auto& [p, i] : targets)
        goal_[p][i] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (int p = 0; p < n; ++p)
        for (int i = 0; i < m.code_size(p); ++i) {
          if (live_[p][i])
            continue;
          const auto& ci = m.code(p, i);
          bool l = goal_[p][i] || reaches(p, ci.next) || reaches(p, ci.tnext) ||
                   reaches(p, ci.fnext);
          if (l)
            live_[p][i] = changed = true;
        }
    }
  }

  bool dead(const State& s) const {
    for (int c = reached_.first; c < reached_.second; ++c) {
      Value v;
      if (!s.concrete(s.mem[c], v) || v != 0)
        return false;
    }
    for (int p = 0; p < m_.nprocs(); ++p)
      if (s.pc[p] >= 0 && alive(s, p, s.pc[p]))
        return false;
    return true;
  }

private:
  const Machine& m_;
  std::vector<std::vector<bool>> goal_, live_, stable_;
  std::pair<int, int> reached_{0, 0};

  bool reaches(int p, int i) const { return i >= 0 && live_[p][i]; }

  // Follows the pending branch when its condition is already determined.
  bool alive(const State& s, int p, int pc) const {
    const auto& ci = m_.code(p, pc);
    if (goal_[p][pc])
      return true;
    bool branch = ci.kind == StmtKind::Assume || ci.kind == StmtKind::If ||
                  ci.kind == StmtKind::While;
    if (branch && stable_[p][pc])
      if (auto c = concrete_eval(ci.expr, s))
        return reaches(p, *c ? ci.tnext : ci.fnext);
    return live_[p][pc];
  }
};

struct PathStep {
  int proc;
  int pc;
  std::vector<std::pair<const detail::CExpr*, int>> chooses;
};

// Depth-first search over instruction-granularity SC steps. A state is
// revisited only with fewer contexts used or a shorter prefix.
class Explorer {
public:
  Explorer(const Machine& m, std::vector<std::pair<int, int>> targets, int k)
      : m_(m), targets_(std::move(targets)), k_(k), liveness_(m, targets_) {}

  ScVerdict run() {
    ScVerdict v;
    found_ = dfs(m_.initial(), -1, 0, 0);
    v.reachable = found_;
    v.bounded_out = bounded_out_ && !found_;
    v.stats.states = states_;
    v.stats.transitions = transitions_;
    v.stats.pruned_by_constrain = counters_.pruned_by_constrain;
    if (found_) {
      v.stats.contexts = contexts_;
      v.witness = witness();
    }
    return v;
  }

private:
  // Fixes every unknown of the path to its least remaining value and
  // re-executes it concretely; the trace lists the choose values in the
  // order that run uses them.
  Trace witness() const {
    Trace t;
    State s = m_.initial();
    detail::ExecCounters counters;
    for (const auto& ps : path_) {
      detail::NodeValues values;
      for (const auto& [node, id] : ps.chooses)
        values.emplace_back(node, std::countr_zero(final_.unk[final_.find(id)].mask));
      detail::ReplaySource src{nullptr, &values};
      std::vector<Outcome> outs;
      detail::execute(m_, s, ps.proc, outs, counters, &src);
      if (outs.size() != 1)
        throw std::logic_error("witness does not re-execute");
      TraceStep ts;
      ts.proc = m_.program().procs[ps.proc].name;
      ts.label = m_.flat().at(ps.proc, ps.pc).instr->label;
      ts.chooses = std::move(outs.front().consumed);
      t.steps.push_back(std::move(ts));
      s = std::move(outs.front().next);
    }
    return t;
  }

  const Machine& m_;
  std::vector<std::pair<int, int>> targets_;
  int k_;
  Liveness liveness_;
  std::unordered_map<std::string, std::vector<std::pair<int, int>>> visited_;
  std::vector<PathStep> path_;
  detail::ExecCounters counters_;
  std::uint64_t states_ = 0;
  std::uint64_t transitions_ = 0;
  bool bounded_out_ = false;
  bool found_ = false;
  State final_;
  int contexts_ = 0;

  bool seen(const State& s, int cur, int ctx, int depth) {
    auto key = m_.key(s);
    key.push_back(static_cast<char>(cur + 1));
    auto& entries = visited_[std::move(key)];
    for (const auto& [c, d] : entries)
      if (c <= ctx && d <= depth)
        return true;
    std::erase_if(entries, [&](const auto& e) { return ctx <= e.first && depth <= e.second; });
    entries.emplace_back(ctx, depth);
    return false;
  }

  bool dfs(const State& s, int cur, int ctx, int depth) {
    ++states_;
    if (m_.at_target(s, targets_)) {
      final_ = s;
      contexts_ = ctx;
      return true;
    }
    if (liveness_.dead(s))
      return false;
    if (depth >= m_.bounds().max_trace) {
      bounded_out_ = true;
      return false;
    }
    if (seen(s, cur, ctx, depth))
      return false;
    bool ini_pending = m_.translated() && m_.enabled(s, m_.ini_proc());
    for (int p = 0; p < m_.nprocs(); ++p) {
      if (!m_.enabled(s, p) || (ini_pending && p != m_.ini_proc()))
        continue;
      int nctx = ctx, ncur = cur;
      if (m_.counts_context(p) && p != cur) {
        nctx = ctx + 1;
        ncur = p;
      }
      if (nctx > k_)
        continue;
      std::vector<Outcome> outs;
      counters_.unrolled_out = false;
      detail::execute(m_, s, p, outs, counters_);
      bounded_out_ = bounded_out_ || counters_.unrolled_out;
      for (auto& o : outs) {
        ++transitions_;
        path_.push_back({p, s.pc[p], std::move(o.chooses)});
        if (dfs(o.next, ncur, nctx, depth + 1))
          return true;
        path_.pop_back();
      }
    }
    return false;
  }
};

} // namespace

ScVerdict sc_explore(const Program& p, const std::vector<std::string>& targets, int k,
                     const ExploreBounds& b) {
  if (k < 1)
    throw std::invalid_argument("context bound must be at least 1");
  Machine m(p, b);
  return Explorer(m, resolve_targets(m, targets), k).run();
}

ScVerdict sc_explore(const ExtendedProgram& ep, int k, const ExploreBounds& b) {
  return sc_explore(ep.program, {ep.error_label}, k, b);
}

ScState sc_replay(const Program& p, const Trace& t, const ExploreBounds& b) {
  Machine m(p, b);
  State s = m.initial();
  detail::ExecCounters counters;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& st = t.steps[i];
    int proc = p.proc_index(st.proc);
    if (proc < 0)
      throw ReplayError("step " + std::to_string(i) + ": unknown process " + st.proc);
    if (!m.enabled(s, proc))
      throw ReplayError("step " + std::to_string(i) + ": process " + st.proc + " is finished");
    const auto& label = m.flat().at(proc, s.pc[proc]).instr->label;
    if (label != st.label)
      throw ReplayError("step " + std::to_string(i) + ": expected " + st.label + ", at " + label);
    std::vector<Outcome> outs;
    detail::ReplaySource src{&st.chooses, nullptr};
    detail::execute(m, s, proc, outs, counters, &src);
    if (counters.unrolled_out || outs.size() != 1)
      throw ReplayError("step " + std::to_string(i) + ": exceeds the unrolling bound");
    s = std::move(outs.front().next);
  }
  return m.concretize(s);
}

bool sc_at_label(const Program& p, const ScState& s, const std::vector<std::string>& labels) {
  FlatProgram flat(p);
  for (const auto& l : labels) {
    auto loc = flat.find(l);
    if (loc && s.pc[loc->first] == loc->second)
      return true;
  }
  return false;
}

Value sc_read(const Program& p, const ScState& s, const std::string& var,
              const std::vector<int>& idx) {
  int offset = 0;
  for (const auto& v : p.vars) {
    int cells = 1;
    for (int d : v.dims)
      cells *= d;
    if (v.name == var) {
      if (idx.size() != v.dims.size())
        throw std::invalid_argument("wrong number of indices for " + var);
      int off = 0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= v.dims[i])
          throw std::out_of_range("index out of range for " + var);
        off = off * v.dims[i] + idx[i];
      }
      return s.mem[offset + off];
    }
    offset += cells;
  }
  throw std::invalid_argument("undeclared variable " + var);
}

Value sc_reg(const Program& p, const ScState& s, const std::string& proc, const std::string& reg) {
  std::size_t slot = 0;
  for (const auto& pr : p.procs)
    for (const auto& r : pr.regs) {
      if (pr.name == proc && r == reg)
        return s.regs.at(slot);
      ++slot;
    }
  throw std::invalid_argument("no register " + reg + " in process " + proc);
}

std::string trace_to_json(const Trace& t) {
  auto arr = nlohmann::json::array();
  for (const auto& s : t.steps)
    arr.push_back({{"proc", s.proc}, {"label", s.label}, {"chooses", s.chooses}});
  return arr.dump();
}

std::string stats_to_json(const ScStats& s) {
  return nlohmann::json{{"states", s.states},
                        {"transitions", s.transitions},
                        {"prunedByConstrain", s.pruned_by_constrain},
                        {"contexts", s.contexts}}
      .dump();
}

} // namespace p2sc::sc
