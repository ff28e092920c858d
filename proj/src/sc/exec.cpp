#include <algorithm>
#include <bit>
#include <optional>
#include <stdexcept>
#include <utility>

#include "machine.hpp"
#include "p2sc/eval.hpp"

namespace p2sc::sc::detail {

namespace {

// Narrowings of unknowns, applied in order: (root id, allowed mask).
using Decisions = std::vector<std::pair<int, std::uint64_t>>;

struct Pruned {};
struct UnrollOut {};

struct EvalResult {
  bool known;
  Value v;
};

std::vector<std::uint64_t> singletons(std::uint64_t mask) {
  std::vector<std::uint64_t> out;
  for (; mask; mask &= mask - 1)
    out.push_back(mask & (~mask + 1));
  return out;
}

// Executes one instruction against a private copy of the state. When a
// decision depends on an unfixed unknown, the run continues with the first
// alternative and queues the others as decision lists that are replayed
// from the start of the instruction.
class Run {
public:
  Run(const Machine& m, const State& pre, int proc, Decisions decisions,
      const ReplaySource* replay, ExecCounters& counters, std::vector<Decisions>& pending)
      : s(pre), m_(m), proc_(proc), replay_(replay), counters_(counters), pending_(pending),
        decisions_(std::move(decisions)) {
    base_ = static_cast<int>(s.unk.size());
    for (const auto& [id, mask] : decisions_)
      if (id < base_ && (s.unk[id].mask &= mask) == 0)
        throw Pruned{};
  }

  void exec() {
    const CInstr& ci = m_.code(proc_, s.pc[proc_]);
    exec_block(ci.prelude);
    switch (ci.kind) {
    case StmtKind::Skip:
      s.pc[proc_] = ci.next;
      break;
    case StmtKind::Read:
      s.regs[ci.reg] = s.mem[ci.var];
      s.pc[proc_] = ci.next;
      break;
    case StmtKind::Write:
      s.mem[ci.var] = reduce(need(ci.expr), m_.bounds().domain);
      s.pc[proc_] = ci.next;
      break;
    case StmtKind::Assume:
    case StmtKind::If:
    case StmtKind::While: {
      bool c = decide(ci.expr);
      if (ci.kind == StmtKind::While) {
        auto& n = s.loops[ci.loop];
        if (!c)
          n = 0;
        else if (++n > m_.bounds().unroll)
          throw UnrollOut{};
      }
      s.pc[proc_] = c ? ci.tnext : ci.fnext;
      break;
    }
    case StmtKind::Terminated:
      s.pc[proc_] = -1;
      break;
    }
    if (replay_ && replay_->sequence && replay_pos_ != replay_->sequence->size())
      throw ReplayError("trace supplies more choose values than the instruction uses");
  }

  Outcome outcome() && {
    Outcome o{std::move(s), std::move(choose_ids_), {}};
    for (const auto& [node, v] : replayed_)
      o.consumed.push_back(v);
    return o;
  }

  State s;

private:
  const Machine& m_;
  int proc_;
  const ReplaySource* replay_;
  std::size_t replay_pos_ = 0;
  std::vector<std::pair<const CExpr*, Value>> replayed_;
  ExecCounters& counters_;
  std::vector<Decisions>& pending_;
  Decisions decisions_;
  int base_ = 0;           // unknowns from this id on were created by this run
  std::vector<std::pair<const CExpr*, int>> choose_ids_; // one unknown per choose node
  std::vector<int> syms_;  // unfixed roots met by the current evaluation
  int ov_root_ = -1;       // root evaluated as ov_value_ while splitting
  Value ov_value_ = 0;

  void exec_block(const std::vector<CAtomic>& block) {
    for (const auto& st : block) {
      switch (st.kind) {
      case AtomicKind::Assign:
        assign(st);
        break;
      case AtomicKind::Constrain:
        constrain(st.expr);
        break;
      case AtomicKind::If:
        exec_block(decide(st.expr) ? st.then_body : st.else_body);
        break;
      }
    }
  }

  [[noreturn]] void prune() {
    if (replay_)
      throw ReplayError("trace violates a constraint");
    ++counters_.pruned_by_constrain;
    throw Pruned{};
  }

  // Continues with masks[0] for `root` and queues the other alternatives.
  void narrow(int root, const std::vector<std::uint64_t>& masks) {
    for (std::size_t i = 1; i < masks.size(); ++i) {
      pending_.push_back(decisions_);
      pending_.back().emplace_back(root, masks[i]);
    }
    decisions_.emplace_back(root, masks.front());
    s.unk[root].mask &= masks.front();
  }

  // Prefers guesses made by this instruction: they are usually forced
  // soon anyway, while older unknowns may stay open for longer.
  void split_values(const std::vector<int>& roots) {
    auto rank = [&](int r) { return std::pair(r < base_, std::popcount(s.unk[r].mask)); };
    int best = roots.front();
    for (int r : roots)
      if (rank(r) < rank(best))
        best = r;
    narrow(best, singletons(s.unk[best].mask));
  }

  Value next_replayed(const CExpr& e) {
    if (replay_->by_node) {
      for (const auto& [node, v] : *replay_->by_node)
        if (node == &e)
          return v;
      throw ReplayError("no value for a choose");
    }
    if (replay_pos_ >= replay_->sequence->size())
      throw ReplayError("trace supplies too few choose values");
    return (*replay_->sequence)[replay_pos_++];
  }

  int new_unknown(Value lo, Value hi) {
    if (lo < 0 || hi > 63 || lo > hi)
      throw std::runtime_error("choose range must lie within 0..63");
    int id = static_cast<int>(s.unk.size());
    std::uint64_t mask = (hi == 63 ? ~std::uint64_t(0) : ((std::uint64_t(1) << (hi + 1)) - 1)) &
                         ~((std::uint64_t(1) << lo) - 1);
    for (const auto& [d, m] : decisions_)
      if (d == id)
        mask &= m;
    s.unk.push_back({-1, mask});
    if (mask == 0)
      throw Pruned{};
    return id;
  }

  EvalResult leaf(Value v) {
    Value c;
    if (s.concrete(v, c))
      return {true, c};
    int root = s.find(unknown_id(v));
    if (root == ov_root_)
      return {true, ov_value_};
    if (std::find(syms_.begin(), syms_.end(), root) == syms_.end())
      syms_.push_back(root);
    return {false, 0};
  }

  int cell(int offset, const std::vector<int>& dims, const std::vector<CExpr>& indices) {
    int off = 0;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      Value ix = need(indices[i]);
      if (ix < 0 || ix >= dims[i])
        throw std::runtime_error("array index out of range");
      off = off * dims[i] + static_cast<int>(ix);
    }
    return offset + off;
  }

  // The stored value of a leaf, possibly an unknown reference.
  Value raw(const CExpr& e) {
    switch (e.kind) {
    case ExprKind::Reg:
      return s.regs[e.slot];
    case ExprKind::Var:
      return s.mem[cell(e.slot, e.dims, e.args)];
    default:
      for (const auto& [node, id] : choose_ids_)
        if (node == &e)
          return unknown_ref(id);
      throw std::logic_error("choose evaluated before use");
    }
  }

  EvalResult eval(const CExpr& e) {
    switch (e.kind) {
    case ExprKind::Const:
      return {true, e.value};
    case ExprKind::Reg:
      return leaf(s.regs[e.slot]);
    case ExprKind::Var:
      return leaf(s.mem[cell(e.slot, e.dims, e.args)]);
    case ExprKind::Choose: {
      if (replay_) {
        for (const auto& [node, v] : replayed_)
          if (node == &e)
            return {true, v};
        Value v = next_replayed(e);
        if (v < e.value || v > e.hi)
          throw ReplayError("choose value out of range");
        replayed_.emplace_back(&e, v);
        return {true, v};
      }
      for (const auto& [node, id] : choose_ids_)
        if (node == &e)
          return leaf(unknown_ref(id));
      int id = new_unknown(e.value, e.hi);
      choose_ids_.emplace_back(&e, id);
      return leaf(unknown_ref(id));
    }
    case ExprKind::Not: {
      auto r = eval(e.args[0]);
      return r.known ? EvalResult{true, r.v == 0} : r;
    }
    case ExprKind::Binary: {
      auto a = eval(e.args[0]);
      if (a.known && e.op == BinOp::And && a.v == 0)
        return {true, 0};
      if (a.known && e.op == BinOp::Or && a.v != 0)
        return {true, 1};
      auto b = eval(e.args[1]);
      if (a.known && b.known)
        return {true, apply_binop(e.op, a.v, b.v)};
      if (b.known && e.op == BinOp::And && b.v == 0)
        return {true, 0};
      if (b.known && e.op == BinOp::Or && b.v != 0)
        return {true, 1};
      return {false, 0};
    }
    }
    return {true, 0};
  }

  EvalResult eval_fresh(const CExpr& e) {
    syms_.clear();
    return eval(e);
  }

  Value need(const CExpr& e) {
    auto saved = std::move(syms_);
    EvalResult r;
    while (!(r = eval_fresh(e)).known)
      split_values(syms_);
    syms_ = std::move(saved);
    return r.v;
  }

  // Candidates of `root` for which e holds, or nullopt after splitting
  // another unknown (the caller then retries). e must not create unknowns.
  std::optional<std::uint64_t> true_mask(const CExpr& e, int root) {
    std::uint64_t t = 0;
    for (auto bit : singletons(s.unk[root].mask)) {
      ov_root_ = root;
      ov_value_ = std::countr_zero(bit);
      auto r = eval_fresh(e);
      ov_root_ = -1;
      if (!r.known) {
        split_values(syms_);
        return std::nullopt;
      }
      if (r.v != 0)
        t |= bit;
    }
    return t;
  }

  bool decide(const CExpr& e) {
    for (;;) {
      auto r = eval_fresh(e);
      if (r.known)
        return r.v != 0;
      if (syms_.size() > 1) {
        split_values(syms_);
        continue;
      }
      int root = syms_.front();
      auto t = true_mask(e, root);
      if (!t)
        continue;
      std::uint64_t all = s.unk[root].mask;
      if (*t == all)
        return true;
      if (*t == 0)
        return false;
      narrow(root, {*t, all & ~*t});
      return true;
    }
  }

  static bool is_leaf(const CExpr& e) { return e.kind == ExprKind::Var || e.kind == ExprKind::Reg; }

  void constrain(const CExpr& e) {
    for (;;) {
      auto r = eval_fresh(e);
      if (r.known) {
        if (r.v == 0)
          prune();
        return;
      }
      if (syms_.size() == 1) {
        int root = syms_.front();
        auto t = true_mask(e, root);
        if (!t)
          continue;
        if (*t == 0)
          prune();
        s.unk[root].mask = *t;
        return;
      }
      if (syms_.size() == 2 && e.kind == ExprKind::Binary && e.op == BinOp::Eq &&
          is_leaf(e.args[0]) && is_leaf(e.args[1])) {
        int a = syms_[0], b = syms_[1];
        std::uint64_t both = s.unk[a].mask & s.unk[b].mask;
        if (both == 0)
          prune();
        s.unk[b].parent = a;
        s.unk[a].mask = both;
        return;
      }
      split_values(syms_);
    }
  }

  void assign(const CAtomic& st) {
    Value v;
    for (;;) {
      auto r = eval_fresh(st.expr);
      if (r.known) {
        v = r.v;
        break;
      }
      // Copies of unknowns stay lazy.
      if (st.expr.kind == ExprKind::Choose || st.expr.kind == ExprKind::Reg ||
          st.expr.kind == ExprKind::Var) {
        v = raw(st.expr);
        break;
      }
      split_values(syms_);
    }
    if (st.to_reg)
      s.regs[st.slot] = v;
    else
      s.mem[cell(st.slot, st.dims, st.indices)] = v;
  }
};

} // namespace

void execute(const Machine& m, const State& s, int proc, std::vector<Outcome>& out,
             ExecCounters& counters, const ReplaySource* replay) {
  std::vector<Decisions> work(1);
  while (!work.empty()) {
    Decisions d = std::move(work.back());
    work.pop_back();
    try {
      Run run(m, s, proc, std::move(d), replay, counters, work);
      run.exec();
      for (int r : m.scratch_regs())
        run.s.regs[r] = 0;
      out.push_back(std::move(run).outcome());
    } catch (const Pruned&) {
    } catch (const UnrollOut&) {
      counters.unrolled_out = true;
    }
  }
}

} // namespace p2sc::sc::detail
