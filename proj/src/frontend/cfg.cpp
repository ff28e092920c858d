#include "p2sc/cfg.hpp"

namespace p2sc {

namespace {

// Assigns indices in pre-order, then wires successors. `follow` is where
// control goes after the last instruction of `block`.
class Flattener {
public:
  Flattener(FlatProcess& out, int proc) : out_(out), proc_(proc) {}

  void run(const std::vector<Instr>& body) {
    number(body);
    // Falling off the end of a process moves to its terminated instruction.
    wire(body, out_.terminated);
  }

private:
  void number(const std::vector<Instr>& block) {
    for (const auto& i : block) {
      int idx = static_cast<int>(out_.instrs.size());
      out_.instrs.push_back({&i, proc_, -1, -1, -1});
      index_.push_back(&i);
      if (i.stmt.kind == StmtKind::Terminated && out_.terminated < 0)
        out_.terminated = idx;
      number(i.stmt.then_block);
      number(i.stmt.else_block);
    }
  }

  int index_of(const Instr* i) const {
    for (std::size_t k = 0; k < index_.size(); ++k)
      if (index_[k] == i)
        return static_cast<int>(k);
    return -1;
  }

  int first_or(const std::vector<Instr>& block, int fallback) const {
    return block.empty() ? fallback : index_of(&block.front());
  }

  void wire(const std::vector<Instr>& block, int follow) {
    for (std::size_t k = 0; k < block.size(); ++k) {
      const Instr& i = block[k];
      int self = index_of(&i);
      int after = k + 1 < block.size() ? index_of(&block[k + 1]) : follow;
      FlatInstr& f = out_.instrs[self];
      switch (i.stmt.kind) {
      case StmtKind::Terminated:
        break;
      case StmtKind::Assume:
        f.tnext = after;
        f.fnext = out_.terminated;
        break;
      case StmtKind::If:
        f.tnext = first_or(i.stmt.then_block, after);
        f.fnext = first_or(i.stmt.else_block, after);
        wire(i.stmt.then_block, after);
        wire(i.stmt.else_block, after);
        break;
      case StmtKind::While:
        f.tnext = first_or(i.stmt.then_block, self);
        f.fnext = after;
        wire(i.stmt.then_block, self);
        break;
      default:
        f.next = after;
        break;
      }
    }
  }

  FlatProcess& out_;
  int proc_;
  std::vector<const Instr*> index_;
};

} // namespace

FlatProgram::FlatProgram(Program p) : prog_(std::move(p)) {
  procs_.resize(prog_.procs.size());
  for (std::size_t k = 0; k < prog_.procs.size(); ++k) {
    Flattener(procs_[k], static_cast<int>(k)).run(prog_.procs[k].body);
    for (std::size_t i = 0; i < procs_[k].instrs.size(); ++i)
      labels_.emplace(procs_[k].instrs[i].instr->label,
                      std::pair{static_cast<int>(k), static_cast<int>(i)});
  }
}

std::optional<std::pair<int, int>> FlatProgram::find(const std::string& label) const {
  auto it = labels_.find(label);
  if (it == labels_.end())
    return std::nullopt;
  return it->second;
}

std::vector<int> FlatProgram::successors(int proc, int idx) const {
  const FlatInstr& f = at(proc, idx);
  if (f.instr->stmt.kind == StmtKind::Terminated)
    return {};
  if (is_aci(f.instr->stmt.kind))
    return {f.tnext, f.fnext};
  return {f.next};
}

SuccessorMap successor_map(const Program& p) {
  FlatProgram fp(p);
  SuccessorMap m;
  auto label = [&](int proc, int idx) {
    return idx < 0 ? std::string() : fp.at(proc, idx).instr->label;
  };
  for (std::size_t k = 0; k < fp.procs().size(); ++k) {
    int proc = static_cast<int>(k);
    for (std::size_t i = 0; i < fp.procs()[k].instrs.size(); ++i) {
      int idx = static_cast<int>(i);
      const FlatInstr& f = fp.at(proc, idx);
      auto& out = m.next[f.instr->label];
      for (int s : fp.successors(proc, idx))
        out.push_back(label(proc, s));
      if (is_aci(f.instr->stmt.kind)) {
        m.tnext[f.instr->label] = label(proc, f.tnext);
        m.fnext[f.instr->label] = label(proc, f.fnext);
      }
    }
  }
  return m;
}

} // namespace p2sc
