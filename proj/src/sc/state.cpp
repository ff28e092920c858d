#include <bit>
#include <set>
#include <stdexcept>

#include "machine.hpp"

namespace p2sc::sc::detail {

namespace {

void regs_read(const Expr& e, std::set<std::string>& out) {
  for (const auto& r : registers_of(e))
    out.insert(r);
  if (e.kind == ExprKind::Var)
    for (const auto& a : e.args)
      regs_read(a, out);
}

void regs_read(const AtomicStmt& st, std::set<std::string>& out) {
  regs_read(st.expr, out);
  for (const auto& i : st.target.indices)
    regs_read(i, out);
  for (const auto& b : {&st.then_body, &st.else_body})
    for (const auto& s : *b)
      regs_read(s, out);
}

// Registers of `proc` read by some instruction before a top-level
// assignment in that instruction has defined them.
std::set<std::string> live_across_steps(const Process& proc) {
  std::set<std::string> live;
  for_each_instr(proc.body, [&](const Instr& in) {
    std::set<std::string> defined;
    auto use = [&](const std::set<std::string>& reads) {
      for (const auto& r : reads)
        if (!defined.count(r))
          live.insert(r);
    };
    for (const auto& st : in.prelude) {
      std::set<std::string> reads;
      regs_read(st, reads);
      use(reads);
      if (st.kind == AtomicKind::Assign && st.target.is_register)
        defined.insert(st.target.name);
    }
    std::set<std::string> reads;
    regs_read(in.stmt.expr, reads);
    use(reads);
  });
  return live;
}

} // namespace

bool State::concrete(Value v, Value& out) const {
  if (!is_unknown(v)) {
    out = v;
    return true;
  }
  std::uint64_t mask = unk[find(unknown_id(v))].mask;
  if (std::popcount(mask) != 1)
    return false;
  out = std::countr_zero(mask);
  return true;
}

Machine::Machine(const Program& p, const ExploreBounds& b) : flat_(p), bounds_(b) {
  if (b.domain < 1 || b.domain > 64)
    throw std::invalid_argument("domain must be within 1..64");
  const Program& prog = flat_.program();
  ini_ = prog.proc_index(kIniProc);
  ver_ = prog.proc_index(kVerProc);
  for (const auto& v : prog.vars) {
    VarInfo info{mem_size_, v.dims};
    int cells = 1;
    for (int d : v.dims)
      cells *= d;
    mem_size_ += cells;
    vars_.emplace(v.name, std::move(info));
  }
  regs_.resize(prog.procs.size());
  code_.resize(prog.procs.size());
  for (std::size_t i = 0; i < prog.procs.size(); ++i) {
    auto live = live_across_steps(prog.procs[i]);
    for (const auto& r : prog.procs[i].regs) {
      if (is_reserved(r) && !live.count(r))
        scratch_.push_back(reg_size_);
      regs_[i].emplace(r, reg_size_++);
    }
  }
  for (std::size_t i = 0; i < prog.procs.size(); ++i) {
    int pi = static_cast<int>(i);
    for (const auto& fi : flat_.procs()[i].instrs) {
      const Instr& in = *fi.instr;
      CInstr ci;
      for (const auto& st : in.prelude)
        ci.prelude.push_back(compile(st, pi));
      ci.kind = in.stmt.kind;
      if (ci.kind == StmtKind::Read)
        ci.reg = reg_slot(pi, in.stmt.reg);
      if (ci.kind == StmtKind::Read || ci.kind == StmtKind::Write)
        ci.var = var(in.stmt.var).offset;
      ci.expr = compile(in.stmt.expr, pi);
      ci.next = fi.next;
      ci.tnext = fi.tnext;
      ci.fnext = fi.fnext;
      if (ci.kind == StmtKind::While)
        ci.loop = loop_size_++;
      ci.runnable = ci.kind != StmtKind::Terminated || !in.prelude.empty();
      code_[i].push_back(std::move(ci));
    }
  }
}

CExpr Machine::compile(const Expr& e, int proc) const {
  CExpr c;
  c.kind = e.kind;
  c.op = e.op;
  c.value = e.value;
  c.hi = e.hi;
  if (e.kind == ExprKind::Reg)
    c.slot = reg_slot(proc, e.name);
  if (e.kind == ExprKind::Var) {
    const VarInfo& vi = var(e.name);
    if (e.args.size() != vi.dims.size())
      throw std::runtime_error("wrong number of indices for " + e.name);
    c.slot = vi.offset;
    c.dims = vi.dims;
  }
  for (const auto& a : e.args)
    c.args.push_back(compile(a, proc));
  return c;
}

CAtomic Machine::compile(const AtomicStmt& s, int proc) const {
  CAtomic c;
  c.kind = s.kind;
  if (s.kind == AtomicKind::Assign) {
    c.to_reg = s.target.is_register;
    if (c.to_reg) {
      c.slot = reg_slot(proc, s.target.name);
    } else {
      const VarInfo& vi = var(s.target.name);
      if (s.target.indices.size() != vi.dims.size())
        throw std::runtime_error("wrong number of indices for " + s.target.name);
      c.slot = vi.offset;
      c.dims = vi.dims;
      for (const auto& i : s.target.indices)
        c.indices.push_back(compile(i, proc));
    }
  }
  c.expr = compile(s.expr, proc);
  for (const auto& t : s.then_body)
    c.then_body.push_back(compile(t, proc));
  for (const auto& t : s.else_body)
    c.else_body.push_back(compile(t, proc));
  return c;
}

const VarInfo& Machine::var(const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end())
    throw std::runtime_error("undeclared variable " + name);
  return it->second;
}

const VarInfo* Machine::find_var(const std::string& name) const {
  auto it = vars_.find(name);
  return it == vars_.end() ? nullptr : &it->second;
}

int Machine::reg_slot(int proc, const std::string& name) const {
  auto it = regs_[proc].find(name);
  if (it == regs_[proc].end())
    throw std::runtime_error("undeclared register " + name);
  return it->second;
}

State Machine::initial() const {
  State s;
  s.pc.assign(nprocs(), 0);
  s.mem.assign(mem_size_, 0);
  s.regs.assign(reg_size_, 0);
  s.loops.assign(loop_size_, 0);
  return s;
}

bool Machine::enabled(const State& s, int proc) const {
  int pc = s.pc[proc];
  return pc >= 0 && code_[proc][pc].runnable;
}

bool Machine::at_target(const State& s, const std::vector<std::pair<int, int>>& targets) const {
  for (const auto& [p, idx] : targets)
    if (s.pc[p] == idx)
      return true;
  return false;
}

namespace {

void put_varint(std::string& out, Value v) {
  auto u = (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
  while (u >= 0x80) {
    out.push_back(static_cast<char>(u | 0x80));
    u >>= 7;
  }
  out.push_back(static_cast<char>(u));
}

} // namespace

std::string Machine::key(const State& s) const {
  std::string out;
  out.reserve(s.pc.size() + s.mem.size() + s.regs.size() + s.loops.size() + 16);
  std::unordered_map<int, int> canon;
  std::vector<std::uint64_t> masks;
  auto value = [&](Value v) {
    Value c;
    if (s.concrete(v, c)) {
      put_varint(out, c);
      return;
    }
    int root = s.find(unknown_id(v));
    auto [it, fresh] = canon.emplace(root, static_cast<int>(masks.size()));
    if (fresh)
      masks.push_back(s.unk[root].mask);
    put_varint(out, kUnknownTag - it->second);
  };
  for (int pc : s.pc)
    put_varint(out, pc);
  for (Value v : s.mem)
    value(v);
  for (Value v : s.regs)
    value(v);
  for (auto l : s.loops)
    out.push_back(static_cast<char>(l));
  for (auto m : masks)
    put_varint(out, static_cast<Value>(m));
  return out;
}

ScState Machine::concretize(const State& s) const {
  auto fix = [&](Value v) {
    if (!is_unknown(v))
      return v;
    return static_cast<Value>(std::countr_zero(s.unk[s.find(unknown_id(v))].mask));
  };
  ScState out;
  out.pc = s.pc;
  for (Value v : s.mem)
    out.mem.push_back(fix(v));
  for (Value v : s.regs)
    out.regs.push_back(fix(v));
  return out;
}

} // namespace p2sc::sc::detail
