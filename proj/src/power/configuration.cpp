#include <algorithm>
#include <stdexcept>

#include "p2sc/eval.hpp"
#include "p2sc/power.hpp"

namespace p2sc::power {

namespace {

Flag flag(bool b) { return b ? Flag::True : Flag::False; }

void put(std::string& out, int v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

const char* rule_name(Rule r) {
  switch (r) {
  case Rule::Fetch:
    return "Fetch";
  case Rule::LocalRead:
    return "Local-Read";
  case Rule::PropRead:
    return "Prop-Read";
  case Rule::ComRead:
    return "Com-Read";
  case Rule::InitWrite:
    return "Init-Write";
  case Rule::ComWrite:
    return "Com-Write";
  case Rule::ComAci:
    return "Com-ACI";
  case Rule::Prop:
    return "Prop";
  }
  return "?";
}

Semantics::Semantics(const FlatProgram& prog, int domain)
    : prog_(prog), nvars_(static_cast<int>(prog.program().vars.size())), domain_(domain) {
  if (domain < 1)
    throw std::invalid_argument("domain must be positive");
  for (const auto& v : prog.program().vars)
    if (!v.dims.empty())
      throw std::invalid_argument("array variable '" + v.name +
                                  "' is not supported by the POWER semantics");
}

Configuration Semantics::initial() const {
  Configuration c;
  c.events.resize(nprocs());
  c.prop.resize(static_cast<std::size_t>(nprocs()) * nvars_);
  for (int p = 0; p < nprocs(); ++p)
    for (int x = 0; x < nvars_; ++x)
      prop(c, p, x) = EventRef::init(x);
  c.co.resize(nvars_);
  return c;
}

const Instr& Semantics::instr_of(const Configuration& c, EventRef e) const {
  return *prog_.at(e.proc, event(c, e).instr).instr;
}

int Semantics::var_of(const Configuration& c, EventRef e) const {
  if (e.is_init())
    return e.idx;
  const Stmt& s = instr_of(c, e).stmt;
  if (s.kind != StmtKind::Read && s.kind != StmtKind::Write)
    return -1;
  return prog_.program().var_index(s.var);
}

bool Semantics::is_read(const Configuration& c, EventRef e) const {
  return !e.is_init() && instr_of(c, e).stmt.kind == StmtKind::Read;
}

bool Semantics::is_write(const Configuration& c, EventRef e) const {
  return e.is_init() || instr_of(c, e).stmt.kind == StmtKind::Write;
}

bool Semantics::is_aci(const Configuration& c, EventRef e) const {
  return !e.is_init() && p2sc::is_aci(instr_of(c, e).stmt.kind);
}

std::optional<EventRef> Semantics::closest_write(const Configuration& c, EventRef e) const {
  int x = var_of(c, e);
  for (int j = e.idx - 1; j >= 0; --j) {
    EventRef w{e.proc, j};
    if (is_write(c, w) && var_of(c, w) == x)
      return w;
  }
  return std::nullopt;
}

std::vector<EventRef> Semantics::data_preds(const Configuration& c, EventRef e) const {
  std::vector<EventRef> out;
  const Stmt& s = instr_of(c, e).stmt;
  if (s.kind != StmtKind::Write && !p2sc::is_aci(s.kind))
    return out;
  for (const auto& r : registers_of(s.expr)) {
    for (int j = e.idx - 1; j >= 0; --j) {
      EventRef d{e.proc, j};
      const Stmt& ds = instr_of(c, d).stmt;
      if (ds.kind == StmtKind::Read && ds.reg == r) {
        if (std::find(out.begin(), out.end(), d) == out.end())
          out.push_back(d);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Value> Semantics::eval_event_value(const Configuration& c, EventRef e) const {
  if (e.is_init())
    return 0;
  const Event& ev = event(c, e);
  const Stmt& s = instr_of(c, e).stmt;
  if (s.kind == StmtKind::Read) {
    if (ev.status == Status::Fetch)
      return std::nullopt;
    return ev.value;
  }
  if (s.kind != StmtKind::Write && !p2sc::is_aci(s.kind))
    return std::nullopt;
  // Register values come from the po-latest read into each register;
  // registers that were never loaded hold 0.
  bool ready = true;
  Value v = eval_regs(s.expr, [&](const std::string& r) -> Value {
    for (int j = e.idx - 1; j >= 0; --j) {
      EventRef d{e.proc, j};
      const Stmt& ds = instr_of(c, d).stmt;
      if (ds.kind == StmtKind::Read && ds.reg == r) {
        const Event& de = event(c, d);
        if (de.status == Status::Fetch) {
          ready = false;
          return 0;
        }
        return de.value;
      }
    }
    return 0;
  });
  if (!ready)
    return std::nullopt;
  return s.kind == StmtKind::Write ? reduce(v, domain_) : v;
}

bool Semantics::co_leq(const Configuration& c, int var, EventRef a, EventRef b) const {
  if (a == b || a.is_init())
    return true;
  if (b.is_init())
    return false;
  return std::binary_search(c.co[var].begin(), c.co[var].end(), std::pair{a, b});
}

CommitPredicates Semantics::commit_predicates(const Configuration& c, EventRef e) const {
  CommitPredicates out;
  const Event& ev = event(c, e);
  const Stmt& s = instr_of(c, e).stmt;
  int x = var_of(c, e);

  auto com_cnd = [&] {
    auto dp = data_preds(c, e);
    for (int j = 0; j < e.idx; ++j) {
      EventRef d{e.proc, j};
      bool before = is_aci(c, d) || (x >= 0 && var_of(c, d) == x) ||
                    std::find(dp.begin(), dp.end(), d) != dp.end();
      if (before && event(c, d).status != Status::Commit)
        return false;
    }
    return true;
  };

  if (s.kind == StmtKind::Read) {
    if (ev.status == Status::Fetch) {
      out.rd_cnd = Flag::NotReady;
    } else {
      out.rd_cnd = Flag::True;
      for (int j = 0; j < e.idx; ++j) {
        EventRef d{e.proc, j};
        if (!is_read(c, d) || var_of(c, d) != x)
          continue;
        const Event& de = event(c, d);
        if (de.status == Status::Fetch) {
          out.rd_cnd = Flag::NotReady;
          break;
        }
        if (!co_leq(c, x, de.rf, ev.rf)) {
          out.rd_cnd = Flag::False;
          break;
        }
      }
    }
    out.com_cnd = flag(com_cnd());
  } else if (s.kind == StmtKind::Write) {
    bool ok = true;
    for (auto d : data_preds(c, e))
      ok = ok && event(c, d).status != Status::Fetch;
    out.init_cnd = flag(ok);
    out.com_cnd = flag(com_cnd());
  } else if (p2sc::is_aci(s.kind)) {
    auto v = eval_event_value(c, e);
    std::size_t n = c.events[e.proc].size();
    if (static_cast<std::size_t>(e.idx) + 1 >= n) {
      out.valid_cnd = Flag::True;
    } else if (!v) {
      out.valid_cnd = Flag::NotReady;
    } else {
      const FlatInstr& f = prog_.at(e.proc, ev.instr);
      int succ = event(c, {e.proc, e.idx + 1}).instr;
      out.valid_cnd = flag(succ == (*v != 0 ? f.tnext : f.fnext));
    }
  }
  return out;
}

bool Semantics::committed(const Configuration& c) const {
  for (const auto& es : c.events)
    for (const auto& e : es)
      if (e.status != Status::Commit)
        return false;
  return true;
}

std::string Semantics::label_of(const Configuration& c, int proc) const {
  if (c.events[proc].empty())
    return {};
  return prog_.at(proc, c.events[proc].back().instr).instr->label;
}

bool Semantics::dead(const Configuration& c) const {
  for (int p = 0; p < nprocs(); ++p)
    for (int j = 0; j + 1 < static_cast<int>(c.events[p].size()); ++j) {
      EventRef e{p, j};
      if (event(c, e).status == Status::Commit || !is_aci(c, e))
        continue;
      if (commit_predicates(c, e).valid_cnd == Flag::False)
        return true;
    }
  return false;
}

std::vector<std::string> Semantics::check(const Configuration& c) const {
  std::vector<std::string> bad;
  auto name = [&](EventRef e) {
    return e.is_init() ? "init_" + std::to_string(e.idx)
                       : std::to_string(e.proc) + "." + std::to_string(e.idx);
  };
  auto exists = [&](EventRef e) {
    return e.is_init() ? e.idx >= 0 && e.idx < nvars_
                       : e.proc < nprocs() && e.idx >= 0 &&
                             e.idx < static_cast<int>(c.events[e.proc].size());
  };
  for (int p = 0; p < nprocs(); ++p)
    for (int j = 0; j < static_cast<int>(c.events[p].size()); ++j) {
      EventRef e{p, j};
      const Event& ev = event(c, e);
      const Stmt& s = instr_of(c, e).stmt;
      if (j > 0) {
        auto succ = prog_.successors(p, c.events[p][j - 1].instr);
        if (std::find(succ.begin(), succ.end(), ev.instr) == succ.end())
          bad.push_back("po: " + name(e) + " is not a successor of its predecessor");
      }
      bool rw = s.kind == StmtKind::Read || s.kind == StmtKind::Write;
      if (rw && ev.has_value != (ev.status != Status::Fetch))
        bad.push_back("value: " + name(e) + " has_value disagrees with status");
      if (s.kind == StmtKind::Terminated && ev.status != Status::Commit)
        bad.push_back("status: terminated event " + name(e) + " not committed");
      if (s.kind == StmtKind::Read && ev.status != Status::Fetch) {
        if (!exists(ev.rf) || !is_write(c, ev.rf) || var_of(c, ev.rf) != var_of(c, e))
          bad.push_back("rf: " + name(e) + " reads from a write on another variable");
        else if (!ev.rf.is_init() && event(c, ev.rf).status == Status::Fetch)
          bad.push_back("rf: " + name(e) + " reads from an uninitialized write");
      }
    }
  for (int p = 0; p < nprocs(); ++p)
    for (int x = 0; x < nvars_; ++x) {
      EventRef w = prop(c, p, x);
      if (!exists(w) || !is_write(c, w) || var_of(c, w) != x)
        bad.push_back("prop: entry is not a write on its variable");
      else if (!w.is_init() && event(c, w).status != Status::Commit)
        bad.push_back("prop: entry is not committed");
    }
  for (int x = 0; x < nvars_; ++x) {
    const auto& co = c.co[x];
    if (!std::is_sorted(co.begin(), co.end()))
      bad.push_back("co: edge list not sorted");
    for (const auto& [a, b] : co) {
      if (!exists(a) || !exists(b) || a.is_init() || b.is_init() || !is_write(c, a) ||
          !is_write(c, b) || var_of(c, a) != x || var_of(c, b) != x) {
        bad.push_back("co: edge relates events that are not writes on the variable");
        continue;
      }
      if (a == b)
        bad.push_back("co: cycle through " + name(a));
      if (event(c, a).status != Status::Commit || event(c, b).status != Status::Commit)
        bad.push_back("co: edge on an uncommitted write");
      for (const auto& [b2, d] : co)
        if (b2 == b && !std::binary_search(co.begin(), co.end(), std::pair{a, d}))
          bad.push_back("co: not transitively closed");
    }
  }
  return bad;
}

std::vector<std::string> Semantics::check_step(const Configuration& before,
                                               const Configuration& after) const {
  std::vector<std::string> bad;
  for (int p = 0; p < nprocs(); ++p) {
    const auto& b = before.events[p];
    const auto& a = after.events[p];
    if (a.size() < b.size()) {
      bad.push_back("events removed");
      continue;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[j].instr != b[j].instr)
        bad.push_back("event relabelled");
      if (a[j].status < b[j].status)
        bad.push_back("status regressed");
      if (b[j].has_value && (a[j].value != b[j].value || a[j].rf != b[j].rf))
        bad.push_back("memoized value changed");
    }
  }
  for (int p = 0; p < nprocs(); ++p)
    for (int x = 0; x < nvars_; ++x)
      if (!co_leq(after, x, prop(before, p, x), prop(after, p, x)))
        bad.push_back("prop moved backwards in co");
  for (int x = 0; x < nvars_; ++x)
    for (const auto& edge : before.co[x])
      if (!std::binary_search(after.co[x].begin(), after.co[x].end(), edge))
        bad.push_back("co edge removed");
  return bad;
}

std::string Semantics::encode(const Configuration& c) const {
  std::string out;
  for (const auto& es : c.events) {
    put(out, static_cast<int>(es.size()));
    for (const auto& e : es) {
      put(out, e.instr);
      out.push_back(static_cast<char>(e.status));
      out.push_back(static_cast<char>(e.has_value));
      put(out, static_cast<int>(e.value));
      put(out, e.rf.proc);
      put(out, e.rf.idx);
    }
  }
  for (auto w : c.prop) {
    put(out, w.proc);
    put(out, w.idx);
  }
  for (const auto& co : c.co) {
    put(out, static_cast<int>(co.size()));
    for (const auto& [a, b] : co) {
      put(out, a.proc);
      put(out, a.idx);
      put(out, b.proc);
      put(out, b.idx);
    }
  }
  return out;
}

} // namespace p2sc::power
