#include <algorithm>
#include <stdexcept>

#include "p2sc/power.hpp"

namespace p2sc::power {

// Inserts a -> b into co[var] and closes transitively. Fails (leaving c
// untouched) when the edge would close a cycle.
bool Semantics::add_co(Configuration& c, int var, EventRef a, EventRef b) const {
  if (a.is_init())
    return true;
  if (co_leq(c, var, b, a))
    return false;
  auto& co = c.co[var];
  std::vector<EventRef> below{a}, above{b};
  for (const auto& [u, v] : co) {
    if (v == a)
      below.push_back(u);
    if (u == b)
      above.push_back(v);
  }
  for (auto u : below)
    for (auto v : above)
      co.emplace_back(u, v);
  std::sort(co.begin(), co.end());
  co.erase(std::unique(co.begin(), co.end()), co.end());
  return true;
}

bool Semantics::try_rule(const Configuration& c, const Step& s, Configuration* out) const {
  if (s.proc < 0 || s.proc >= nprocs())
    return false;
  int p = s.proc;
  const auto& evs = c.events[p];

  if (s.rule == Rule::Fetch) {
    std::vector<int> cand;
    if (evs.empty())
      cand.push_back(0);
    else
      cand = prog_.successors(p, evs.back().instr);
    if (s.event != EventRef{p, static_cast<int>(evs.size())} ||
        std::find(cand.begin(), cand.end(), s.param) == cand.end())
      return false;
    // A committed aci event has already fixed its branch; fetching the other
    // one would leave a committed event whose ValidCnd is false.
    if (!evs.empty() && evs.back().status == Status::Commit && evs.back().has_value &&
        p2sc::is_aci(prog_.at(p, evs.back().instr).instr->stmt.kind)) {
      const FlatInstr& f = prog_.at(p, evs.back().instr);
      if (s.param != (evs.back().value != 0 ? f.tnext : f.fnext))
        return false;
    }
    *out = c;
    Event e;
    e.instr = s.param;
    // Terminated events carry no effect and are committed when fetched.
    if (prog_.at(p, s.param).instr->stmt.kind == StmtKind::Terminated)
      e.status = Status::Commit;
    out->events[p].push_back(e);
    return true;
  }

  EventRef e = s.event;
  if (e.proc != p || e.idx < 0 || e.idx >= static_cast<int>(evs.size()))
    return false;
  const Event& ev = evs[e.idx];
  const Stmt& st = instr_of(c, e).stmt;
  int x = var_of(c, e);

  switch (s.rule) {
  case Rule::LocalRead:
  case Rule::PropRead: {
    if (st.kind != StmtKind::Read || ev.status != Status::Fetch)
      return false;
    auto w = closest_write(c, e);
    bool local = w && event(c, *w).status == Status::Init;
    if (local != (s.rule == Rule::LocalRead))
      return false;
    if (w && event(c, *w).status == Status::Fetch)
      return false;
    EventRef src = local ? *w : prop(c, p, x);
    *out = c;
    Event& ne = out->events[p][e.idx];
    ne.status = Status::Init;
    ne.rf = src;
    ne.has_value = true;
    ne.value = src.is_init() ? 0 : event(c, src).value;
    return true;
  }
  case Rule::ComRead: {
    if (st.kind != StmtKind::Read || ev.status != Status::Init)
      return false;
    auto pr = commit_predicates(c, e);
    if (pr.rd_cnd != Flag::True || pr.com_cnd != Flag::True)
      return false;
    *out = c;
    out->events[p][e.idx].status = Status::Commit;
    return true;
  }
  case Rule::InitWrite: {
    if (st.kind != StmtKind::Write || ev.status != Status::Fetch)
      return false;
    if (commit_predicates(c, e).init_cnd != Flag::True)
      return false;
    auto v = eval_event_value(c, e);
    if (!v)
      return false;
    *out = c;
    Event& ne = out->events[p][e.idx];
    ne.status = Status::Init;
    ne.has_value = true;
    ne.value = *v;
    return true;
  }
  case Rule::ComWrite: {
    if (st.kind != StmtKind::Write || ev.status != Status::Init)
      return false;
    if (commit_predicates(c, e).com_cnd != Flag::True)
      return false;
    *out = c;
    out->events[p][e.idx].status = Status::Commit;
    // The write becomes co-later than everything p has seen on x and is
    // propagated to p itself.
    if (!add_co(*out, x, prop(c, p, x), e))
      return false;
    prop(*out, p, x) = e;
    return true;
  }
  case Rule::ComAci: {
    if (!p2sc::is_aci(st.kind) || ev.status == Status::Commit)
      return false;
    auto v = eval_event_value(c, e);
    if (!v || commit_predicates(c, e).valid_cnd != Flag::True)
      return false;
    *out = c;
    Event& ne = out->events[p][e.idx];
    ne.status = Status::Commit;
    ne.has_value = true;
    ne.value = *v != 0 ? 1 : 0;
    return true;
  }
  case Rule::Prop: {
    int q = s.param;
    if (st.kind != StmtKind::Write || ev.status != Status::Commit || q < 0 ||
        q >= nprocs() || q == p)
      return false;
    EventRef seen = prop(c, q, x);
    if (co_leq(c, x, e, seen))
      return false;
    *out = c;
    if (!add_co(*out, x, seen, e))
      return false;
    prop(*out, q, x) = e;
    return true;
  }
  case Rule::Fetch:
    break;
  }
  return false;
}

std::vector<Transition> Semantics::enabled(const Configuration& c, const OracleBounds& b,
                                           bool* fetch_capped) const {
  std::vector<Transition> out;
  auto attempt = [&](const Step& s) {
    Configuration next;
    if (try_rule(c, s, &next))
      out.push_back({s, std::move(next)});
  };
  for (int p = 0; p < nprocs(); ++p) {
    const auto& evs = c.events[p];
    int n = static_cast<int>(evs.size());
    std::vector<int> cand;
    if (evs.empty())
      cand.push_back(0);
    else
      cand = prog_.successors(p, evs.back().instr);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (!cand.empty() && n >= b.max_events_per_process) {
      if (fetch_capped)
        *fetch_capped = true;
    } else {
      for (int i : cand)
        attempt({p, Rule::Fetch, {p, n}, i});
    }
    for (int j = 0; j < n; ++j) {
      EventRef e{p, j};
      const Stmt& st = instr_of(c, e).stmt;
      Status status = evs[j].status;
      if (st.kind == StmtKind::Read) {
        if (status == Status::Fetch) {
          attempt({p, Rule::LocalRead, e, 0});
          attempt({p, Rule::PropRead, e, 0});
        } else if (status == Status::Init) {
          attempt({p, Rule::ComRead, e, 0});
        }
      } else if (st.kind == StmtKind::Write) {
        if (status == Status::Fetch)
          attempt({p, Rule::InitWrite, e, 0});
        else if (status == Status::Init)
          attempt({p, Rule::ComWrite, e, 0});
        else
          for (int q = 0; q < nprocs(); ++q)
            if (q != p)
              attempt({p, Rule::Prop, e, q});
      } else if (p2sc::is_aci(st.kind) && status != Status::Commit) {
        attempt({p, Rule::ComAci, e, 0});
      }
    }
  }
  return out;
}

Configuration Semantics::apply(const Configuration& c, const Step& s) const {
  Configuration next;
  if (!try_rule(c, s, &next))
    throw std::logic_error(std::string("step not enabled: ") + rule_name(s.rule));
  return next;
}

} // namespace p2sc::power
