#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "p2sc/power.hpp"

namespace p2sc::power {

Run replay(const Semantics& sem, const std::vector<Step>& steps) {
  Run r;
  r.final = sem.initial();
  for (const auto& s : steps) {
    r.final = sem.apply(r.final, s);
    r.steps.push_back(s);
  }
  return r;
}

int count_contexts(const std::vector<Step>& steps) {
  int n = 0;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (i == 0 || steps[i].proc != steps[i - 1].proc)
      ++n;
  return n;
}

namespace {

class Search {
public:
  Search(const Semantics& sem, const std::vector<std::string>& targets, int k,
         const OracleBounds& b)
      : sem_(sem), targets_(targets), k_(k), bounds_(b) {}

  OracleVerdict run() {
    OracleVerdict v;
    v.bounds = bounds_;
    Configuration c = sem_.initial();
    if (dfs(c, -1, 0)) {
      v.reachable = true;
      Run r;
      r.steps = path_;
      r.final = std::move(found_);
      v.contexts_used = count_contexts(r.steps);
      v.witness = std::move(r);
    }
    v.bounded_out = bounded_out_;
    v.stats = stats_;
    return v;
  }

private:
  bool at_target(const Configuration& c) const {
    if (!sem_.committed(c))
      return false;
    for (int p = 0; p < sem_.nprocs(); ++p) {
      std::string l = sem_.label_of(c, p);
      if (!l.empty() && std::find(targets_.begin(), targets_.end(), l) != targets_.end())
        return true;
    }
    return false;
  }

  // True when (ctx, depth) is dominated by an earlier visit of the same
  // state; otherwise records it.
  bool seen(const Configuration& c, int cur, int ctx, int depth) {
    std::string key = sem_.encode(c);
    key.push_back(static_cast<char>(cur + 1));
    auto& marks = visited_[key];
    for (const auto& [mc, md] : marks)
      if (mc <= ctx && md <= depth)
        return true;
    std::erase_if(marks, [&](const auto& m) { return ctx <= m.first && depth <= m.second; });
    marks.emplace_back(ctx, depth);
    return false;
  }

  bool dfs(const Configuration& c, int cur, int ctx) {
    ++stats_.states;
    if (at_target(c)) {
      found_ = c;
      return true;
    }
    int depth = static_cast<int>(path_.size());
    if (depth >= bounds_.max_run_length) {
      bounded_out_ = true;
      return false;
    }
    if (sem_.dead(c) || seen(c, cur, ctx, depth))
      return false;
    bool capped = false;
    auto next = sem_.enabled(c, bounds_, &capped);
    if (capped)
      bounded_out_ = true;
    for (auto& t : next) {
      int nctx = t.step.proc == cur ? ctx : ctx + 1;
      if (nctx > k_)
        continue;
      ++stats_.transitions;
#ifndef NDEBUG
      auto bad = sem_.check(t.next);
      auto bad_step = sem_.check_step(c, t.next);
      if (!bad.empty() || !bad_step.empty())
        throw std::logic_error("invariant violated: " +
                               (bad.empty() ? bad_step.front() : bad.front()));
#endif
      path_.push_back(t.step);
      if (dfs(t.next, t.step.proc, nctx))
        return true;
      path_.pop_back();
    }
    return false;
  }

  const Semantics& sem_;
  const std::vector<std::string>& targets_;
  int k_;
  OracleBounds bounds_;
  std::unordered_map<std::string, std::vector<std::pair<int, int>>> visited_;
  std::vector<Step> path_;
  Configuration found_;
  bool bounded_out_ = false;
  OracleStats stats_;
};

std::string event_id(const Semantics& sem, EventRef e) {
  const Program& p = sem.program().program();
  if (e.is_init())
    return "init:" + p.vars[e.idx].name;
  return p.procs[e.proc].name + "#" + std::to_string(e.idx);
}

nlohmann::json witness_json(const Semantics& sem, const Run& run) {
  const Program& p = sem.program().program();
  auto arr = nlohmann::json::array();
  for (const auto& s : run.steps) {
    nlohmann::json j{{"proc", p.procs[s.proc].name},
                     {"rule", rule_name(s.rule)},
                     {"eventId", event_id(sem, s.event)},
                     {"params", nlohmann::json::object()}};
    if (s.rule == Rule::Fetch)
      j["params"]["label"] = sem.program().at(s.proc, s.param).instr->label;
    if (s.rule == Rule::Prop)
      j["params"]["to"] = p.procs[s.param].name;
    arr.push_back(std::move(j));
  }
  return arr;
}

} // namespace

OracleVerdict k_bounded_reachability(const FlatProgram& prog,
                                     const std::vector<std::string>& targets, int k,
                                     const OracleBounds& bounds, int domain) {
  if (k < 1)
    throw std::invalid_argument("context bound must be at least 1");
  Semantics sem(prog, domain);
  return Search(sem, targets, k, bounds).run();
}

std::string witness_to_json(const Semantics& sem, const Run& run) {
  return witness_json(sem, run).dump();
}

std::string verdict_to_json(const Semantics& sem, const OracleVerdict& v) {
  nlohmann::json j{{"reachable", v.reachable},
                   {"bounded_out", v.bounded_out},
                   {"contexts_used", v.contexts_used},
                   {"bounds",
                    {{"maxEventsPerProcess", v.bounds.max_events_per_process},
                     {"maxRunLength", v.bounds.max_run_length}}},
                   {"stats", {{"states", v.stats.states}, {"transitions", v.stats.transitions}}}};
  if (v.witness)
    j["witness"] = witness_json(sem, *v.witness);
  return j.dump();
}

} // namespace p2sc::power
