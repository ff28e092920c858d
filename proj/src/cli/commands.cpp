#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "p2sc/cfg.hpp"
#include "p2sc/cli.hpp"
#include "p2sc/parser.hpp"
#include "p2sc/validate.hpp"

namespace p2sc::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

sc::ExploreBounds explore_bounds(const Bounds& b) {
  sc::ExploreBounds e = b.explore;
  e.domain = b.domain;
  return e;
}

EngineResult run_oracle(const Program& p, int k, const std::vector<std::string>& targets,
                        const Bounds& b) {
  auto t0 = Clock::now();
  FlatProgram fp(p);
  auto v = power::k_bounded_reachability(fp, targets, k, b.oracle, b.domain);
  EngineResult r{mode_name(Mode::PowerOracle), v.reachable, v.bounded_out, "", "", since(t0)};
  if (v.witness)
    r.witness_json = power::witness_to_json(power::Semantics(fp, b.domain), *v.witness);
  r.stats_json = nlohmann::json{{"states", v.stats.states},
                                {"transitions", v.stats.transitions},
                                {"contexts", v.contexts_used}}
                     .dump();
  return r;
}

EngineResult sc_result(const char* engine, const sc::ScVerdict& v, Clock::time_point t0) {
  EngineResult r{engine, v.reachable, v.bounded_out, "", sc::stats_to_json(v.stats), since(t0)};
  if (v.witness)
    r.witness_json = sc::trace_to_json(*v.witness);
  return r;
}

EngineResult run_translated(const Program& p, int k, const std::vector<std::string>& targets,
                            const Bounds& b) {
  auto t0 = Clock::now();
  auto ep = translate_program(p, k, targets, b.domain);
  auto r = sc_result(mode_name(Mode::PowerTranslate), sc::sc_explore(ep, k, explore_bounds(b)), t0);
  auto stats = nlohmann::json::parse(r.stats_json);
  stats["translation"] = {{"sourceInstrs", ep.stats.source_instrs},
                          {"atomicStmts", ep.stats.output_atomic_stmts},
                          {"chooseSites", ep.stats.choose_sites},
                          {"constrainSites", ep.stats.constrain_sites},
                          {"auxCells", ep.layout.logical_cells()}};
  r.stats_json = stats.dump();
  return r;
}

EngineResult run_sc(const Program& p, int k, const std::vector<std::string>& targets,
                    const Bounds& b) {
  auto t0 = Clock::now();
  return sc_result(mode_name(Mode::Sc), sc::sc_explore(p, targets, k, explore_bounds(b)), t0);
}

Report base(const std::string& command, Mode mode, int k, const std::vector<std::string>& targets) {
  Report r;
  r.command = command;
  r.mode = mode;
  r.k = k;
  r.targets = targets;
  return r;
}

} // namespace

Report check_program(const Program& p, Mode mode, int k, const std::vector<std::string>& targets,
                     const Bounds& b) {
  if (mode == Mode::Diff)
    return diff_program(p, k, targets, b);
  Report r = base("check", mode, k, targets);
  switch (mode) {
  case Mode::PowerOracle:
    r.results.push_back(run_oracle(p, k, targets, b));
    break;
  case Mode::PowerTranslate:
    r.results.push_back(run_translated(p, k, targets, b));
    break;
  default:
    r.results.push_back(run_sc(p, k, targets, b));
    break;
  }
  return r;
}

Report diff_program(const Program& p, int k, const std::vector<std::string>& targets,
                    const Bounds& b) {
  Report r = base("diff", Mode::Diff, k, targets);
  r.results.push_back(run_oracle(p, k, targets, b));
  r.results.push_back(run_translated(p, k, targets, b));
  const auto& o = r.results[0];
  const auto& t = r.results[1];
  if (o.bounded_out || t.bounded_out)
    r.diff = DiffStatus::Inconclusive;
  else
    r.diff = o.reachable == t.reachable ? DiffStatus::Pass : DiffStatus::Fail;
  return r;
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_program(text.str());
}

Report cmd_check(const CheckRequest& req) {
  Report r = base(req.mode == Mode::Diff ? "diff" : "check", req.mode, req.k, req.targets);
  r.input = req.input;
  auto fail = [&](ErrorKind kind, std::string msg) {
    r.diagnostics.push_back({kind, std::move(msg), 0, 0, ""});
    return r;
  };
  Program p;
  try {
    p = load_program(req.input);
  } catch (const ParseError& e) {
    r.diagnostics.push_back({ErrorKind::Parse, e.message(), e.line(), e.column(), ""});
    return r;
  } catch (const std::exception& e) {
    return fail(ErrorKind::Io, e.what());
  }
  auto dialect = req.mode == Mode::Sc ? Dialect::Translated : Dialect::Source;
  auto rep = validate_program(p, dialect);
  for (const auto& f : rep.findings)
    r.diagnostics.push_back({ErrorKind::Validation, f.code + ": " + f.message, 0, 0, f.label});
  if (!rep.ok())
    return r;
  if (req.k < 1)
    return fail(ErrorKind::Usage, "context bound must be at least 1");
  if (req.targets.empty())
    return fail(ErrorKind::Usage, "no target label given");
  FlatProgram fp(p);
  for (const auto& t : req.targets)
    if (!fp.find(t))
      return fail(ErrorKind::Usage, "unknown target label " + t);
  try {
    Report done = check_program(p, req.mode, req.k, req.targets, req.bounds);
    done.input = req.input;
    return done;
  } catch (const std::invalid_argument& e) {
    return fail(ErrorKind::Usage, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorKind::Internal, e.what());
  }
}

} // namespace p2sc::cli
