#include "p2sc/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace p2sc {

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

namespace {

class Validator {
public:
  Validator(const Program& p, Dialect d) : prog_(p), dialect_(d) {}

  ValidationReport run() {
    std::map<std::string, std::string> reg_owner;
    for (const auto& v : prog_.vars) {
      if (is_reserved(v.name) && dialect_ == Dialect::Source)
        add("reserved-name", "variable '" + v.name + "' uses the reserved prefix");
      if (!v.dims.empty() && dialect_ == Dialect::Source)
        add("translated-construct", "array variable '" + v.name + "'");
    }
    std::set<std::string> procs;
    for (const auto& pr : prog_.procs) {
      if (!procs.insert(pr.name).second)
        add("duplicate-process", "process '" + pr.name + "' declared twice");
      if (is_reserved(pr.name) && dialect_ == Dialect::Source)
        add("reserved-name", "process '" + pr.name + "' uses the reserved prefix");
      for (const auto& r : pr.regs) {
        auto [it, fresh] = reg_owner.emplace(r, pr.name);
        if (!fresh)
          add("shared-register", "register '" + r + "' declared by processes '" +
                                     it->second + "' and '" + pr.name + "'");
        if (prog_.var_index(r) >= 0)
          add("name-clash", "register '" + r + "' shadows a variable");
        if (is_reserved(r) && dialect_ == Dialect::Source)
          add("reserved-name", "register '" + r + "' uses the reserved prefix");
      }
      if (pr.body.empty()) {
        add("empty-process", "process '" + pr.name + "' has no instructions");
      }
      int terminated = 0;
      cur_regs_ = std::set<std::string>(pr.regs.begin(), pr.regs.end());
      for_each_instr(pr.body, [&](const Instr& i) {
        if (i.stmt.kind == StmtKind::Terminated)
          ++terminated;
        instr(i);
      });
      if (terminated != 1)
        add("terminated-count", "process '" + pr.name + "' has " +
                                    std::to_string(terminated) +
                                    " terminated statements (expected 1)");
    }
    return std::move(report_);
  }

private:
  void add(std::string code, std::string msg, std::string label = {}) {
    report_.findings.push_back({std::move(code), std::move(msg), std::move(label)});
  }

  void instr(const Instr& i) {
    if (!labels_.insert(i.label).second)
      add("duplicate-label", "label '" + i.label + "' used more than once", i.label);
    if (is_reserved(i.label) && dialect_ == Dialect::Source)
      add("reserved-name", "label uses the reserved prefix", i.label);
    if (i.atomic) {
      if (dialect_ == Dialect::Source)
        add("translated-construct", "atomic block in a source program", i.label);
      for (const auto& s : i.prelude)
        atomic(s, i.label);
    }
    const Stmt& s = i.stmt;
    if (s.kind == StmtKind::Skip && !i.atomic)
      add("translated-construct", "empty statement outside an atomic block", i.label);
    if (s.kind == StmtKind::Write || is_aci(s.kind)) {
      if (mentions_variable(s.expr))
        add("expr-mentions-variable", "expression reads shared memory", i.label);
      if (mentions_choose(s.expr))
        add("choose-outside-atomic", "choose outside an atomic block", i.label);
      check_regs(s.expr, i.label);
    }
    if (s.kind == StmtKind::Read && !cur_regs_.count(s.reg))
      add("undeclared", "register '" + s.reg + "' not declared here", i.label);
  }

  void atomic(const AtomicStmt& s, const std::string& label) {
    expr_indices(s.expr, label);
    check_regs(s.expr, label);
    if (s.kind == AtomicKind::Assign) {
      if (!s.target.is_register)
        lvalue_index(s.target.name, s.target.indices.size(), label);
      for (const auto& e : s.target.indices) {
        expr_indices(e, label);
        if (mentions_choose(e))
          add("choose-outside-atomic", "choose inside an index", label);
      }
    } else if (mentions_choose(s.expr)) {
      add("choose-outside-atomic", "choose used in a condition", label);
    }
    for (const auto& t : s.then_body)
      atomic(t, label);
    for (const auto& t : s.else_body)
      atomic(t, label);
  }

  void lvalue_index(const std::string& name, std::size_t n, const std::string& label) {
    int v = prog_.var_index(name);
    if (v < 0) {
      add("undeclared", "variable '" + name + "' not declared", label);
      return;
    }
    if (prog_.vars[v].dims.size() != n)
      add("bad-index", "variable '" + name + "' indexed with " + std::to_string(n) +
                           " subscripts, declared with " +
                           std::to_string(prog_.vars[v].dims.size()),
          label);
  }

  void expr_indices(const Expr& e, const std::string& label) {
    if (e.kind == ExprKind::Var)
      lvalue_index(e.name, e.args.size(), label);
    for (const auto& a : e.args)
      expr_indices(a, label);
  }

  void check_regs(const Expr& e, const std::string& label) {
    for (const auto& r : registers_of(e))
      if (!cur_regs_.count(r))
        add("undeclared", "register '" + r + "' not declared here", label);
  }

  const Program& prog_;
  Dialect dialect_;
  ValidationReport report_;
  std::set<std::string> labels_;
  std::set<std::string> cur_regs_;
};

} // namespace

ValidationReport validate_program(const Program& p, Dialect dialect) {
  return Validator(p, dialect).run();
}

std::string report_to_json(const ValidationReport& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& f : r.findings)
    j.push_back({{"code", f.code}, {"message", f.message}, {"label", f.label}});
  return j.dump();
}

} // namespace p2sc
