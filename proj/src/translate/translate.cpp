#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>

#include "p2sc/eval.hpp"
#include "p2sc/translate.hpp"
#include "p2sc/validate.hpp"

namespace p2sc {

namespace {

using Block = std::vector<AtomicStmt>;

Expr c(Value v) { return Expr::constant(v); }

Expr cell(const char* name, std::vector<Expr> idx = {}) {
  return Expr::var(name, std::move(idx));
}

LValue lcell(const char* name, std::vector<Expr> idx = {}) {
  return {name, std::move(idx), false};
}

LValue lreg(const std::string& name) { return {name, {}, true}; }

AtomicStmt set(LValue lv, Expr e) { return AtomicStmt::assign(std::move(lv), std::move(e)); }

AtomicStmt need(Expr e) { return AtomicStmt::constrain(std::move(e)); }

class Translator {
public:
  Translator(const Program& src, int k, const std::vector<std::string>& targets, int domain)
      : src_(src), k_(k), targets_(targets), domain_(domain) {
    auto& L = out_.layout;
    L.nprocs = static_cast<int>(src.procs.size());
    L.nvars = static_cast<int>(src.vars.size());
    L.k = k;
    L.ntargets = static_cast<int>(targets.size());
    for (const auto& p : src.procs) {
      L.procs.push_back(p.name);
      for (const auto& r : p.regs)
        L.regs.push_back(r);
    }
    for (const auto& v : src.vars)
      L.vars.push_back(v.name);
    L.nregs = static_cast<int>(L.regs.size());
  }

  ExtendedProgram run() {
    declare();
    out_.program.procs.push_back(ini_proc());
    out_.program.procs.push_back(ver_proc());
    for (int i = 0; i < out_.layout.nprocs; ++i)
      out_.program.procs.push_back(process(i));
    out_.targets = targets_;
    out_.stats.source_instrs = 0;
    for (const auto& p : src_.procs)
      for_each_instr(p.body, [&](const Instr&) { ++out_.stats.source_instrs; });
    for (const auto& p : out_.program.procs)
      for_each_instr(p.body, [&](const Instr& i) { count(i.prelude); });
    return std::move(out_);
  }

private:
  int P() const { return out_.layout.nprocs; }
  int X() const { return out_.layout.nvars; }

  void declare() {
    auto& vars = out_.program.vars;
    int K1 = k_ + 1;
    vars.push_back({AuxLayout::cval, {P(), X(), K1}});
    vars.push_back({AuxLayout::initcval, {P(), X(), K1}});
    vars.push_back({AuxLayout::utst, {P(), X(), K1, P()}});
    vars.push_back({AuxLayout::gtst, {P(), X(), K1, P()}});
    for (const char* n : {AuxLayout::lval, AuxLayout::iread, AuxLayout::cread,
                          AuxLayout::iwrite, AuxLayout::cwrite})
      vars.push_back({n, {P(), X()}});
    // Zero-sized arrays are not expressible; programs without registers
    // still get one unused slot.
    int R = std::max(1, out_.layout.nregs);
    vars.push_back({AuxLayout::ireg, {R}});
    vars.push_back({AuxLayout::creg, {R}});
    vars.push_back({AuxLayout::ctrl, {P()}});
    vars.push_back({AuxLayout::active, {K1}});
    vars.push_back({AuxLayout::ccontext, {}});
    vars.push_back({AuxLayout::reached, {std::max(1, out_.layout.ntargets)}});
  }

  // Initialization: baseline values, context-start guesses, and the
  // active process of every context.
  Process ini_proc() {
    Block b;
    for (int p = 0; p < P(); ++p)
      for (int x = 0; x < X(); ++x) {
        std::vector<Expr> px{c(p), c(x)};
        for (const char* n : {AuxLayout::iread, AuxLayout::cread, AuxLayout::iwrite,
                              AuxLayout::cwrite})
          b.push_back(set(lcell(n, px), c(1)));
        b.push_back(set(lcell(AuxLayout::lval, px), c(0)));
        b.push_back(set(lcell(AuxLayout::cval, {c(p), c(x), c(1)}), c(0)));
        for (int q = 0; q < P(); ++q)
          b.push_back(set(lcell(AuxLayout::utst, {c(p), c(x), c(1), c(q)}), c(0)));
      }
    for (int p = 0; p < P(); ++p)
      b.push_back(set(lcell(AuxLayout::ctrl, {c(p)}), c(1)));
    for (int r = 0; r < out_.layout.nregs; ++r) {
      b.push_back(set(lcell(AuxLayout::ireg, {c(r)}), c(1)));
      b.push_back(set(lcell(AuxLayout::creg, {c(r)}), c(1)));
    }
    for (int p = 0; p < P(); ++p)
      for (int x = 0; x < X(); ++x)
        for (int j = 2; j <= k_; ++j) {
          for (int q = 0; q < P(); ++q) {
            std::vector<Expr> idx{c(p), c(x), c(j), c(q)};
            b.push_back(set(lcell(AuxLayout::gtst, idx), Expr::choose(0, k_)));
            b.push_back(set(lcell(AuxLayout::utst, idx), cell(AuxLayout::gtst, idx)));
          }
          std::vector<Expr> idx{c(p), c(x), c(j)};
          b.push_back(set(lcell(AuxLayout::initcval, idx), Expr::choose(0, domain_ - 1)));
          b.push_back(set(lcell(AuxLayout::cval, idx), cell(AuxLayout::initcval, idx)));
        }
    for (int j = 1; j <= k_; ++j)
      b.push_back(set(lcell(AuxLayout::active, {c(j)}), Expr::choose(0, P() - 1)));
    b.push_back(set(lcell(AuxLayout::ccontext), c(1)));

    Process proc;
    proc.name = kIniProc;
    Instr i;
    i.label = "@i_init";
    i.atomic = true;
    i.prelude = std::move(b);
    proc.body.push_back(std::move(i));
    proc.body.push_back(make_terminated("@i_done"));
    return proc;
  }

  // Verification: each context's final summary and value must match the
  // guess made for the start of the next context; some target was reached.
  Process ver_proc() {
    Block b;
    for (int p = 0; p < P(); ++p)
      for (int x = 0; x < X(); ++x)
        for (int j = 1; j < k_; ++j) {
          for (int q = 0; q < P(); ++q)
            b.push_back(need(eq(cell(AuxLayout::utst, {c(p), c(x), c(j), c(q)}),
                                cell(AuxLayout::gtst, {c(p), c(x), c(j + 1), c(q)}))));
          b.push_back(need(eq(cell(AuxLayout::cval, {c(p), c(x), c(j)}),
                              cell(AuxLayout::initcval, {c(p), c(x), c(j + 1)}))));
        }
    Expr any = c(0);
    for (int t = 0; t < static_cast<int>(targets_.size()); ++t) {
      Expr f = cell(AuxLayout::reached, {c(t)});
      any = t == 0 ? f : lor(std::move(any), std::move(f));
    }
    b.push_back(need(std::move(any)));

    Process proc;
    proc.name = kVerProc;
    Instr i;
    i.label = "@v_check";
    i.atomic = true;
    i.prelude = std::move(b);
    proc.body.push_back(std::move(i));
    proc.body.push_back(make_terminated(kErrorLabel));
    return proc;
  }

  Process process(int p) {
    const Process& sp = src_.procs[p];
    Process out;
    out.name = sp.name;
    out.regs = sp.regs;
    tmp_ = [&](const std::string& n) { return "@" + sp.name + "." + n; };
    for (const char* n : {"old_cw", "old_ir", "old_cr"})
      out.regs.push_back(tmp_(n));
    for (int q = 0; q < P(); ++q)
      out.regs.push_back(tmp_("ntst." + std::to_string(q)));
    out.body = block(sp.body, p);
    return out;
  }

  std::vector<Instr> block(const std::vector<Instr>& in, int p) {
    std::vector<Instr> out;
    for (const auto& i : in)
      out.push_back(instr(i, p));
    return out;
  }

  static bool branching(StmtKind k) { return k == StmtKind::If || k == StmtKind::While; }

  // Conjunction of "not yet reached" over the if/while targets in process p.
  std::optional<Expr> halted(int p) const {
    std::optional<Expr> out;
    for_each_instr(src_.procs[p].body, [&](const Instr& in) {
      int t = target_index(in.label);
      if (t < 0 || !branching(in.stmt.kind))
        return;
      Expr e = eq(cell(AuxLayout::reached, {c(t)}), c(0));
      out = out ? Expr::binary(BinOp::And, *out, e) : e;
    });
    return out;
  }

  int target_index(const std::string& label) const {
    auto it = std::find(targets_.begin(), targets_.end(), label);
    return it == targets_.end() ? -1 : static_cast<int>(it - targets_.begin());
  }

  Instr instr(const Instr& in, int p) {
    Instr out;
    out.label = in.label;
    int t = target_index(in.label);
    const Stmt& s = in.stmt;
    if (s.kind == StmtKind::Terminated && t < 0) {
      out.stmt = s;
      return out;
    }
    out.atomic = true;
    Block& b = out.prelude;
    // Once one of its branching targets is reached the process fetches
    // nothing more: the target stays its maximal event.
    if (auto halt = halted(p))
      b.push_back(need(*halt));
    // activeCnt
    b.push_back(need(eq(cell(AuxLayout::active, {cell(AuxLayout::ccontext)}), c(p))));
    switch (s.kind) {
    case StmtKind::Write:
      write(b, p, s);
      break;
    case StmtKind::Read:
      read(b, p, s);
      break;
    case StmtKind::Assume:
      // A reached target has no successor, so its branch is irrelevant.
      if (t >= 0)
        control(b, p, s.expr);
      else
        b.push_back(AtomicStmt::when(s.expr, control_block(p, s.expr)));
      break;
    case StmtKind::If:
    case StmtKind::While:
      control(b, p, s.expr);
      break;
    default:
      break;
    }
    if (t >= 0)
      b.push_back(set(lcell(AuxLayout::reached, {c(t)}), c(1)));
    // closeCnt
    b.push_back(set(lcell(AuxLayout::ccontext),
                    add(cell(AuxLayout::ccontext), Expr::choose(0, k_ - 1))));
    b.push_back(need(le(cell(AuxLayout::ccontext), c(k_))));

    if (t >= 0 && !branching(s.kind) && s.kind != StmtKind::Terminated) {
      // No nested code to keep, so the process simply stops here.
      out.stmt = make_assume("", c(0)).stmt;
    } else if (s.kind == StmtKind::Read || s.kind == StmtKind::Write) {
      out.stmt.kind = StmtKind::Skip;
    } else {
      out.stmt = s;
      out.stmt.then_block = block(s.then_block, p);
      out.stmt.else_block = block(s.else_block, p);
    }
    return out;
  }

  Block control_block(int p, const Expr& cond) {
    Block b;
    control(b, p, cond);
    return b;
  }

  // The aci event commits in a context of p, after the reads feeding its
  // condition are initialized; ctrl[p] keeps the latest such context.
  void control(Block& b, int p, const Expr& cond) {
    Expr ctrl = cell(AuxLayout::ctrl, {c(p)});
    b.push_back(set(lcell(AuxLayout::ctrl, {c(p)}), add(ctrl, Expr::choose(0, k_ - 1))));
    b.push_back(need(le(ctrl, c(k_))));
    b.push_back(need(eq(cell(AuxLayout::active, {ctrl}), c(p))));
    for (const auto& r : registers_of(cond))
      b.push_back(need(ge(ctrl, ireg(r))));
  }

  Expr ireg(const std::string& r) const {
    return cell(AuxLayout::ireg, {c(out_.layout.reg_index(r))});
  }
  Expr creg(const std::string& r) const {
    return cell(AuxLayout::creg, {c(out_.layout.reg_index(r))});
  }

  Expr value(const Expr& e) const {
    if (e.kind == ExprKind::Const)
      return c(reduce(e.value, domain_));
    return Expr::binary(BinOp::Mod, e, c(domain_));
  }

  void write(Block& b, int p, const Stmt& s) {
    int x = src_.var_index(s.var);
    std::vector<Expr> px{c(p), c(x)};
    Expr iw = cell(AuxLayout::iwrite, px), cw = cell(AuxLayout::cwrite, px);
    Expr old_cw = Expr::reg(tmp_("old_cw"));
    auto ntst = [&](int q) { return Expr::reg(tmp_("ntst." + std::to_string(q))); };
    auto regs = registers_of(s.expr);

    // Guess
    b.push_back(set(lcell(AuxLayout::iwrite, px), Expr::choose(1, k_)));
    b.push_back(set(lreg(tmp_("old_cw")), cw));
    b.push_back(set(lcell(AuxLayout::cwrite, px), Expr::choose(1, k_)));
    for (int q = 0; q < P(); ++q)
      b.push_back(set(lreg(tmp_("ntst." + std::to_string(q))), Expr::choose(0, k_)));

    // Check
    b.push_back(need(ge(iw, cell(AuxLayout::ccontext))));
    b.push_back(need(eq(cell(AuxLayout::active, {iw}), c(p))));
    for (const auto& r : regs)
      b.push_back(need(ge(iw, ireg(r))));
    b.push_back(need(ge(cw, iw)));
    for (const auto& r : regs)
      b.push_back(need(ge(cw, creg(r))));
    b.push_back(need(ge(cw, cell(AuxLayout::ctrl, {c(p)}))));
    b.push_back(need(ge(cw, cell(AuxLayout::cread, px))));
    b.push_back(need(ge(cw, old_cw)));
    for (int q = 0; q < P(); ++q) {
      if (q == p)
        b.push_back(need(eq(ntst(q), cw)));
      else
        b.push_back(need(lor(eq(ntst(q), c(0)), ge(ntst(q), cw))));
      Block coherent;
      for (int r = 0; r < P(); ++r) {
        Expr u = cell(AuxLayout::utst, {c(q), c(x), ntst(q), c(r)});
        coherent.push_back(need(lor(lor(eq(u, c(0)), eq(ntst(r), c(0))), le(u, ntst(r)))));
      }
      coherent.push_back(need(eq(cell(AuxLayout::active, {ntst(q)}), c(p))));
      b.push_back(AtomicStmt::when(ne(ntst(q), c(0)), std::move(coherent)));
    }

    // Update
    for (int q = 0; q < P(); ++q) {
      Block upd;
      for (int r = 0; r < P(); ++r)
        upd.push_back(AtomicStmt::when(
            ne(ntst(r), c(0)),
            {set(lcell(AuxLayout::utst, {c(q), c(x), ntst(q), c(r)}), ntst(r))}));
      upd.push_back(set(lcell(AuxLayout::cval, {c(q), c(x), ntst(q)}), value(s.expr)));
      b.push_back(AtomicStmt::when(ne(ntst(q), c(0)), std::move(upd)));
    }
    b.push_back(set(lcell(AuxLayout::lval, px), value(s.expr)));
  }

  void read(Block& b, int p, const Stmt& s) {
    int x = src_.var_index(s.var);
    int ri = out_.layout.reg_index(s.reg);
    std::vector<Expr> px{c(p), c(x)};
    Expr ir = cell(AuxLayout::iread, px), cr = cell(AuxLayout::cread, px);
    Expr cw = cell(AuxLayout::cwrite, px);

    // Guess
    b.push_back(set(lreg(tmp_("old_ir")), ir));
    b.push_back(set(lcell(AuxLayout::iread, px), Expr::choose(1, k_)));
    b.push_back(set(lcell(AuxLayout::ireg, {c(ri)}), ir));
    b.push_back(set(lreg(tmp_("old_cr")), cr));
    b.push_back(set(lcell(AuxLayout::cread, px), Expr::choose(1, k_)));
    b.push_back(set(lcell(AuxLayout::creg, {c(ri)}), cr));

    // Check
    b.push_back(need(ge(ir, cell(AuxLayout::ccontext))));
    b.push_back(need(eq(cell(AuxLayout::active, {ir}), c(p))));
    b.push_back(need(ge(ir, cell(AuxLayout::iwrite, px))));
    b.push_back(need(lor(lt(ir, cw), ge(ir, cell(AuxLayout::utst,
                                                  {c(p), c(x), Expr::reg(tmp_("old_ir")),
                                                   c(p)})))));
    b.push_back(need(ge(cr, ir)));
    b.push_back(need(eq(cell(AuxLayout::active, {cr}), c(p))));
    b.push_back(need(ge(cr, cell(AuxLayout::ctrl, {c(p)}))));
    b.push_back(need(ge(cr, Expr::reg(tmp_("old_cr")))));
    b.push_back(need(ge(cr, cw)));

    // Update: local read of the uncommitted own write, or the value
    // propagated to p in the initializing context.
    b.push_back(AtomicStmt::when(lt(ir, cw), {set(lreg(s.reg), cell(AuxLayout::lval, px))},
                                 {set(lreg(s.reg), cell(AuxLayout::cval, {c(p), c(x), ir}))}));
  }

  void count(const Block& b) {
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
      if (e.kind == ExprKind::Choose)
        ++out_.stats.choose_sites;
      for (const auto& a : e.args)
        walk(a);
    };
    for (const auto& s : b) {
      ++out_.stats.output_atomic_stmts;
      if (s.kind == AtomicKind::Constrain)
        ++out_.stats.constrain_sites;
      walk(s.expr);
      for (const auto& i : s.target.indices)
        walk(i);
      count(s.then_body);
      count(s.else_body);
    }
  }

  const Program& src_;
  int k_;
  std::vector<std::string> targets_;
  int domain_;
  ExtendedProgram out_;
  std::function<std::string(const std::string&)> tmp_;
};

} // namespace

ExtendedProgram translate_program(const Program& p, int k,
                                  const std::vector<std::string>& targets, int domain) {
  if (k < 1)
    throw std::invalid_argument("context bound must be at least 1");
  if (domain < 1)
    throw std::invalid_argument("domain must be positive");
  auto report = validate_program(p);
  if (!report.ok())
    throw std::invalid_argument("invalid program: " + report.findings.front().message);
  if (targets.empty())
    throw std::invalid_argument("no target label");
  for (const auto& t : targets) {
    bool found = false;
    for (const auto& pr : p.procs)
      for_each_instr(pr.body, [&](const Instr& i) { found = found || i.label == t; });
    if (!found)
      throw std::invalid_argument("unknown target label '" + t + "'");
  }
  return Translator(p, k, targets, domain).run();
}

} // namespace p2sc
