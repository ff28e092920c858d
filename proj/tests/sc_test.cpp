#include <gtest/gtest.h>
#include <json.hpp>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "p2sc/cfg.hpp"
#include "p2sc/eval.hpp"
#include "p2sc/parser.hpp"
#include "p2sc/sc.hpp"
#include "p2sc/translate.hpp"
#include "p2sc/validate.hpp"
#include "program_gen.hpp"

using namespace p2sc;
using namespace p2sc::sc;
using p2sc::testgen::load_litmus;

namespace {

// Eager reference interpreter: every `choose` is expanded into all of its
// values and the bounded state space is searched breadth-first.
class EagerSc {
public:
  EagerSc(const Program& p, int domain) : flat_(p), domain_(domain) {}

  bool reachable(const std::vector<std::string>& targets, int k) {
    std::vector<std::pair<int, int>> tl;
    for (const auto& t : targets)
      tl.push_back(*flat_.find(t));
    struct Node {
      St st;
      int cur, ctx;
    };
    std::deque<Node> queue{{initial(), -1, 0}};
    std::set<std::string> seen;
    while (!queue.empty()) {
      Node n = std::move(queue.front());
      queue.pop_front();
      for (const auto& [p, i] : tl)
        if (n.st.pc[p] == i)
          return true;
      if (!seen.insert(key(n)).second)
        continue;
      for (int p = 0; p < static_cast<int>(n.st.pc.size()); ++p) {
        if (n.st.pc[p] < 0)
          continue;
        const FlatInstr& fi = flat_.at(p, n.st.pc[p]);
        if (fi.instr->stmt.kind == StmtKind::Terminated && fi.instr->prelude.empty())
          continue;
        int ctx = p == n.cur ? n.ctx : n.ctx + 1;
        if (ctx > k)
          continue;
        for (auto& next : step(n.st, p))
          queue.push_back({std::move(next), p, ctx});
      }
    }
    return false;
  }

private:
  struct St {
    std::vector<int> pc;
    std::map<std::string, std::vector<Value>> mem;
    std::map<std::string, Value> regs; // "proc.reg"
  };

  FlatProgram flat_;
  int domain_;

  St initial() const {
    St s;
    s.pc.assign(flat_.procs().size(), 0);
    for (const auto& v : flat_.program().vars) {
      std::size_t n = 1;
      for (int d : v.dims)
        n *= d;
      s.mem[v.name].assign(n, 0);
    }
    return s;
  }

  static std::string key(const auto& n) {
    std::string k;
    for (int pc : n.st.pc)
      k += std::to_string(pc) + ",";
    for (const auto& [name, vals] : n.st.mem)
      for (Value v : vals)
        k += std::to_string(v) + ",";
    for (const auto& [name, v] : n.st.regs)
      k += name + "=" + std::to_string(v) + ",";
    return k + "|" + std::to_string(n.cur) + "|" + std::to_string(n.ctx);
  }

  std::string reg_name(int p, const std::string& r) const {
    return flat_.program().procs[p].name + "." + r;
  }

  std::size_t offset(const std::string& var, const std::vector<Value>& idx) const {
    const auto& decl = flat_.program().vars[flat_.program().var_index(var)];
    std::size_t off = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      off = off * decl.dims[i] + static_cast<std::size_t>(idx[i]);
    return off;
  }

  // All values of an expression, one per combination of choose values.
  std::vector<Value> eval(const Expr& e, const St& s, int p) const {
    switch (e.kind) {
    case ExprKind::Const:
      return {e.value};
    case ExprKind::Reg: {
      auto it = s.regs.find(reg_name(p, e.name));
      return {it == s.regs.end() ? 0 : it->second};
    }
    case ExprKind::Var: {
      std::vector<std::vector<Value>> idxs{{}};
      for (const auto& a : e.args) {
        std::vector<std::vector<Value>> next;
        for (const auto& prefix : idxs)
          for (Value v : eval(a, s, p)) {
            next.push_back(prefix);
            next.back().push_back(v);
          }
        idxs = std::move(next);
      }
      std::vector<Value> out;
      for (const auto& idx : idxs)
        out.push_back(s.mem.at(e.name)[offset(e.name, idx)]);
      return out;
    }
    case ExprKind::Choose: {
      std::vector<Value> out;
      for (Value v = e.value; v <= e.hi; ++v)
        out.push_back(v);
      return out;
    }
    case ExprKind::Not: {
      std::vector<Value> out;
      for (Value v : eval(e.args[0], s, p))
        out.push_back(v == 0);
      return out;
    }
    case ExprKind::Binary: {
      std::vector<Value> out;
      for (Value a : eval(e.args[0], s, p))
        for (Value b : eval(e.args[1], s, p))
          out.push_back(apply_binop(e.op, a, b));
      return out;
    }
    }
    return {};
  }

  std::vector<St> block(const std::vector<AtomicStmt>& b, std::size_t i, St s, int p) const {
    if (i == b.size())
      return {s};
    const AtomicStmt& st = b[i];
    std::vector<St> out;
    auto rest = [&](St next) {
      for (auto& r : block(b, i + 1, std::move(next), p))
        out.push_back(std::move(r));
    };
    switch (st.kind) {
    case AtomicKind::Assign:
      for (Value v : eval(st.expr, s, p)) {
        St next = s;
        if (st.target.is_register) {
          next.regs[reg_name(p, st.target.name)] = v;
        } else {
          std::vector<Value> idx;
          for (const auto& ie : st.target.indices)
            idx.push_back(eval(ie, s, p).front());
          next.mem[st.target.name][offset(st.target.name, idx)] = v;
        }
        rest(std::move(next));
      }
      break;
    case AtomicKind::Constrain:
      if (eval(st.expr, s, p).front() != 0)
        rest(s);
      break;
    case AtomicKind::If:
      for (auto& r : block(eval(st.expr, s, p).front() ? st.then_body : st.else_body, 0, s, p))
        rest(std::move(r));
      break;
    }
    return out;
  }

  std::vector<St> step(const St& s, int p) const {
    const FlatInstr& fi = flat_.at(p, s.pc[p]);
    const Stmt& st = fi.instr->stmt;
    std::vector<St> out;
    for (St n : block(fi.instr->prelude, 0, s, p)) {
      switch (st.kind) {
      case StmtKind::Skip:
        n.pc[p] = fi.next;
        break;
      case StmtKind::Read:
        n.regs[reg_name(p, st.reg)] = n.mem.at(st.var)[0];
        n.pc[p] = fi.next;
        break;
      case StmtKind::Write:
        n.mem[st.var][0] = reduce(eval(st.expr, n, p).front(), domain_);
        n.pc[p] = fi.next;
        break;
      case StmtKind::Assume:
      case StmtKind::If:
        n.pc[p] = eval(st.expr, n, p).front() ? fi.tnext : fi.fnext;
        break;
      case StmtKind::Terminated:
        n.pc[p] = -1;
        break;
      case StmtKind::While:
        ADD_FAILURE() << "loops are not supported by the reference interpreter";
        break;
      }
      out.push_back(std::move(n));
    }
    return out;
  }
};

// Small programs in the extended dialect: atomic preludes with choose,
// constrain and branches over scalars and a short array.
class AtomicGen {
public:
  explicit AtomicGen(std::uint64_t seed) : rng_(seed) {}

  Program next() {
    std::string text = "var x, y, a[3];\n";
    label_ = 0;
    for (int p = 0; p < 2; ++p) {
      reg_ = "r" + std::to_string(p);
      text += "proc q" + std::to_string(p) + "\n  reg " + reg_ + ";\n";
      int n = pick(1, 3);
      for (int i = 0; i < n; ++i)
        text += instr();
      text += "  l" + std::to_string(label_++) + ": terminated;\n";
    }
    return parse_program(text);
  }

  std::string target(const Program& p) {
    std::vector<std::string> labels;
    for (const auto& pr : p.procs)
      for_each_instr(pr.body, [&](const Instr& i) { labels.push_back(i.label); });
    return labels[pick(0, static_cast<int>(labels.size()) - 1)];
  }

private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string var() {
    switch (pick(0, 3)) {
    case 0: return "x";
    case 1: return "y";
    case 2: return "a[" + std::to_string(pick(0, 2)) + "]";
    default: return "a[" + reg_ + " % 3]";
    }
  }

  std::string value() {
    switch (pick(0, 5)) {
    case 0: return "choose[0.." + std::to_string(pick(0, 3)) + "]";
    case 1: return reg_ + " + choose[0..1]";
    case 2: return std::to_string(pick(0, 2));
    case 3: return var();
    case 4: return "a[choose[0..2]]";
    default: return var() + " + 1";
    }
  }

  std::string cond() {
    static const char* ops[] = {"=", "!=", "<=", "<"};
    std::string c = (pick(0, 1) ? var() : reg_) + " " + ops[pick(0, 3)] + " " +
                    (pick(0, 1) ? var() : std::to_string(pick(0, 2)));
    if (pick(0, 3) == 0)
      c += " || " + var() + " = " + std::to_string(pick(0, 2));
    return c;
  }

  std::string atomic_stmt(int depth) {
    int c = pick(0, depth > 0 ? 2 : 3);
    if (c == 0)
      return var() + " := " + value() + "; ";
    if (c == 1)
      return reg_ + " := " + value() + "; ";
    if (c == 2)
      return "constrain " + cond() + "; ";
    return "if " + cond() + " then { " + atomic_stmt(1) + "} else { " + atomic_stmt(1) + "} ";
  }

  std::string instr() {
    std::string s = "  l" + std::to_string(label_++) + ": ";
    bool atomic = pick(0, 2) > 0;
    if (atomic) {
      s += "atomic { ";
      int n = pick(1, 3);
      for (int i = 0; i < n; ++i)
        s += atomic_stmt(0);
      s += "}";
    }
    switch (pick(0, atomic ? 4 : 3)) {
    case 0: return s + " x := " + reg_ + " + 1;\n";
    case 1: return s + " " + reg_ + " := y;\n";
    case 2: return s + " assume " + reg_ + " " + (pick(0, 1) ? "=" : "!=") + " " +
                   std::to_string(pick(0, 2)) + ";\n";
    case 3: return s + " y := " + std::to_string(pick(0, 3)) + ";\n";
    default: return s + ";\n";
    }
  }

  std::mt19937_64 rng_;
  int label_ = 0;
  std::string reg_;
};

} // namespace

TEST(ScPlain, MessagePassingUnreachableUpToEightContexts) {
  Program mp = load_litmus("mp.prog");
  for (int k = 1; k <= 8; ++k) {
    auto v = sc_explore(mp, {"7"}, k);
    EXPECT_FALSE(v.reachable) << "k=" << k;
    EXPECT_FALSE(v.bounded_out) << "k=" << k;
  }
}

TEST(ScPlain, InterleavingReachesLabel) {
  Program p = parse_program("var x;\n"
                            "proc a reg r; a0: x := 1; a1: terminated;\n"
                            "proc b reg s; b0: s := x; b1: assume s = 1; b2: assume 1; b3: terminated;");
  EXPECT_FALSE(sc_explore(p, {"b2"}, 1).reachable);
  auto v = sc_explore(p, {"b2"}, 2);
  ASSERT_TRUE(v.reachable);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.stats.contexts, 2);
  auto s = sc_replay(p, *v.witness);
  EXPECT_TRUE(sc_at_label(p, s, {"b2"}));
  EXPECT_EQ(sc_reg(p, s, "b", "s"), 1);
}

TEST(ScPlain, LoopUnrollingBound) {
  Program p = parse_program("var x;\n"
                            "proc a reg r; a0: while 1 do { a1: x := x + 1; } a2: terminated;");
  ExploreBounds b;
  b.unroll = 3;
  auto v = sc_explore(p, {"a2"}, 1, b);
  EXPECT_FALSE(v.reachable);
  EXPECT_TRUE(v.bounded_out);

  Program q = parse_program("var x;\n"
                            "proc a reg r; a0: r := x; a1: while r < 2 do { a2: x := r + 1; a3: r := x; }\n"
                            "  a4: assume 1; a5: terminated;");
  EXPECT_TRUE(sc_explore(q, {"a4"}, 1, b).reachable);
  b.unroll = 1;
  auto w = sc_explore(q, {"a4"}, 1, b);
  EXPECT_FALSE(w.reachable);
  EXPECT_TRUE(w.bounded_out);
}

TEST(ScAtomic, ConstrainFalsePrunes) {
  Program p = parse_program("var x;\n"
                            "proc a reg r;\n"
                            "  a0: atomic { r := choose[0..3]; constrain 0; };\n"
                            "  a1: terminated;");
  auto v = sc_explore(p, {"a1"}, 1);
  EXPECT_FALSE(v.reachable);
  EXPECT_FALSE(v.bounded_out);
  EXPECT_GE(v.stats.pruned_by_constrain, 1u);
}

TEST(ScAtomic, ChooseValuesRecordedAndReplayed) {
  Program p = parse_program("var x, y;\n"
                            "proc a reg r;\n"
                            "  a0: atomic { x := choose[0..5]; y := choose[0..5]; constrain x + y = 7;\n"
                            "               constrain x > y; };\n"
                            "  a1: assume 1;\n"
                            "  a2: terminated;");
  auto v = sc_explore(p, {"a1"}, 1);
  ASSERT_TRUE(v.reachable);
  ASSERT_EQ(v.witness->steps.size(), 1u);
  const auto& ch = v.witness->steps[0].chooses;
  ASSERT_EQ(ch.size(), 2u);
  EXPECT_EQ(ch[0] + ch[1], 7);
  EXPECT_GT(ch[0], ch[1]);
  auto s = sc_replay(p, *v.witness);
  EXPECT_EQ(sc_read(p, s, "x"), ch[0]);
  EXPECT_EQ(sc_read(p, s, "y"), ch[1]);

  Trace bad = *v.witness;
  bad.steps[0].chooses = {3, 4};
  EXPECT_THROW(sc_replay(p, bad), ReplayError);
  bad.steps[0].chooses = {5};
  EXPECT_THROW(sc_replay(p, bad), ReplayError);
  bad.steps[0].chooses = {9, 0};
  EXPECT_THROW(sc_replay(p, bad), ReplayError);
  bad = *v.witness;
  bad.steps[0].label = "a1";
  EXPECT_THROW(sc_replay(p, bad), ReplayError);
}

TEST(ScAtomic, AgreesWithEagerExploration) {
  AtomicGen gen(5);
  int reachable = 0;
  for (int i = 0; i < 300; ++i) {
    Program p = gen.next();
    ASSERT_TRUE(validate_program(p, Dialect::Translated).ok()) << print_program(p);
    std::string t = gen.target(p);
    int k = 1 + i % 3;
    bool expected = EagerSc(p, 4).reachable({t}, k);
    auto v = sc_explore(p, {t}, k);
    ASSERT_EQ(v.reachable, expected) << print_program(p) << "target " << t << " k=" << k;
    if (v.reachable) {
      ++reachable;
      auto s = sc_replay(p, *v.witness);
      EXPECT_TRUE(sc_at_label(p, s, {t}));
    }
  }
  EXPECT_GT(reachable, 30);
  EXPECT_LT(reachable, 270);
}

TEST(ScPlain, AgreesWithEagerExploration) {
  testgen::ProgramGen gen(9);
  for (int i = 0; i < 200; ++i) {
    Program p = gen.next();
    std::string t = gen.pick_target(p);
    int k = 1 + i % 4;
    auto v = sc_explore(p, {t}, k);
    ASSERT_EQ(v.reachable, EagerSc(p, 4).reachable({t}, k))
        << print_program(p) << "target " << t << " k=" << k;
  }
}

TEST(ScTranslated, MessagePassingWitnessReplays) {
  Program mp = load_litmus("mp.prog");
  auto ep = translate_program(mp, 4, {"7"});
  auto v = sc_explore(ep, 4);
  ASSERT_TRUE(v.reachable);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->steps.front().proc, kIniProc);
  EXPECT_EQ(v.witness->steps.back().proc, kVerProc);

  auto s = sc_replay(ep.program, *v.witness);
  EXPECT_TRUE(sc_at_label(ep.program, s, {ep.error_label}));
  EXPECT_EQ(sc_read(ep.program, s, "@reached", {0}), 1);
  // The relaxed outcome: the flag is seen set while the data is stale.
  EXPECT_EQ(sc_reg(ep.program, s, "p2", "r2"), 1);
  EXPECT_EQ(sc_reg(ep.program, s, "p2", "r1"), 0);
  // The translated instructions appear in program order per process.
  std::vector<std::string> p2;
  for (const auto& st : v.witness->steps)
    if (st.proc == "p2")
      p2.push_back(st.label);
  EXPECT_EQ(p2, (std::vector<std::string>{"3", "4", "5", "6", "7"}));
}

TEST(ScTranslated, SingleContextIsSequential) {
  Program mp = load_litmus("mp.prog");
  auto v = sc_explore(translate_program(mp, 1, {"7"}), 1);
  EXPECT_FALSE(v.reachable);
  EXPECT_FALSE(v.bounded_out);
}

TEST(ScTranslated, VerifierRejectsMismatchedGuess) {
  // Context 2 starts from a guessed value of x; the verifier must reject
  // runs whose guess differs from what context 1 left behind.
  Program p = parse_program("var x;\n"
                            "proc a reg r; a0: x := 1; a1: terminated;\n"
                            "proc b reg s; b0: s := x; b1: assume s = 2; b2: assume 1; b3: terminated;");
  for (int k = 1; k <= 3; ++k)
    EXPECT_FALSE(sc_explore(translate_program(p, k, {"b2"}), k).reachable) << "k=" << k;
}

TEST(ScJson, TraceAndStats) {
  Trace t;
  t.steps.push_back({"p1", "a0", {1, 2}});
  auto j = nlohmann::json::parse(trace_to_json(t));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["proc"], "p1");
  EXPECT_EQ(j[0]["label"], "a0");
  EXPECT_EQ(j[0]["chooses"], nlohmann::json::array({1, 2}));

  ScStats st;
  st.states = 3;
  st.pruned_by_constrain = 2;
  st.contexts = 1;
  auto s = nlohmann::json::parse(stats_to_json(st));
  EXPECT_EQ(s["states"], 3);
  EXPECT_EQ(s["prunedByConstrain"], 2);
  EXPECT_EQ(s["contexts"], 1);
}

TEST(ScErrors, BadArguments) {
  Program mp = load_litmus("mp.prog");
  EXPECT_THROW(sc_explore(mp, {"7"}, 0), std::invalid_argument);
  EXPECT_THROW(sc_explore(mp, {"nope"}, 1), std::invalid_argument);
}
