#pragma once

// Random program generators shared by the property and equivalence tests.

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "p2sc/ast.hpp"
#include "p2sc/parser.hpp"

namespace p2sc::testgen {

inline Program load_litmus(const std::string& name) {
  std::ifstream in(std::string(P2SC_LITMUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

struct GenOptions {
  int max_procs = 3;
  int max_vars = 2;
  int max_instrs_per_proc = 4; // excluding terminated
  int max_total_instrs = 10;   // including terminated
  bool allow_if = true;
  bool allow_while = false;
  int max_const = 2;
};

class ProgramGen {
public:
  ProgramGen(std::uint64_t seed, GenOptions opt = {}) : rng_(seed), opt_(opt) {}

  Program next() {
    Program p;
    label_ = 0;
    int nvars = pick(1, opt_.max_vars);
    for (int v = 0; v < nvars; ++v)
      p.vars.push_back({std::string(1, static_cast<char>('x' + v)), {}});
    int nprocs = pick(1, opt_.max_procs);
    int budget = opt_.max_total_instrs - nprocs; // terminated instructions
    int reg_counter = 0;
    for (int k = 0; k < nprocs; ++k) {
      Process pr;
      pr.name = "p" + std::to_string(k + 1);
      int nregs = pick(1, 2);
      for (int r = 0; r < nregs; ++r)
        pr.regs.push_back("r" + std::to_string(++reg_counter));
      int left = nprocs - k - 1;
      int share = std::max(1, std::min(opt_.max_instrs_per_proc, budget - left));
      int n = pick(1, share);
      budget -= n;
      regs_ = pr.regs;
      vars_ = &p.vars;
      pr.body = block(n, 0);
      pr.body.push_back(make_terminated(fresh()));
      p.procs.push_back(std::move(pr));
    }
    return p;
  }

  /// Non-terminated label chosen uniformly.
  std::string pick_target(const Program& p) {
    std::vector<std::string> labels;
    for (const auto& pr : p.procs)
      for_each_instr(pr.body, [&](const Instr& i) {
        if (i.stmt.kind != StmtKind::Terminated)
          labels.push_back(i.label);
      });
    return labels[pick(0, static_cast<int>(labels.size()) - 1)];
  }

  Expr expr(int depth) {
    int c = pick(0, depth > 1 ? 2 : 5);
    if (c == 0 || depth > 2)
      return pick(0, 1) ? Expr::constant(pick(0, opt_.max_const)) : reg_expr();
    if (c == 1)
      return Expr::negate(expr(depth + 1));
    static constexpr BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq,
                                    BinOp::Ne,  BinOp::Lt,  BinOp::Le,  BinOp::And,
                                    BinOp::Or};
    return Expr::binary(ops[pick(0, 8)], expr(depth + 1), expr(depth + 1));
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
  std::string fresh() { return "l" + std::to_string(label_++); }

  Expr reg_expr() { return Expr::reg(regs_[pick(0, static_cast<int>(regs_.size()) - 1)]); }

  // A simple comparison, the shape litmus-style programs use.
  Expr cond() {
    if (pick(0, 3) == 0)
      return expr(1);
    return Expr::binary(pick(0, 1) ? BinOp::Eq : BinOp::Ne, reg_expr(),
                        Expr::constant(pick(0, 1)));
  }

  std::string var() { return (*vars_)[pick(0, static_cast<int>(vars_->size()) - 1)].name; }

  std::vector<Instr> block(int n, int depth) {
    std::vector<Instr> out;
    while (n > 0) {
      int c = pick(0, 9);
      if (c < 4) {
        out.push_back(make_write(fresh(), var(),
                                 pick(0, 2) ? Expr::constant(pick(1, opt_.max_const))
                                            : expr(2)));
      } else if (c < 7) {
        out.push_back(make_read(fresh(), regs_[pick(0, static_cast<int>(regs_.size()) - 1)],
                                var()));
      } else if (c < 9 || depth > 0 || n < 3 || (!opt_.allow_if && !opt_.allow_while)) {
        out.push_back(make_assume(fresh(), cond()));
      } else if (opt_.allow_while && (!opt_.allow_if || pick(0, 1))) {
        std::string l = fresh();
        int inner = pick(1, n - 1);
        out.push_back(make_while(l, cond(), block(inner, depth + 1)));
        n -= inner;
      } else {
        std::string l = fresh();
        int inner = n - 1;
        int a = pick(0, inner);
        auto th = block(a, depth + 1);
        auto el = block(inner - a, depth + 1);
        out.push_back(make_if(l, cond(), std::move(th), std::move(el)));
        n -= inner;
      }
      --n;
    }
    return out;
  }

  std::mt19937_64 rng_;
  GenOptions opt_;
  int label_ = 0;
  std::vector<std::string> regs_;
  const std::vector<VarDecl>* vars_ = nullptr;
};

} // namespace p2sc::testgen
