#include <gtest/gtest.h>
#include <json.hpp>
#include <set>

#include "p2sc/cfg.hpp"
#include "p2sc/parser.hpp"
#include "p2sc/validate.hpp"
#include "program_gen.hpp"

using namespace p2sc;
using p2sc::testgen::load_litmus;
namespace tg = p2sc::testgen;

TEST(Parse, MessagePassingProgram) {
  Program p = load_litmus("mp.prog");
  ASSERT_EQ(p.vars.size(), 2u);
  ASSERT_EQ(p.procs.size(), 2u);
  EXPECT_EQ(p.procs[0].body.size(), 3u);
  EXPECT_EQ(p.procs[1].body.size(), 6u);
  EXPECT_EQ(p.procs[1].regs, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(p.procs[1].body[0].stmt.kind, StmtKind::Read);
  EXPECT_EQ(p.procs[1].body[0].stmt.var, "y");
  EXPECT_EQ(p.procs[0].body[1].stmt.kind, StmtKind::Write);
  EXPECT_EQ(p.procs[1].body[2].stmt.kind, StmtKind::Assume);
  EXPECT_EQ(p.procs[1].body[5].label, "8");
}

TEST(Parse, MinimalProgram) {
  Program p = parse_program("var x; proc p reg; l0: terminated;");
  ASSERT_EQ(p.procs.size(), 1u);
  ASSERT_EQ(p.procs[0].body.size(), 1u);
  EXPECT_EQ(p.procs[0].body[0].stmt.kind, StmtKind::Terminated);
  EXPECT_TRUE(validate_program(p).ok());
}

TEST(Parse, DuplicateLabelAcrossProcesses) {
  try {
    parse_program("var x; proc p reg; l0: terminated; proc q reg; l0: terminated;");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("duplicate label"), std::string::npos);
  }
}

TEST(Parse, UndeclaredNames) {
  EXPECT_THROW(parse_program("var x; proc p reg; l0: z := 1; l1: terminated;"), ParseError);
  EXPECT_THROW(parse_program("var x; proc p reg r; l0: x := q + 1; l1: terminated;"),
               ParseError);
  EXPECT_THROW(parse_program("var x; proc p reg r; l0: r := r; l1: terminated;"), ParseError);
}

TEST(Parse, ErrorPosition) {
  try {
    parse_program("var x;\nproc p reg;\n  l0: x := ;\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 12);
  }
}

TEST(Parse, OperatorPrecedence) {
  Program p = parse_program("var x; proc p reg a, b; l0: x := a + b * 2 = 3 || !a && b; "
                            "l1: terminated;");
  const Expr& e = p.procs[0].body[0].stmt.expr;
  ASSERT_EQ(e.op, BinOp::Or);
  EXPECT_EQ(e.args[0].op, BinOp::Eq);
  EXPECT_EQ(e.args[0].args[0].op, BinOp::Add);
  EXPECT_EQ(e.args[0].args[0].args[1].op, BinOp::Mul);
  EXPECT_EQ(e.args[1].op, BinOp::And);
  EXPECT_EQ(e.args[1].args[0].kind, ExprKind::Not);
}

TEST(Parse, TranslatedConstructs) {
  Program p = parse_program(R"(var c[2][3], k;
proc @ini reg t;
  @a: atomic {
    c[1][k + 1] := choose[0..3];
    t := c[1][2];
    constrain t <= 3;
    if t = 0 then { k := 1; } else { k := 2; }
  };
  @b: terminated;
)");
  EXPECT_FALSE(validate_program(p).ok());
  EXPECT_TRUE(validate_program(p, Dialect::Translated).ok())
      << report_to_json(validate_program(p, Dialect::Translated));
  EXPECT_EQ(parse_program(print_program(p)), p);
}

TEST(Validate, MessagePassingIsWellFormed) {
  EXPECT_TRUE(validate_program(load_litmus("mp.prog")).ok());
}

TEST(Validate, SharedRegister) {
  Program p = parse_program("var x; proc p reg r1; a: r1 := x; b: terminated; "
                            "proc q reg r1; c: r1 := x; d: terminated;");
  auto r = validate_program(p);
  EXPECT_TRUE(r.has("shared-register"));
  EXPECT_EQ(r.findings.size(), 1u);
}

TEST(Validate, TwoTerminatedStatements) {
  Program p = parse_program("var x; proc p reg; a: terminated; b: terminated;");
  EXPECT_TRUE(validate_program(p).has("terminated-count"));
  Program q = parse_program("var x; proc p reg; a: x := 1;");
  EXPECT_TRUE(validate_program(q).has("terminated-count"));
}

TEST(Validate, ExpressionsCannotReadMemory) {
  Program p;
  p.vars.push_back({"x", {}});
  Process pr;
  pr.name = "p";
  pr.body.push_back(make_write("a", "x", Expr::var("x")));
  pr.body.push_back(make_terminated("b"));
  p.procs.push_back(pr);
  auto r = validate_program(p);
  ASSERT_TRUE(r.has("expr-mentions-variable"));
  EXPECT_EQ(r.findings[0].label, "a");
}

TEST(Validate, DuplicateLabelInBuiltAst) {
  Program p;
  p.vars.push_back({"x", {}});
  Process pr;
  pr.name = "p";
  pr.body.push_back(make_write("a", "x", Expr::constant(1)));
  pr.body.push_back(make_terminated("a"));
  p.procs.push_back(pr);
  EXPECT_TRUE(validate_program(p).has("duplicate-label"));
}

TEST(Validate, JsonReport) {
  Program p = parse_program("var x; proc p reg; a: terminated; b: terminated;");
  auto j = nlohmann::json::parse(report_to_json(validate_program(p)));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["code"], "terminated-count");
  EXPECT_TRUE(j[0].contains("message"));
  EXPECT_TRUE(j[0].contains("label"));
}

TEST(Successors, MessagePassingAssume) {
  auto m = successor_map(load_litmus("mp.prog"));
  EXPECT_EQ(m.tnext.at("5"), "6");
  EXPECT_EQ(m.fnext.at("5"), "8");
  EXPECT_TRUE(m.next.at("8").empty());
  EXPECT_EQ(m.next.at("0"), (std::vector<std::string>{"1"}));
  EXPECT_EQ(m.next.at("5").size(), 2u);
}

TEST(Successors, IfAndWhile) {
  Program p = parse_program(R"(var x;
proc p reg r;
  a: r := x;
  b: if r = 1 then { c: x := 1; } else { }
  d: while r < 2 do { e: r := x; }
  f: terminated;
)");
  auto m = successor_map(p);
  EXPECT_EQ(m.tnext.at("b"), "c");
  EXPECT_EQ(m.fnext.at("b"), "d");
  EXPECT_EQ(m.next.at("c"), (std::vector<std::string>{"d"}));
  EXPECT_EQ(m.tnext.at("d"), "e");
  EXPECT_EQ(m.fnext.at("d"), "f");
  EXPECT_EQ(m.next.at("e"), (std::vector<std::string>{"d"}));
}

// Round trip and successor-shape properties over generated programs.
TEST(Property, PrintParseRoundTripAndSuccessorShape) {
  tg::GenOptions opt;
  opt.allow_while = true;
  opt.max_instrs_per_proc = 6;
  opt.max_total_instrs = 16;
  tg::ProgramGen gen(7, opt);
  for (int n = 0; n < 500; ++n) {
    Program p = gen.next();
    ASSERT_TRUE(validate_program(p).ok()) << print_program(p);
    std::string text = print_program(p);
    Program q = parse_program(text);
    ASSERT_EQ(q, p) << text;
    EXPECT_EQ(print_program(q), text);

    auto m = successor_map(p);
    std::set<std::string> labels;
    for (const auto& pr : p.procs)
      for_each_instr(pr.body, [&](const Instr& i) { labels.insert(i.label); });
    for (const auto& pr : p.procs)
      for_each_instr(pr.body, [&](const Instr& i) {
        const auto& nx = m.next.at(i.label);
        if (i.stmt.kind == StmtKind::Terminated)
          EXPECT_TRUE(nx.empty());
        else if (is_aci(i.stmt.kind))
          EXPECT_EQ(nx.size(), 2u);
        else
          EXPECT_EQ(nx.size(), 1u);
        for (const auto& s : nx)
          EXPECT_TRUE(labels.count(s)) << s;
      });
  }
}
