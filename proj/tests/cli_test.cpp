#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "p2sc/cli.hpp"
#include "p2sc/parser.hpp"
#include "p2sc/validate.hpp"
#include "program_gen.hpp"

using namespace p2sc;
using namespace p2sc::cli;

namespace {

std::string litmus(const std::string& name) { return std::string(P2SC_LITMUS_DIR) + "/" + name; }

CheckRequest request(const std::string& file, Mode mode, int k) {
  CheckRequest r;
  r.input = litmus(file);
  r.mode = mode;
  r.k = k;
  r.targets = {"7"};
  return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
  std::string path = testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

int count_lines(const std::string& text, const std::regex& re) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);)
    n += std::regex_search(line, re);
  return n;
}

} // namespace

TEST(Check, MessagePassingVerdicts) {
  auto r = cmd_check(request("mp.prog", Mode::PowerTranslate, 4));
  ASSERT_TRUE(r.diagnostics.empty());
  EXPECT_TRUE(r.results.at(0).reachable);
  EXPECT_EQ(exit_code(r), 1);

  for (int k = 1; k <= 8; ++k) {
    auto s = cmd_check(request("mp.prog", Mode::Sc, k));
    EXPECT_FALSE(s.results.at(0).reachable) << k;
    EXPECT_EQ(exit_code(s), 0);
  }

  auto o = cmd_check(request("mp.prog", Mode::PowerOracle, 1));
  EXPECT_FALSE(o.results.at(0).reachable);
  EXPECT_EQ(exit_code(o), 0);
}

TEST(Check, JsonReport) {
  auto r = cmd_check(request("mp.prog", Mode::PowerOracle, 4));
  auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["mode"], "power-oracle");
  EXPECT_EQ(j["k"], 4);
  EXPECT_EQ(j["targets"], nlohmann::json::array({"7"}));
  EXPECT_EQ(j["exitCode"], 1);
  ASSERT_EQ(j["results"].size(), 1u);
  EXPECT_TRUE(j["results"][0]["reachable"]);
  EXPECT_TRUE(j["results"][0]["witness"].is_array());
  EXPECT_TRUE(j["diagnostics"].empty());
}

TEST(Check, ErrorsBecomeDiagnostics) {
  CheckRequest r = request("mp.prog", Mode::PowerOracle, 2);
  r.input = testing::TempDir() + "does-not-exist.prog";
  auto io = cmd_check(r);
  EXPECT_EQ(exit_code(io), 10);

  r.input = temp_file("syntax.prog", "var x;\nproc p reg r;\n  0: r := ;\n");
  auto parse = cmd_check(r);
  ASSERT_EQ(parse.diagnostics.size(), 1u);
  EXPECT_EQ(exit_code(parse), 11);
  EXPECT_EQ(parse.diagnostics[0].line, 3);
  EXPECT_EQ(parse.diagnostics[0].column, 11);

  r.input = temp_file("shared.prog", "var x;\nproc p reg r; 0: r := x; 1: terminated;\n"
                                     "proc q reg r; 2: r := x; 3: terminated;\n");
  auto invalid = cmd_check(r);
  ASSERT_FALSE(invalid.diagnostics.empty());
  EXPECT_EQ(exit_code(invalid), 12);

  r = request("mp.prog", Mode::PowerOracle, 0);
  EXPECT_EQ(exit_code(cmd_check(r)), 13);
  r.k = 2;
  r.targets = {"99"};
  EXPECT_EQ(exit_code(cmd_check(r)), 13);
}

TEST(Check, ExitCodeIsAFunctionOfTheReport) {
  Report r;
  r.results.push_back({"sc", false, false, "", "", 0});
  EXPECT_EQ(exit_code(r), 0);
  r.results[0].bounded_out = true;
  EXPECT_EQ(exit_code(r), 2);
  r.results[0].reachable = true;
  EXPECT_EQ(exit_code(r), 1);
  r.diff = DiffStatus::Fail;
  EXPECT_EQ(exit_code(r), 3);
  r.diff = DiffStatus::Inconclusive;
  EXPECT_EQ(exit_code(r), 2);
  r.diagnostics.push_back({ErrorKind::Parse, "x", 1, 1, ""});
  EXPECT_EQ(exit_code(r), 11);
}

TEST(Diff, MessagePassing) {
  Program mp = load_program(litmus("mp.prog"));
  Bounds b;
  for (int k : {1, 4}) {
    auto r = diff_program(mp, k, {"7"}, b);
    EXPECT_EQ(r.diff, DiffStatus::Pass) << k;
    EXPECT_EQ(r.results.at(0).reachable, k == 4);
    EXPECT_EQ(r.results.at(1).reachable, k == 4);
  }
}

TEST(Diff, BoundedOutIsInconclusive) {
  Program mp = load_program(litmus("mp.prog"));
  Bounds b;
  b.oracle.max_events_per_process = 2;
  auto r = diff_program(mp, 4, {"7"}, b);
  EXPECT_EQ(r.diff, DiffStatus::Inconclusive);
  EXPECT_EQ(exit_code(r), 2);
}

TEST(Diff, GeneratedCorpus) {
  testgen::GenOptions opt;
  opt.max_total_instrs = 8;
  testgen::ProgramGen gen(2024, opt);
  Bounds b;
  b.oracle.max_events_per_process = 6;
  for (int i = 0; i < 10; ++i) {
    Program p = gen.next();
    std::string t = gen.pick_target(p);
    for (int k = 1; k <= 4; ++k) {
      auto r = diff_program(p, k, {t}, b);
      EXPECT_EQ(r.diff, DiffStatus::Pass) << "k=" << k << "\n"
                                          << print_program(p) << report_to_text(r);
    }
  }
}

TEST(Export, MessagePassing) {
  Program mp = load_program(litmus("mp.prog"));
  auto ep = translate_program(mp, 4, {"7"});
  std::string c = export_c(ep, 4);
  EXPECT_EQ(c, export_c(translate_program(mp, 4, {"7"}), 4));

  // Source processes, the initializing and the verifying process.
  EXPECT_EQ(count_lines(c, std::regex(R"(^void \*thread_\w+\(void \*arg\) \{$)")), 4);
  EXPECT_EQ(count_lines(c, std::regex(R"(^\s*assert\(0\);)")), 1);
  EXPECT_EQ(count_lines(c, std::regex(R"(^\s*CONSTRAIN\()")), ep.stats.constrain_sites);

  int begins = count_lines(c, std::regex(R"(^\s*ATOMIC_BEGIN\(\);)"));
  EXPECT_EQ(begins, count_lines(c, std::regex(R"(^\s*ATOMIC_END\(\);)")));
  int atomic_instrs = 0;
  for (const auto& proc : ep.program.procs)
    for_each_instr(proc.body, [&](const Instr& in) { atomic_instrs += in.atomic; });
  EXPECT_EQ(begins, atomic_instrs);
}

TEST(Export, ConstrainCountOnGeneratedPrograms) {
  testgen::ProgramGen gen(77);
  for (int i = 0; i < 50; ++i) {
    Program p = gen.next();
    std::string t = gen.pick_target(p);
    for (int k = 1; k <= 4; ++k) {
      auto ep = translate_program(p, k, {t});
      std::string c = export_c(ep, 4);
      int constrains = 0;
      for (const auto& proc : ep.program.procs)
        for_each_instr(proc.body, [&](const Instr& in) {
          std::function<void(const std::vector<AtomicStmt>&)> walk =
              [&](const std::vector<AtomicStmt>& b) {
                for (const auto& st : b) {
                  constrains += st.kind == AtomicKind::Constrain;
                  walk(st.then_body);
                  walk(st.else_body);
                }
              };
          walk(in.prelude);
        });
      EXPECT_EQ(constrains, ep.stats.constrain_sites);
      EXPECT_EQ(count_lines(c, std::regex(R"(^\s*CONSTRAIN\()")), constrains);
    }
  }
}

TEST(Tool, ExitStatus) {
  std::string tool = P2SC_TOOL;
  auto run = [&](const std::string& args) {
    int status = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("check " + litmus("mp.prog") + " --mode power-translate -k 4 --target 7"), 1);
  EXPECT_EQ(run("check " + litmus("mp.prog") + " --mode sc -k 8 --target 7"), 0);
  EXPECT_EQ(run("check " + litmus("mp.prog") + " --mode power-oracle -k 1 --target 7 --json"), 0);
  EXPECT_EQ(run("diff " + litmus("mp.prog") + " -k 4 --target 7"), 0);
  EXPECT_EQ(run("check missing.prog --target 7"), 10);
  EXPECT_EQ(run("check " + litmus("mp.prog") + " --target 99"), 13);
  EXPECT_EQ(run("check --no-such-flag"), 13);

  std::string out = testing::TempDir() + "mp.c";
  EXPECT_EQ(run("export " + litmus("mp.prog") + " -k 2 --target 7 -o " + out), 0);
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), export_c(translate_program(load_program(litmus("mp.prog")), 2, {"7"}), 4));
}
