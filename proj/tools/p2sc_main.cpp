#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "p2sc/cli.hpp"
#include "p2sc/parser.hpp"
#include "p2sc/validate.hpp"

using namespace p2sc;

namespace {

struct Options {
  cli::CheckRequest req;
  std::string mode = "power-translate";
  bool json = false;
  std::string output;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("input", o.req.input, "Program file (native or extended format)")->required();
  cmd->add_option("-k,--contexts", o.req.k, "Context bound")->capture_default_str();
  cmd->add_option("--target", o.req.targets, "Target label (repeatable)")->required();
  cmd->add_option("--domain", o.req.bounds.domain, "Number of data values")->capture_default_str();
  cmd->add_option("-o,--output", o.output, "Write the output to this file instead of stdout");
}

void add_bounds(CLI::App* cmd, Options& o) {
  cmd->add_option("--unroll", o.req.bounds.explore.unroll, "Loop unrolling bound of the SC engine")
      ->capture_default_str();
  cmd->add_option("--max-trace", o.req.bounds.explore.max_trace, "SC search depth limit")
      ->capture_default_str();
  cmd->add_option("--max-events", o.req.bounds.oracle.max_events_per_process,
                  "POWER oracle: events fetched per process")
      ->capture_default_str();
  cmd->add_option("--max-run", o.req.bounds.oracle.max_run_length, "POWER oracle: run length limit")
      ->capture_default_str();
  cmd->add_flag("--json", o.json, "Print the report as JSON");
}

int emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(o.output);
  if (!(out << text)) {
    std::cerr << "error: cannot write " << o.output << "\n";
    return static_cast<int>(cli::ErrorKind::Io);
  }
  return 0;
}

int report(const Options& o, const cli::Report& r) {
  std::string text = o.json ? cli::report_to_json(r) + "\n" : cli::report_to_text(r);
  if (!o.json && !r.diagnostics.empty()) {
    std::cerr << text;
    return cli::exit_code(r);
  }
  int io = emit(o, text);
  return io ? io : cli::exit_code(r);
}

int run_export(const Options& o) {
  cli::Report r;
  r.command = "export";
  r.input = o.req.input;
  r.k = o.req.k;
  r.targets = o.req.targets;
  auto fail = [&](cli::ErrorKind kind, const std::string& msg, int line = 0, int col = 0) {
    r.diagnostics.push_back({kind, msg, line, col, ""});
    std::cerr << cli::report_to_text(r);
    return cli::exit_code(r);
  };
  Program p;
  try {
    p = cli::load_program(o.req.input);
  } catch (const ParseError& e) {
    return fail(cli::ErrorKind::Parse, e.message(), e.line(), e.column());
  } catch (const std::exception& e) {
    return fail(cli::ErrorKind::Io, e.what());
  }
  auto rep = validate_program(p);
  if (!rep.ok()) {
    for (const auto& f : rep.findings)
      r.diagnostics.push_back({cli::ErrorKind::Validation, f.code + ": " + f.message, 0, 0, f.label});
    std::cerr << cli::report_to_text(r);
    return cli::exit_code(r);
  }
  try {
    auto ep = translate_program(p, o.req.k, o.req.targets, o.req.bounds.domain);
    return emit(o, cli::export_c(ep, o.req.bounds.domain));
  } catch (const std::invalid_argument& e) {
    return fail(cli::ErrorKind::Usage, e.what());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-bounded POWER reachability by translation to SC"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "Decide reachability of target labels");
  add_common(check, o);
  add_bounds(check, o);
  check->add_option("--mode", o.mode, "power-translate, power-oracle, sc or diff")
      ->check(CLI::IsMember({"power-translate", "power-oracle", "sc", "diff"}))
      ->capture_default_str();

  auto* diff = app.add_subcommand("diff", "Compare the POWER oracle with the translated program");
  add_common(diff, o);
  add_bounds(diff, o);

  auto* exp = app.add_subcommand("export", "Print the translated program as C-like source");
  add_common(exp, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(cli::ErrorKind::Usage);
  }

  if (*exp)
    return run_export(o);
  o.req.mode = *diff ? cli::Mode::Diff : *cli::parse_mode(o.mode);
  return report(o, cli::cmd_check(o.req));
}
