#pragma once

#include <optional>
#include <string>
#include <vector>

#include "p2sc/ast.hpp"
#include "p2sc/power.hpp"
#include "p2sc/sc.hpp"
#include "p2sc/translate.hpp"

namespace p2sc::cli {

enum class Mode { PowerTranslate, PowerOracle, Sc, Diff };

const char* mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct Bounds {
  sc::ExploreBounds explore;
  power::OracleBounds oracle;
  int domain = 4; // overrides explore.domain
};

struct CheckRequest {
  std::string input;
  Mode mode = Mode::PowerTranslate;
  int k = 2;
  std::vector<std::string> targets;
  Bounds bounds;
};

/// Error classes; the value is the process exit status.
enum class ErrorKind { Io = 10, Parse = 11, Validation = 12, Usage = 13, Internal = 14 };

struct Diagnostic {
  ErrorKind kind = ErrorKind::Internal;
  std::string message;
  int line = 0; // 1-based, 0 when unknown
  int column = 0;
  std::string label; // offending instruction, if any
};

struct EngineResult {
  std::string engine; // power-oracle, power-translate or sc
  bool reachable = false;
  bool bounded_out = false;
  std::string witness_json; // empty without a witness
  std::string stats_json;
  double seconds = 0;
};

enum class DiffStatus { Pass, Fail, Inconclusive };

struct Report {
  std::string command; // check or diff
  std::string input;
  std::optional<Mode> mode;
  int k = 0;
  std::vector<std::string> targets;
  std::vector<EngineResult> results;
  std::optional<DiffStatus> diff;
  std::vector<Diagnostic> diagnostics;
};

/// 1 when a target is reachable, 0 when not, 2 when the search hit a bound
/// without a witness. diff: 0 PASS, 2 INCONCLUSIVE, 3 FAIL. Errors: the
/// ErrorKind of the first diagnostic.
int exit_code(const Report& r);

const char* diff_status_name(DiffStatus s);

/// Versioned JSON document ("schema": 1).
std::string report_to_json(const Report& r);
std::string report_to_text(const Report& r);

/// Runs one engine on an already validated source program. Mode::Diff
/// runs both paths as diff_program does. Engine errors propagate.
Report check_program(const Program& p, Mode mode, int k, const std::vector<std::string>& targets,
                     const Bounds& b);

/// Runs the POWER oracle and the translated program under SC and compares
/// the verdicts. A bounded-out search on either side is INCONCLUSIVE.
Report diff_program(const Program& p, int k, const std::vector<std::string>& targets,
                    const Bounds& b);

/// Loads, validates and checks. Never throws: failures become diagnostics.
Report cmd_check(const CheckRequest& req);

/// Reads and parses a program file; throws ParseError or std::runtime_error.
Program load_program(const std::string& path);

/// C-like rendering of an extended or plain program for an external
/// bounded model checker. `error_labels` become assertion failures.
std::string export_c(const Program& p, const std::vector<std::string>& error_labels, int domain);
std::string export_c(const ExtendedProgram& ep, int domain);

} // namespace p2sc::cli
