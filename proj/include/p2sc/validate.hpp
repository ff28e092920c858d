#pragma once

#include <string>
#include <vector>

#include "p2sc/ast.hpp"

namespace p2sc {

struct Finding {
  std::string code;
  std::string message;
  std::string label; // empty when not tied to an instruction
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  bool has(const std::string& code) const;
};

enum class Dialect {
  Source,    // the input language only
  Translated // additionally atomic/constrain/choose/arrays/`@` names
};

/// Checks the well-formedness rules of programs. Never throws.
///
/// Codes: duplicate-label, shared-register, terminated-count,
/// empty-process, expr-mentions-variable, translated-construct,
/// reserved-name, bad-index, choose-outside-atomic, name-clash.
ValidationReport validate_program(const Program& p,
                                  Dialect dialect = Dialect::Source);

std::string report_to_json(const ValidationReport& r);

} // namespace p2sc
