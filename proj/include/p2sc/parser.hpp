#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "p2sc/ast.hpp"

namespace p2sc {

/// Syntax or declaration error, located in the source text (1-based).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  /// The message without the location prefix.
  const std::string& message() const { return message_; }

private:
  std::string message_;
  int line_;
  int column_;
};

/// Parses the native program format. The translated-program constructs
/// (`atomic`, `constrain`, `choose`, array declarations, `@` names) are
/// accepted as well; validate_program() rejects them in source programs.
Program parse_program(std::string_view text);

/// Canonical text form; parse_program(print_program(p)) == p.
std::string print_program(const Program& p);
std::string print_expr(const Expr& e);

} // namespace p2sc
