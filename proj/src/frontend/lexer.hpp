#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace p2sc::detail {

enum class Tok {
  Ident,  // identifiers, keywords, and `@`-prefixed names
  Number,
  Sym,    // punctuation / operators, text holds the spelling
  End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view src);

} // namespace p2sc::detail
