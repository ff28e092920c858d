#include "lexer.hpp"

#include <cctype>

#include "p2sc/parser.hpp"

namespace p2sc::detail {

namespace {
bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '@';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
} // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      // `..` is the range operator, never part of a name.
      while (j < src.size() && ident_char(src[j]) &&
             !(src[j] == '.' && j + 1 < src.size() && src[j + 1] == '.'))
        ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view two[] = {":=", "!=", "<=", ">=", "&&",
                                               "||", ".."};
    bool matched = false;
    for (auto t : two) {
      if (src.substr(i, 2) == t) {
        out.push_back({Tok::Sym, std::string(t), tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched)
      continue;
    if (std::string_view(":;,{}()[]+-*%=<>!").find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

} // namespace p2sc::detail
