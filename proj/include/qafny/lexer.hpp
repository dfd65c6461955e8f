#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "qafny/diag.hpp"

namespace qafny {

enum class Tok {
  Ident, Num,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Semi, Comma, Colon,
  Plus, Minus, Star, Slash, Percent, Caret,
  PlusPlus, StarEq, PlusEq, ColonEq, Eq,
  Lt, Le, EqEq, Ne, Ge, Gt,
  At, AndAnd, Pipe, MapsTo,
  End,
};

struct Token {
  Tok kind;
  std::string text;  // lexeme (numbers keep leading zeros for ket literals)
  std::uint64_t num = 0;
  int line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), 0, l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++col; ++i; continue; }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const int l = line, cl = col;
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      push(Tok::Ident, src.substr(i, j - i), l, cl);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Num, src.substr(i, j - i), 0, l, cl};
      t.num = std::stoull(t.text);
      out.push_back(std::move(t));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (two('+', '+')) { push(Tok::PlusPlus, "++", l, cl); i += 2; col += 2; continue; }
    if (two('+', '=')) { push(Tok::PlusEq, "+=", l, cl); i += 2; col += 2; continue; }
    if (two('*', '=')) { push(Tok::StarEq, "*=", l, cl); i += 2; col += 2; continue; }
    if (two(':', '=')) { push(Tok::ColonEq, ":=", l, cl); i += 2; col += 2; continue; }
    if (two('<', '=')) { push(Tok::Le, "<=", l, cl); i += 2; col += 2; continue; }
    if (two('=', '=')) { push(Tok::EqEq, "==", l, cl); i += 2; col += 2; continue; }
    if (two('!', '=')) { push(Tok::Ne, "!=", l, cl); i += 2; col += 2; continue; }
    if (two('>', '=')) { push(Tok::Ge, ">=", l, cl); i += 2; col += 2; continue; }
    if (two('&', '&')) { push(Tok::AndAnd, "&&", l, cl); i += 2; col += 2; continue; }
    if (c == '|' && i + 2 < src.size() && src[i + 1] == '-' && src[i + 2] == '>') {
      push(Tok::MapsTo, "|->", l, cl);
      i += 3; col += 3;
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ';': k = Tok::Semi; break;
      case ',': k = Tok::Comma; break;
      case ':': k = Tok::Colon; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '%': k = Tok::Percent; break;
      case '^': k = Tok::Caret; break;
      case '=': k = Tok::Eq; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '@': k = Tok::At; break;
      case '|': k = Tok::Pipe; break;
      default:
        throw Error(ErrCat::Parse, std::string("SyntaxError: unexpected character '") + c + "'",
                    l, cl);
    }
    push(k, std::string(1, c), l, cl);
    ++i; ++col;
  }
  out.push_back(Token{Tok::End, "", 0, line, col});
  return out;
}

}  // namespace qafny
