#pragma once

#include <cpes/error.hpp>

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cpes::dsl {

enum class TokenKind {
  left_paren,
  right_paren,
  symbol,
  integer,
  floating,
  string,
  variable,         // ?name
  global_variable,  // ?*name*
  arrow,            // => or <-
};

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::left_paren: return "left-paren";
    case TokenKind::right_paren: return "right-paren";
    case TokenKind::symbol: return "symbol";
    case TokenKind::integer: return "integer";
    case TokenKind::floating: return "float";
    case TokenKind::string: return "string";
    case TokenKind::variable: return "variable";
    case TokenKind::global_variable: return "global-variable";
    case TokenKind::arrow: return "arrow";
  }
  return "?";
}

struct Token {
  TokenKind kind;
  // Raw source text, except for strings where it holds the unescaped contents.
  std::string lexeme;
  SourcePos pos;

  bool operator==(const Token&) const = default;
};

namespace detail {

inline bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == '"' || c == ';' || std::isspace(static_cast<unsigned char>(c));
}

inline bool is_illegal(char c) {
  auto u = static_cast<unsigned char>(c);
  if (u == 0x7f) return true;
  if (u < 0x20) return !std::isspace(u);
  // connective constraints are not part of the language
  return c == '&' || c == '|' || c == '~';
}

inline bool looks_numeric(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  if (i < s.size() && s[i] == '.') ++i;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Splits source text into tokens. `;` starts a comment that runs to the end
// of the line. Throws LexError on an unterminated string, an illegal
// character or an out-of-range numeric literal.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    SourcePos pos{line, col};
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
    } else if (c == ';') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (c == '(') {
      out.push_back({TokenKind::left_paren, "(", pos});
      advance(1);
    } else if (c == ')') {
      out.push_back({TokenKind::right_paren, ")", pos});
      advance(1);
    } else if (c == '"') {
      advance(1);
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\\') {
          if (i + 1 >= src.size()) break;
          text += src[i + 1];
          advance(2);
          continue;
        }
        text += d;
        advance(1);
      }
      if (!closed) throw LexError("unterminated string", pos);
      out.push_back({TokenKind::string, std::move(text), pos});
    } else if (detail::is_illegal(c)) {
      throw LexError("illegal character", pos);
    } else {
      std::size_t j = i;
      while (j < src.size() && !detail::is_delimiter(src[j])) {
        if (detail::is_illegal(src[j])) {
          SourcePos bad{line, col + (j - i)};
          throw LexError("illegal character", bad);
        }
        ++j;
      }
      std::string_view word = src.substr(i, j - i);
      Token tok{TokenKind::symbol, std::string(word), pos};

      if (word == "=>" || word == "<-") {
        tok.kind = TokenKind::arrow;
      } else if (word.size() >= 2 && word[0] == '?' && word[1] == '*') {
        if (word.size() < 4 || word.back() != '*')
          throw LexError("malformed global variable '" + std::string(word) + "'", pos);
        tok.kind = TokenKind::global_variable;
      } else if (word.size() >= 2 && word[0] == '?') {
        tok.kind = TokenKind::variable;
      } else if (detail::looks_numeric(word)) {
        std::string_view digits = word;
        if (digits[0] == '+' || digits[0] == '-') digits.remove_prefix(1);
        if (detail::all_digits(digits)) {
          std::int64_t v{};
          std::string_view body = word[0] == '+' ? word.substr(1) : word;
          auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
          if (ec != std::errc{} || p != body.data() + body.size())
            throw LexError("integer literal out of range", pos);
          tok.kind = TokenKind::integer;
        } else {
          double v{};
          std::string_view body = word[0] == '+' ? word.substr(1) : word;
          auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
          bool whole = p == body.data() + body.size();
          if (ec == std::errc::result_out_of_range && whole)
            throw LexError("float literal out of range", pos);
          if (ec == std::errc{} && whole) tok.kind = TokenKind::floating;
          // anything else numeric-looking ("1a", "2-3") stays a symbol
        }
      }
      out.push_back(std::move(tok));
      advance(j - i);
    }
  }
  return out;
}

}  // namespace cpes::dsl
