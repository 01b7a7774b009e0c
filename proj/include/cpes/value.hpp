#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <system_error>
#include <variant>

namespace cpes {

struct Symbol {
  std::string name;
  auto operator<=>(const Symbol&) const = default;
};

// A field value in a fact, a literal in the DSL, or the result of evaluating
// an expression. Integer and float are distinct: 1 and 1.0 do not match.
using Value = std::variant<Symbol, std::string, std::int64_t, double>;

inline bool is_number(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

inline double as_double(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

// Shortest decimal form that reads back to the same double; always contains
// a '.' or an exponent so the lexer sees a float.
inline std::string format_float(double d) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Source form: strings quoted, symbols bare.
inline std::string to_source(const Value& v) {
  struct {
    std::string operator()(const Symbol& s) const { return s.name; }
    std::string operator()(const std::string& s) const { return quote_string(s); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_float(d); }
  } visitor;
  return std::visit(visitor, v);
}

// Display form used by printout: strings unquoted.
inline std::string to_display(const Value& v) {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  return to_source(v);
}

}  // namespace cpes
