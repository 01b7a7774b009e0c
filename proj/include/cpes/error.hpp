#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpes {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Position of the first character of a lexeme, both 1-based.
struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
  bool operator==(const SourcePos&) const = default;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, SourcePos pos)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what),
        message_(what),
        pos_(pos) {}

  SourcePos pos() const { return pos_; }
  std::size_t line() const { return pos_.line; }
  std::size_t column() const { return pos_.column; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  SourcePos pos_;
};

class LexError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class ParseError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

// Raised by the session API (unknown template or slot, undeclared global).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Raised while executing a rule's actions.
class ActionError : public Error {
 public:
  ActionError(const std::string& rule, const std::string& what)
      : Error("rule " + rule + ": " + what), rule_(rule) {}

  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

}  // namespace cpes
