#pragma once

#include <cpes/error.hpp>
#include <cpes/value.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cpes::dsl {

// Names are stored without their sigils: `?x` is Variable{"x"},
// `?*weightage*` is Global{"weightage"}.
struct Variable {
  std::string name;
  bool operator==(const Variable&) const = default;
};

struct Global {
  std::string name;
  bool operator==(const Global&) const = default;
};

struct Wildcard {
  bool operator==(const Wildcard&) const = default;
};

// ---- expressions ----------------------------------------------------------

enum class ArithOp { add, sub, mul, div };

struct Expr;

struct Arith {
  ArithOp op;
  std::vector<Expr> args;  // at least one
  bool operator==(const Arith&) const = default;
};

struct Expr {
  std::variant<Value, Variable, Global, Arith> node;
  bool operator==(const Expr&) const = default;
};

enum class CompareOp { lt, le, gt, ge, eq, ne };

struct Condition;

struct Comparison {
  CompareOp op;
  Expr lhs;
  Expr rhs;
  bool operator==(const Comparison&) const = default;
};

struct Conjunction {
  std::vector<Condition> terms;  // at least one
  bool operator==(const Conjunction&) const = default;
};

struct Condition {
  std::variant<Comparison, Conjunction> node;
  bool operator==(const Condition&) const = default;
};

// ---- facts and patterns ---------------------------------------------------

// A form whose arguments are all `(slot value)` lists is templated; any other
// form, including one with no arguments, is ordered. The engine treats an
// empty ordered form naming a template as a templated form with no slots.
enum class FactShape { ordered, templated };

// Fact values. Variables and globals are only legal inside a rule's assert.
using Term = std::variant<Value, Variable, Global>;

struct SlotValue {
  std::string slot;
  Term value;
  bool operator==(const SlotValue&) const = default;
};

struct FactLiteral {
  std::string name;
  FactShape shape = FactShape::ordered;
  std::vector<Term> fields;      // ordered
  std::vector<SlotValue> slots;  // templated
  bool operator==(const FactLiteral&) const = default;
};

using Constraint = std::variant<Value, Variable, Wildcard>;

struct SlotConstraint {
  std::string slot;
  Constraint constraint;
  bool operator==(const SlotConstraint&) const = default;
};

struct PatternSpec {
  std::optional<std::string> address;  // fact-address variable name
  std::string name;
  FactShape shape = FactShape::ordered;
  std::vector<Constraint> fields;
  std::vector<SlotConstraint> slots;
  bool operator==(const PatternSpec&) const = default;
};

// ---- actions --------------------------------------------------------------

struct ActionSpec;

struct AssertAction {
  FactLiteral fact;
  bool operator==(const AssertAction&) const = default;
};

struct RetractAction {
  std::string variable;  // a fact-address variable
  bool operator==(const RetractAction&) const = default;
};

struct BindAction {
  std::string global;
  Expr value;
  bool operator==(const BindAction&) const = default;
};

struct PrintAction {
  std::vector<Expr> items;
  bool newline = false;  // trailing crlf
  bool operator==(const PrintAction&) const = default;
};

struct IfAction {
  Condition condition;
  std::vector<ActionSpec> then_actions;
  std::optional<std::vector<ActionSpec>> else_actions;
  bool operator==(const IfAction&) const = default;
};

struct ActionSpec {
  std::variant<AssertAction, RetractAction, BindAction, PrintAction, IfAction> node;
  bool operator==(const ActionSpec&) const = default;
};

// ---- constructs -----------------------------------------------------------

struct SlotDef {
  std::string name;
  std::optional<Value> default_value;
  bool operator==(const SlotDef&) const = default;
};

struct TemplateDef {
  std::string name;
  std::vector<SlotDef> slots;
  bool operator==(const TemplateDef&) const = default;
};

struct GlobalDef {
  std::string name;
  Value initial;  // integer or float
  bool operator==(const GlobalDef&) const = default;
};

struct RuleDef {
  std::string name;
  std::int64_t salience = 0;
  std::vector<PatternSpec> lhs;
  std::vector<ActionSpec> rhs;
  bool operator==(const RuleDef&) const = default;
};

struct Construct {
  std::variant<TemplateDef, GlobalDef, RuleDef, FactLiteral> node;
  SourcePos pos{};  // opening paren; ignored by equality

  bool operator==(const Construct& other) const { return node == other.node; }
};

using Program = std::vector<Construct>;

}  // namespace cpes::dsl
