#pragma once

#include <cpes/dsl/ast.hpp>

#include <span>
#include <string>

namespace cpes::dsl {

namespace detail {

inline const char* op_name(ArithOp op) {
  switch (op) {
    case ArithOp::add: return "+";
    case ArithOp::sub: return "-";
    case ArithOp::mul: return "*";
    case ArithOp::div: return "/";
  }
  return "?";
}

inline const char* op_name(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "<>";
  }
  return "?";
}

struct Printer {
  std::string out;

  void indent(int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

  void term(const Term& t) {
    if (auto* v = std::get_if<Value>(&t)) out += to_source(*v);
    else if (auto* var = std::get_if<Variable>(&t)) out += "?" + var->name;
    else out += "?*" + std::get<Global>(t).name + "*";
  }

  void constraint(const Constraint& c) {
    if (auto* v = std::get_if<Value>(&c)) out += to_source(*v);
    else if (auto* var = std::get_if<Variable>(&c)) out += "?" + var->name;
    else out += "?";
  }

  void expr(const Expr& e) {
    if (auto* a = std::get_if<Arith>(&e.node)) {
      out += "(";
      out += op_name(a->op);
      for (const auto& arg : a->args) {
        out += " ";
        expr(arg);
      }
      out += ")";
    } else if (auto* v = std::get_if<Value>(&e.node)) {
      out += to_source(*v);
    } else if (auto* var = std::get_if<Variable>(&e.node)) {
      out += "?" + var->name;
    } else {
      out += "?*" + std::get<Global>(e.node).name + "*";
    }
  }

  void condition(const Condition& c) {
    if (auto* cmp = std::get_if<Comparison>(&c.node)) {
      out += "(";
      out += op_name(cmp->op);
      out += " ";
      expr(cmp->lhs);
      out += " ";
      expr(cmp->rhs);
      out += ")";
    } else {
      out += "(and";
      for (const auto& t : std::get<Conjunction>(c.node).terms) {
        out += " ";
        condition(t);
      }
      out += ")";
    }
  }

  void fact(const FactLiteral& f) {
    out += "(" + f.name;
    if (f.shape == FactShape::templated) {
      for (const auto& s : f.slots) {
        out += " (" + s.slot + " ";
        term(s.value);
        out += ")";
      }
    } else {
      for (const auto& t : f.fields) {
        out += " ";
        term(t);
      }
    }
    out += ")";
  }

  void pattern(const PatternSpec& p) {
    if (p.address) out += "?" + *p.address + " <- ";
    out += "(" + p.name;
    if (p.shape == FactShape::templated) {
      for (const auto& s : p.slots) {
        out += " (" + s.slot + " ";
        constraint(s.constraint);
        out += ")";
      }
    } else {
      for (const auto& c : p.fields) {
        out += " ";
        constraint(c);
      }
    }
    out += ")";
  }

  void action(const ActionSpec& a, int depth) {
    indent(depth);
    std::visit(
        [&](const auto& act) {
          using T = std::decay_t<decltype(act)>;
          if constexpr (std::is_same_v<T, AssertAction>) {
            out += "(assert ";
            fact(act.fact);
            out += ")";
          } else if constexpr (std::is_same_v<T, RetractAction>) {
            out += "(retract ?" + act.variable + ")";
          } else if constexpr (std::is_same_v<T, BindAction>) {
            out += "(bind ?*" + act.global + "* ";
            expr(act.value);
            out += ")";
          } else if constexpr (std::is_same_v<T, PrintAction>) {
            out += "(printout t";
            for (const auto& e : act.items) {
              out += " ";
              expr(e);
            }
            if (act.newline) out += " crlf";
            out += ")";
          } else {
            out += "(if ";
            condition(act.condition);
            out += " then";
            for (const auto& sub : act.then_actions) {
              out += "\n";
              action(sub, depth + 1);
            }
            if (act.else_actions) {
              out += "\n";
              indent(depth);
              out += " else";
              for (const auto& sub : *act.else_actions) {
                out += "\n";
                action(sub, depth + 1);
              }
            }
            out += ")";
          }
        },
        a.node);
  }

  void construct(const Construct& c) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, TemplateDef>) {
            out += "(deftemplate " + node.name;
            for (const auto& s : node.slots) {
              out += "\n  (slot " + s.name;
              if (s.default_value) out += " (default " + to_source(*s.default_value) + ")";
              out += ")";
            }
            out += ")\n";
          } else if constexpr (std::is_same_v<T, GlobalDef>) {
            out += "(defglobal ?*" + node.name + "* = " + to_source(node.initial) + ")\n";
          } else if constexpr (std::is_same_v<T, RuleDef>) {
            out += "(defrule " + node.name;
            if (node.salience != 0) out += "\n  (declare (salience " + std::to_string(node.salience) + "))";
            for (const auto& p : node.lhs) {
              out += "\n  ";
              pattern(p);
            }
            out += "\n  =>";
            for (const auto& a : node.rhs) {
              out += "\n";
              action(a, 1);
            }
            out += ")\n";
          } else {
            fact(node);
            out += "\n";
          }
        },
        c.node);
  }
};

}  // namespace detail

// Canonical source text: one construct per block, two-space indentation,
// a blank line between constructs.
inline std::string pretty_print(std::span<const Construct> constructs) {
  detail::Printer p;
  for (std::size_t i = 0; i < constructs.size(); ++i) {
    if (i) p.out += "\n";
    p.construct(constructs[i]);
  }
  return p.out;
}

}  // namespace cpes::dsl
