#pragma once

#include <cpes/dsl/ast.hpp>
#include <cpes/dsl/lexer.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpes::dsl {

namespace detail {

inline constexpr std::array<std::string_view, 12> kReservedHeads = {
    "assert", "retract", "bind", "printout", "if",     "and",
    "not",    "test",    "or",   "exists",   "forall", "declare"};

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

 private:
  // ---- cursor -------------------------------------------------------------

  bool at_end() const { return i_ >= toks_.size(); }

  SourcePos here() const {
    if (!at_end()) return toks_[i_].pos;
    if (toks_.empty()) return {};
    const Token& last = toks_.back();
    return {last.pos.line, last.pos.column + last.lexeme.size()};
  }

  const Token& peek() const {
    if (at_end()) throw ParseError("unexpected end of input", here());
    return toks_[i_];
  }

  bool peek_is(TokenKind k) const { return !at_end() && toks_[i_].kind == k; }

  bool peek_symbol(std::string_view s) const {
    return peek_is(TokenKind::symbol) && toks_[i_].lexeme == s;
  }

  bool peek_list_head(std::string_view s) const {
    return peek_is(TokenKind::left_paren) && i_ + 1 < toks_.size() &&
           toks_[i_ + 1].kind == TokenKind::symbol && toks_[i_ + 1].lexeme == s;
  }

  const Token& next() {
    const Token& t = peek();
    ++i_;
    return t;
  }

  const Token& expect(TokenKind k, const char* what) {
    if (at_end()) throw ParseError(std::string("expected ") + what + ", found end of input", here());
    const Token& t = toks_[i_];
    if (t.kind != k) throw ParseError(std::string("expected ") + what + ", found '" + t.lexeme + "'", t.pos);
    ++i_;
    return t;
  }

  void expect_symbol(std::string_view s) {
    const Token& t = expect(TokenKind::symbol, std::string(s).c_str());
    if (t.lexeme != s) throw ParseError("expected '" + std::string(s) + "', found '" + t.lexeme + "'", t.pos);
  }

  static bool is_literal(TokenKind k) {
    return k == TokenKind::symbol || k == TokenKind::string || k == TokenKind::integer ||
           k == TokenKind::floating;
  }

  static Value literal_value(const Token& t) {
    switch (t.kind) {
      case TokenKind::symbol: return Symbol{t.lexeme};
      case TokenKind::string: return t.lexeme;
      case TokenKind::integer: {
        std::string_view s = t.lexeme;
        if (s.front() == '+') s.remove_prefix(1);
        std::int64_t v{};
        std::from_chars(s.data(), s.data() + s.size(), v);
        return v;
      }
      case TokenKind::floating: {
        std::string_view s = t.lexeme;
        if (s.front() == '+') s.remove_prefix(1);
        double v{};
        std::from_chars(s.data(), s.data() + s.size(), v);
        return v;
      }
      default: break;
    }
    throw ParseError("expected a literal, found '" + t.lexeme + "'", t.pos);
  }

  Value literal(const char* what) {
    const Token& t = peek();
    if (!is_literal(t.kind)) throw ParseError(std::string("expected ") + what + ", found '" + t.lexeme + "'", t.pos);
    ++i_;
    return literal_value(t);
  }

  static std::string var_name(const Token& t) { return t.lexeme.substr(1); }
  static std::string global_name(const Token& t) { return t.lexeme.substr(2, t.lexeme.size() - 3); }

  // ---- constructs ---------------------------------------------------------

  Construct construct() {
    SourcePos open = expect(TokenKind::left_paren, "'('").pos;
    const Token& head = peek();
    if (head.kind != TokenKind::symbol) throw ParseError("construct must start with a symbol", head.pos);

    Construct c;
    c.pos = open;
    if (head.lexeme == "deftemplate") {
      ++i_;
      c.node = template_def();
    } else if (head.lexeme == "defglobal") {
      ++i_;
      // several globals in one form expand into one construct each
      return global_defs(open);
    } else if (head.lexeme == "defrule") {
      ++i_;
      c.node = rule_def();
    } else if (head.lexeme.starts_with("def") ||
               std::find(kReservedHeads.begin(), kReservedHeads.end(), head.lexeme) != kReservedHeads.end()) {
      throw ParseError("unknown construct '" + head.lexeme + "'", head.pos);
    } else {
      c.node = fact_literal_body(/*allow_vars=*/false);
    }
    expect(TokenKind::right_paren, "')'");
    return c;
  }

  Construct global_defs(SourcePos open) {
    // Only the first definition is returned here; the rest are queued.
    std::vector<GlobalDef> defs;
    do {
      const Token& g = expect(TokenKind::global_variable, "global variable");
      expect_symbol("=");
      const Token& v = peek();
      if (v.kind != TokenKind::integer && v.kind != TokenKind::floating)
        throw ParseError("global initial value must be a number", v.pos);
      ++i_;
      defs.push_back({global_name(g), literal_value(v)});
    } while (!peek_is(TokenKind::right_paren));
    expect(TokenKind::right_paren, "')'");
    for (std::size_t k = 1; k < defs.size(); ++k) pending_.push_back({defs[k], open});
    return {defs.front(), open};
  }

  TemplateDef template_def() {
    TemplateDef t;
    t.name = expect(TokenKind::symbol, "template name").lexeme;
    if (peek_is(TokenKind::string)) ++i_;  // comment
    std::set<std::string> seen;
    while (!peek_is(TokenKind::right_paren)) {
      expect(TokenKind::left_paren, "'(slot ...)'");
      expect_symbol("slot");
      const Token& name = expect(TokenKind::symbol, "slot name");
      if (!seen.insert(name.lexeme).second) throw ParseError("duplicate slot '" + name.lexeme + "'", name.pos);
      SlotDef s{name.lexeme, std::nullopt};
      if (peek_is(TokenKind::left_paren)) {
        ++i_;
        expect_symbol("default");
        s.default_value = literal("default value");
        expect(TokenKind::right_paren, "')'");
      }
      expect(TokenKind::right_paren, "')'");
      t.slots.push_back(std::move(s));
    }
    return t;
  }

  // ---- rules --------------------------------------------------------------

  struct RuleScope {
    std::map<std::string, SourcePos> value_vars;    // bound by constraints
    std::map<std::string, SourcePos> address_vars;  // bound by <-
  };

  RuleDef rule_def() {
    RuleDef r;
    const Token& name = expect(TokenKind::symbol, "rule name");
    r.name = name.lexeme;
    if (peek_is(TokenKind::string)) ++i_;  // comment
    if (peek_list_head("declare")) {
      i_ += 2;
      expect(TokenKind::left_paren, "'(salience ...)'");
      expect_symbol("salience");
      const Token& s = expect(TokenKind::integer, "integer salience");
      r.salience = std::get<std::int64_t>(literal_value(s));
      expect(TokenKind::right_paren, "')'");
      expect(TokenKind::right_paren, "')'");
    }

    RuleScope scope;
    while (!peek_is(TokenKind::arrow) || peek().lexeme != "=>") {
      if (peek_is(TokenKind::right_paren)) throw ParseError("defrule '" + r.name + "' is missing '=>'", peek().pos);
      r.lhs.push_back(pattern(scope));
    }
    const Token& arrow = next();
    if (r.lhs.empty()) throw ParseError("defrule '" + r.name + "' has no patterns", arrow.pos);

    for (auto& [v, pos] : scope.address_vars)
      if (scope.value_vars.count(v))
        throw ParseError("fact-address variable ?" + v + " is also bound in a pattern", pos);

    while (!peek_is(TokenKind::right_paren)) action_into(r.rhs, scope);
    if (r.rhs.empty()) throw ParseError("defrule '" + r.name + "' has no actions", peek().pos);
    return r;
  }

  PatternSpec pattern(RuleScope& scope) {
    PatternSpec p;
    if (peek_is(TokenKind::variable)) {
      const Token& v = next();
      const Token& arrow = expect(TokenKind::arrow, "'<-'");
      if (arrow.lexeme != "<-") throw ParseError("expected '<-'", arrow.pos);
      if (!scope.address_vars.emplace(var_name(v), v.pos).second)
        throw ParseError("fact-address variable " + v.lexeme + " bound twice", v.pos);
      p.address = var_name(v);
    }
    expect(TokenKind::left_paren, "pattern");
    const Token& head = expect(TokenKind::symbol, "pattern name");
    if (std::find(kReservedHeads.begin(), kReservedHeads.end(), head.lexeme) != kReservedHeads.end())
      throw ParseError("unsupported conditional element '" + head.lexeme + "'", head.pos);
    p.name = head.lexeme;

    if (peek_is(TokenKind::left_paren)) {
      p.shape = FactShape::templated;
      std::set<std::string> seen;
      while (!peek_is(TokenKind::right_paren)) {
        expect(TokenKind::left_paren, "'(slot constraint)'");
        const Token& slot = expect(TokenKind::symbol, "slot name");
        if (!seen.insert(slot.lexeme).second)
          throw ParseError("slot '" + slot.lexeme + "' constrained twice", slot.pos);
        p.slots.push_back({slot.lexeme, constraint(scope)});
        expect(TokenKind::right_paren, "')'");
      }
    } else {
      while (!peek_is(TokenKind::right_paren)) {
        if (peek_is(TokenKind::left_paren))
          throw ParseError("cannot mix slot and positional fields", peek().pos);
        p.fields.push_back(constraint(scope));
      }
    }
    expect(TokenKind::right_paren, "')'");
    return p;
  }

  Constraint constraint(RuleScope& scope) {
    const Token& t = peek();
    if (t.kind == TokenKind::variable) {
      ++i_;
      scope.value_vars.emplace(var_name(t), t.pos);
      return Variable{var_name(t)};
    }
    if (t.kind == TokenKind::symbol && t.lexeme == "?") {
      ++i_;
      return Wildcard{};
    }
    if (t.kind == TokenKind::global_variable) throw ParseError("global variables cannot appear in patterns", t.pos);
    return literal("constraint");
  }

  // ---- actions ------------------------------------------------------------

  void action_into(std::vector<ActionSpec>& out, const RuleScope& scope) {
    expect(TokenKind::left_paren, "action");
    const Token& head = expect(TokenKind::symbol, "action name");
    const std::string& h = head.lexeme;
    if (h == "assert") {
      do {
        expect(TokenKind::left_paren, "fact");
        FactLiteral f = fact_literal_body(/*allow_vars=*/true, &scope);
        expect(TokenKind::right_paren, "')'");
        out.push_back({AssertAction{std::move(f)}});
      } while (!peek_is(TokenKind::right_paren));
    } else if (h == "retract") {
      do {
        const Token& v = expect(TokenKind::variable, "fact-address variable");
        if (!scope.address_vars.count(var_name(v)))
          throw ParseError(v.lexeme + " is not a fact-address variable", v.pos);
        out.push_back({RetractAction{var_name(v)}});
      } while (!peek_is(TokenKind::right_paren));
    } else if (h == "bind") {
      const Token& g = peek();
      if (g.kind != TokenKind::global_variable) throw ParseError("bind target must be a global variable", g.pos);
      ++i_;
      out.push_back({BindAction{global_name(g), expr(scope)}});
    } else if (h == "printout") {
      expect_symbol("t");
      PrintAction p;
      while (!peek_is(TokenKind::right_paren)) {
        if (peek_symbol("crlf")) {
          const Token& c = next();
          if (!peek_is(TokenKind::right_paren)) throw ParseError("crlf must be the last printout item", c.pos);
          p.newline = true;
          break;
        }
        p.items.push_back(expr(scope));
      }
      out.push_back({std::move(p)});
    } else if (h == "if") {
      IfAction a{condition(scope), {}, std::nullopt};
      expect_symbol("then");
      while (!peek_is(TokenKind::right_paren) && !peek_symbol("else")) action_into(a.then_actions, scope);
      if (peek_symbol("else")) {
        ++i_;
        a.else_actions.emplace();
        while (!peek_is(TokenKind::right_paren)) action_into(*a.else_actions, scope);
      }
      out.push_back({std::move(a)});
    } else {
      throw ParseError("unknown action '" + h + "'", head.pos);
    }
    expect(TokenKind::right_paren, "')'");
  }

  void check_value_var(const Token& v, const RuleScope& scope) {
    std::string n = var_name(v);
    if (scope.address_vars.count(n)) throw ParseError(v.lexeme + " is a fact address, not a value", v.pos);
    if (!scope.value_vars.count(n)) throw ParseError(v.lexeme + " is not bound on the left-hand side", v.pos);
  }

  Expr expr(const RuleScope& scope) {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::variable:
        ++i_;
        check_value_var(t, scope);
        return {Variable{var_name(t)}};
      case TokenKind::global_variable:
        ++i_;
        return {Global{global_name(t)}};
      case TokenKind::left_paren: {
        ++i_;
        const Token& op = expect(TokenKind::symbol, "arithmetic operator");
        Arith a;
        if (op.lexeme == "+") a.op = ArithOp::add;
        else if (op.lexeme == "-") a.op = ArithOp::sub;
        else if (op.lexeme == "*") a.op = ArithOp::mul;
        else if (op.lexeme == "/") a.op = ArithOp::div;
        else throw ParseError("unknown function '" + op.lexeme + "'", op.pos);
        while (!peek_is(TokenKind::right_paren)) a.args.push_back(expr(scope));
        if (a.args.empty()) throw ParseError("'" + op.lexeme + "' needs at least one operand", op.pos);
        expect(TokenKind::right_paren, "')'");
        return {std::move(a)};
      }
      default:
        return {literal("expression")};
    }
  }

  Condition condition(const RuleScope& scope) {
    expect(TokenKind::left_paren, "condition");
    const Token& op = expect(TokenKind::symbol, "comparison");
    Condition c;
    if (op.lexeme == "and") {
      Conjunction conj;
      while (!peek_is(TokenKind::right_paren)) conj.terms.push_back(condition(scope));
      if (conj.terms.empty()) throw ParseError("'and' needs at least one condition", op.pos);
      c.node = std::move(conj);
    } else {
      static const std::map<std::string, CompareOp, std::less<>> ops = {
          {"<", CompareOp::lt}, {"<=", CompareOp::le}, {">", CompareOp::gt},
          {">=", CompareOp::ge}, {"=", CompareOp::eq}, {"<>", CompareOp::ne}};
      auto it = ops.find(op.lexeme);
      if (it == ops.end()) throw ParseError("unknown comparison '" + op.lexeme + "'", op.pos);
      Expr lhs = expr(scope);
      Expr rhs = expr(scope);
      c.node = Comparison{it->second, std::move(lhs), std::move(rhs)};
    }
    expect(TokenKind::right_paren, "')' after two operands");
    return c;
  }

  // ---- facts --------------------------------------------------------------

  // Parses `name field*` after the opening paren.
  FactLiteral fact_literal_body(bool allow_vars, const RuleScope* scope = nullptr) {
    FactLiteral f;
    f.name = expect(TokenKind::symbol, "fact name").lexeme;
    if (peek_is(TokenKind::left_paren)) {
      f.shape = FactShape::templated;
      std::set<std::string> seen;
      while (!peek_is(TokenKind::right_paren)) {
        expect(TokenKind::left_paren, "'(slot value)'");
        const Token& slot = expect(TokenKind::symbol, "slot name");
        if (!seen.insert(slot.lexeme).second) throw ParseError("slot '" + slot.lexeme + "' given twice", slot.pos);
        f.slots.push_back({slot.lexeme, term(allow_vars, scope)});
        expect(TokenKind::right_paren, "')'");
      }
    } else {
      while (!peek_is(TokenKind::right_paren)) {
        if (peek_is(TokenKind::left_paren)) throw ParseError("cannot mix slot and positional fields", peek().pos);
        f.fields.push_back(term(allow_vars, scope));
      }
    }
    return f;
  }

  Term term(bool allow_vars, const RuleScope* scope) {
    const Token& t = peek();
    if (t.kind == TokenKind::variable || t.kind == TokenKind::global_variable) {
      if (!allow_vars) throw ParseError("variables are not allowed in a fact outside a rule", t.pos);
      ++i_;
      if (t.kind == TokenKind::global_variable) return Global{global_name(t)};
      check_value_var(t, *scope);
      return Variable{var_name(t)};
    }
    return literal("fact value");
  }

 public:
  // defglobal forms may define several globals; they are drained here.
  Program program_with_pending() {
    Program out;
    std::set<std::string> templates;
    while (!at_end()) {
      Construct c = construct();
      if (auto* t = std::get_if<TemplateDef>(&c.node)) {
        if (!templates.insert(t->name).second)
          throw ParseError("duplicate template '" + t->name + "'", c.pos);
      }
      out.push_back(std::move(c));
      for (auto& p : pending_) out.push_back(std::move(p));
      pending_.clear();
    }
    return out;
  }

 private:
  std::span<const Token> toks_;
  std::size_t i_ = 0;
  std::vector<Construct> pending_;
};

}  // namespace detail

// Builds one Construct per top-level form (a defglobal naming several
// globals yields one GlobalDef each). Throws ParseError with the position of
// the offending token.
inline Program parse_program(std::span<const Token> tokens) {
  return detail::Parser(tokens).program_with_pending();
}

inline Program parse_program(std::string_view source) {
  auto tokens = tokenize(source);
  return parse_program(std::span<const Token>(tokens));
}

}  // namespace cpes::dsl
