#pragma once

// Random program and working-memory generators shared by the property tests
// and the acceptance suite. Seeded explicitly so failures reproduce.

#include <cpes/dsl/ast.hpp>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace cpes::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick_from(Rng& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

// ---- arbitrary well-formed programs (for print/parse round trips) ---------

class ProgramGenerator {
 public:
  explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

  dsl::Program program(std::size_t constructs) {
    dsl::Program p;
    for (std::size_t i = 0; i < constructs; ++i) {
      switch (pick(rng_, 4)) {
        case 0: p.push_back({template_def(i)}); break;
        case 1: p.push_back({dsl::GlobalDef{"g" + std::to_string(i), number()}}); break;
        case 2: p.push_back({fact()}); break;
        default: p.push_back({rule(i)}); break;
      }
    }
    return p;
  }

  dsl::RuleDef rule(std::size_t n) {
    dsl::RuleDef r;
    r.name = "rule-" + std::to_string(n);
    if (chance(rng_, 0.4)) r.salience = std::uniform_int_distribution<std::int64_t>(-100, 100)(rng_);
    vars_.clear();
    addresses_.clear();
    std::size_t patterns = 1 + pick(rng_, 3);
    for (std::size_t i = 0; i < patterns; ++i) r.lhs.push_back(pattern(i));
    std::size_t actions = 1 + pick(rng_, 4);
    for (std::size_t i = 0; i < actions; ++i) r.rhs.push_back(action(2));
    return r;
  }

 private:
  Value symbol() {
    static const std::vector<std::string> pool = {"a", "b", "red", "blue", "x-1", "foo.bar", "nil", "yes", "no", "*", "Z9"};
    return Symbol{pick_from(rng_, pool)};
  }

  Value string_value() {
    static const std::vector<std::string> pool = {"", "hello", "two words", "quote\"inside", "back\\slash",
                                                  "line\nbreak", "; not a comment", "(parens)"};
    return pick_from(rng_, pool);
  }

  Value number() {
    if (chance(rng_, 0.5)) {
      switch (pick(rng_, 4)) {
        case 0: return std::numeric_limits<std::int64_t>::min();
        case 1: return std::numeric_limits<std::int64_t>::max();
        default: return std::uniform_int_distribution<std::int64_t>(-1000, 1000)(rng_);
      }
    }
    switch (pick(rng_, 4)) {
      case 0: return 0.1;
      case 1: return -2.5e-300;
      case 2: return 1e21;
      default: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng_);
    }
  }

  Value literal() {
    switch (pick(rng_, 3)) {
      case 0: return symbol();
      case 1: return string_value();
      default: return number();
    }
  }

  std::string name() {
    static const std::vector<std::string> pool = {"answer", "result", "p", "q", "item-1", "person"};
    return pick_from(rng_, pool);
  }

  std::string fresh_var() {
    std::string v = "v" + std::to_string(vars_.size());
    vars_.push_back(v);
    return v;
  }

  dsl::Constraint constraint() {
    switch (pick(rng_, 4)) {
      case 0: return dsl::Wildcard{};
      case 1: return dsl::Variable{vars_.empty() || chance(rng_, 0.5) ? fresh_var() : pick_from(rng_, vars_)};
      default: return literal();
    }
  }

  dsl::PatternSpec pattern(std::size_t i) {
    dsl::PatternSpec p;
    if (chance(rng_, 0.3)) {
      p.address = "addr" + std::to_string(i);
      addresses_.push_back(*p.address);
    }
    p.name = name();
    if (chance(rng_, 0.5)) {
      p.shape = dsl::FactShape::templated;
      std::size_t n = 1 + pick(rng_, 3);
      for (std::size_t k = 0; k < n; ++k) p.slots.push_back({"s" + std::to_string(k), constraint()});
    } else {
      std::size_t n = pick(rng_, 4);
      for (std::size_t k = 0; k < n; ++k) p.fields.push_back(constraint());
    }
    return p;
  }

  dsl::Expr expr(int depth) {
    std::size_t k = pick(rng_, depth > 0 ? 4 : 3);
    if (k == 0 && !vars_.empty()) return {dsl::Variable{pick_from(rng_, vars_)}};
    if (k == 1) return {dsl::Global{"g" + std::to_string(pick(rng_, 3))}};
    if (k == 3) {
      dsl::Arith a{static_cast<dsl::ArithOp>(pick(rng_, 4)), {}};
      std::size_t n = 1 + pick(rng_, 3);
      for (std::size_t i = 0; i < n; ++i) a.args.push_back(expr(depth - 1));
      return {std::move(a)};
    }
    return {literal()};
  }

  dsl::Condition condition(int depth) {
    if (depth > 0 && chance(rng_, 0.3)) {
      dsl::Conjunction c;
      std::size_t n = 1 + pick(rng_, 3);
      for (std::size_t i = 0; i < n; ++i) c.terms.push_back(condition(depth - 1));
      return {std::move(c)};
    }
    return {dsl::Comparison{static_cast<dsl::CompareOp>(pick(rng_, 6)), expr(2), expr(2)}};
  }

  dsl::Term term() {
    if (!vars_.empty() && chance(rng_, 0.3)) return dsl::Variable{pick_from(rng_, vars_)};
    if (chance(rng_, 0.2)) return dsl::Global{"g0"};
    return literal();
  }

  dsl::FactLiteral fact(bool allow_vars = false) {
    dsl::FactLiteral f;
    f.name = name();
    auto value = [&]() -> dsl::Term { return allow_vars ? term() : dsl::Term{literal()}; };
    if (chance(rng_, 0.5)) {
      f.shape = dsl::FactShape::templated;
      std::size_t n = 1 + pick(rng_, 3);
      for (std::size_t k = 0; k < n; ++k) f.slots.push_back({"s" + std::to_string(k), value()});
    } else {
      std::size_t n = pick(rng_, 4);
      for (std::size_t k = 0; k < n; ++k) f.fields.push_back(value());
    }
    return f;
  }

  dsl::ActionSpec action(int depth) {
    std::size_t k = pick(rng_, depth > 0 ? 5 : 4);
    switch (k) {
      case 0: return {dsl::AssertAction{fact(true)}};
      case 1:
        if (!addresses_.empty()) return {dsl::RetractAction{pick_from(rng_, addresses_)}};
        [[fallthrough]];
      case 2: return {dsl::BindAction{"g" + std::to_string(pick(rng_, 3)), expr(2)}};
      case 3: {
        dsl::PrintAction p;
        std::size_t n = pick(rng_, 4);
        for (std::size_t i = 0; i < n; ++i) p.items.push_back(expr(1));
        p.newline = chance(rng_, 0.5);
        return {std::move(p)};
      }
      default: {
        dsl::IfAction a{condition(2), {}, std::nullopt};
        std::size_t n = pick(rng_, 3);
        for (std::size_t i = 0; i < n; ++i) a.then_actions.push_back(action(depth - 1));
        if (chance(rng_, 0.5)) {
          a.else_actions.emplace();
          std::size_t m = pick(rng_, 3);
          for (std::size_t i = 0; i < m; ++i) a.else_actions->push_back(action(depth - 1));
        }
        return {std::move(a)};
      }
    }
  }

  dsl::TemplateDef template_def(std::size_t n) {
    dsl::TemplateDef t{"tmpl-" + std::to_string(n), {}};
    std::size_t slots = pick(rng_, 4);
    for (std::size_t k = 0; k < slots; ++k) {
      dsl::SlotDef s{"s" + std::to_string(k), std::nullopt};
      if (chance(rng_, 0.5)) s.default_value = literal();
      t.slots.push_back(std::move(s));
    }
    return t;
  }

  Rng rng_;
  std::vector<std::string> vars_;
  std::vector<std::string> addresses_;
};

// ---- small rule bases plus a pool of candidate facts ----------------------

struct MatchInstance {
  dsl::Program program;                    // templates followed by rules
  std::vector<dsl::FactLiteral> candidates;  // facts that operations draw from
};

// Up to 5 fact types (templated or ordered), up to 8 rules of 1-3 patterns,
// and 20 candidate facts over a tiny value domain so joins actually succeed.
inline MatchInstance random_match_instance(Rng& rng) {
  struct FactType {
    std::string name;
    bool templated;
    std::size_t arity;
  };
  const std::vector<Value> domain = {Symbol{"a"}, Symbol{"b"}, std::int64_t{1}, std::int64_t{2}};
  const std::vector<std::string> var_pool = {"x", "y", "z"};

  MatchInstance inst;
  std::vector<FactType> types;
  std::size_t ntypes = 1 + pick(rng, 5);
  for (std::size_t i = 0; i < ntypes; ++i) {
    FactType t{"t" + std::to_string(i), chance(rng, 0.5), 1 + pick(rng, 3)};
    if (t.templated) {
      dsl::TemplateDef td{t.name, {}};
      for (std::size_t k = 0; k < t.arity; ++k) td.slots.push_back({"s" + std::to_string(k), std::nullopt});
      inst.program.push_back({std::move(td)});
    }
    types.push_back(t);
  }

  std::size_t nrules = 1 + pick(rng, 8);
  for (std::size_t r = 0; r < nrules; ++r) {
    dsl::RuleDef rule;
    rule.name = "r" + std::to_string(r);
    rule.salience = static_cast<std::int64_t>(pick(rng, 3)) - 1;
    std::size_t npat = 1 + pick(rng, 3);
    for (std::size_t i = 0; i < npat; ++i) {
      const FactType& t = pick_from(rng, types);
      dsl::PatternSpec p;
      p.name = t.name;
      if (chance(rng, 0.2)) p.address = "f" + std::to_string(i);
      auto c = [&]() -> dsl::Constraint {
        switch (pick(rng, 3)) {
          case 0: return pick_from(rng, domain);
          case 1: return dsl::Variable{pick_from(rng, var_pool)};
          default: return dsl::Wildcard{};
        }
      };
      if (t.templated) {
        p.shape = dsl::FactShape::templated;
        for (std::size_t k = 0; k < t.arity; ++k)
          if (k == 0 || chance(rng, 0.6)) p.slots.push_back({"s" + std::to_string(k), c()});
      } else {
        for (std::size_t k = 0; k < t.arity; ++k) p.fields.push_back(c());
      }
      rule.lhs.push_back(std::move(p));
    }
    rule.rhs.push_back({dsl::PrintAction{{dsl::Expr{Value{rule.name}}}, true}});
    inst.program.push_back({std::move(rule)});
  }

  for (std::size_t i = 0; i < 20; ++i) {
    const FactType& t = pick_from(rng, types);
    dsl::FactLiteral f;
    f.name = t.name;
    if (t.templated) {
      f.shape = dsl::FactShape::templated;
      for (std::size_t k = 0; k < t.arity; ++k) f.slots.push_back({"s" + std::to_string(k), pick_from(rng, domain)});
    } else {
      for (std::size_t k = 0; k < t.arity; ++k) f.fields.push_back(pick_from(rng, domain));
    }
    inst.candidates.push_back(std::move(f));
  }
  return inst;
}

}  // namespace cpes::testing
