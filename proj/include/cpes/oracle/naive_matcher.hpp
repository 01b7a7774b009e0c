#pragma once

// Brute-force matcher used as ground truth for the RETE network. It shares
// nothing with the engine beyond the AST and Fact types: every call
// enumerates the full Cartesian product of facts over each rule's patterns.

#include <cpes/dsl/ast.hpp>
#include <cpes/engine/fact.hpp>

#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace cpes::oracle {

using engine::Fact;
using engine::FactId;

struct Match {
  std::string rule;
  std::vector<FactId> facts;  // one per pattern, in pattern order
  std::map<std::string, Value> bindings;

  auto operator<=>(const Match&) const = default;
  bool operator==(const Match&) const = default;
};

using ActivationSet = std::set<Match>;

namespace detail {

// The field a constraint applies to, or nothing if the fact lacks the slot.
inline const Value* field(const Fact& f, const dsl::PatternSpec& p, std::size_t k) {
  if (p.shape == dsl::FactShape::templated) {
    if (!f.slot_names) return nullptr;
    const auto& names = *f.slot_names;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == p.slots[k].slot) return &f.values[i];
    return nullptr;
  }
  return &f.values[k];
}

inline bool shape_fits(const Fact& f, const dsl::PatternSpec& p) {
  if (f.name != p.name) return false;
  if (p.shape == dsl::FactShape::templated) return f.templated();
  // an empty ordered pattern also stands for "any fact of this template"
  if (f.templated()) return p.fields.empty();
  return f.values.size() == p.fields.size();
}

inline bool unify(const dsl::Constraint& c, const Value& v, std::map<std::string, Value>& b) {
  if (std::holds_alternative<dsl::Wildcard>(c)) return true;
  if (auto* lit = std::get_if<Value>(&c)) return *lit == v;
  const std::string& name = std::get<dsl::Variable>(c).name;
  auto [it, fresh] = b.emplace(name, v);
  return fresh || it->second == v;
}

inline bool fits(const Fact& f, const dsl::PatternSpec& p, std::map<std::string, Value>& b) {
  if (!shape_fits(f, p)) return false;
  std::size_t n = p.shape == dsl::FactShape::templated ? p.slots.size() : p.fields.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Value* v = field(f, p, k);
    if (!v) return false;
    const dsl::Constraint& c = p.shape == dsl::FactShape::templated ? p.slots[k].constraint : p.fields[k];
    if (!unify(c, *v, b)) return false;
  }
  return true;
}

}  // namespace detail

// Every assignment of facts to the rule's patterns that passes all constant
// and variable-consistency tests. A fact may fill more than one pattern.
inline ActivationSet match_all(std::span<const dsl::RuleDef> rules, std::span<const Fact> facts) {
  ActivationSet out;
  for (const auto& rule : rules) {
    const std::size_t n = rule.lhs.size();
    if (facts.empty() || n == 0) continue;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      std::map<std::string, Value> bindings;
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) ok = detail::fits(facts[pick[i]], rule.lhs[i], bindings);
      if (ok) {
        Match m{rule.name, {}, std::move(bindings)};
        for (std::size_t i = 0; i < n; ++i) m.facts.push_back(facts[pick[i]].id);
        out.insert(std::move(m));
      }
      // odometer over facts^n
      std::size_t i = n;
      while (i > 0 && ++pick[i - 1] == facts.size()) pick[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

}  // namespace cpes::oracle
